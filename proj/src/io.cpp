// Copyright 2026 The PHN Forecast Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phn/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "phn/error.hpp"

namespace phn::io {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'P', 'H', 'N', 'S', 'E', 'T', '\0', '\0'};

template <class U> void put_le(std::string &out, U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
    }
}

class Reader {
  public:
    Reader(std::string_view bytes, const std::string &name) : bytes_(bytes), name_(name) {}

    template <class U> U get() {
        need(sizeof(U));
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        }
        pos_ += sizeof(U);
        return v;
    }

    double get_double() { return std::bit_cast<double>(get<std::uint64_t>()); }

    std::string_view take(std::size_t n) {
        need(n);
        auto s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    [[nodiscard]] bool at_end() const { return pos_ == bytes_.size(); }

  private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) {
            throw DataError(name_ + ": truncated set file");
        }
    }

    std::string_view bytes_;
    std::string name_;
    std::size_t pos_ = 0;
};

} // namespace

void write_file_atomic(const fs::path &path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw DataError("cannot create directory " + path.parent_path().string() + ": " +
                            ec.message());
        }
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError("cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw DataError("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        throw DataError("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                        ec.message());
    }
}

std::string read_file(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json read_json(const fs::path &path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error &e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
}

std::string dump_json(const nlohmann::json &doc) { return doc.dump(2) + "\n"; }

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string encode_set(const data::SupervisedSet &set, const nlohmann::json &config) {
    if (set.x.rows() != set.y.rows()) {
        throw ShapeError("feature and target row counts differ");
    }
    const std::string cfg = config.dump();
    std::string out(kMagic, sizeof(kMagic));
    put_le<std::uint32_t>(out, kSetVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.size()));
    out += cfg;
    put_le<std::uint64_t>(out, set.x.rows());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.x.cols()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.y.cols()));
    for (const Matrix *m : {&set.x, &set.y}) {
        for (double v : m->data()) {
            put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
        }
    }
    return out;
}

LoadedSet decode_set(std::string_view bytes, const std::string &source_name) {
    Reader r(bytes, source_name);
    if (r.take(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
        throw DataError(source_name + ": not a PHN set file (bad magic)");
    }
    const auto version = r.get<std::uint32_t>();
    if (version != kSetVersion) {
        throw DataError(source_name + ": unsupported set version " + std::to_string(version));
    }
    LoadedSet out;
    const auto cfg_len = r.get<std::uint32_t>();
    try {
        out.config = nlohmann::json::parse(r.take(cfg_len));
    } catch (const nlohmann::json::parse_error &e) {
        throw DataError(source_name + ": embedded config is not JSON: " + e.what());
    }
    const auto rows = r.get<std::uint64_t>();
    const auto nf = r.get<std::uint32_t>();
    const auto nt = r.get<std::uint32_t>();
    if (rows > bytes.size() / 8 || (nf + nt) * rows > bytes.size() / 8) {
        throw DataError(source_name + ": header sizes exceed file length");
    }
    out.set.x = Matrix(rows, nf);
    out.set.y = Matrix(rows, nt);
    for (Matrix *m : {&out.set.x, &out.set.y}) {
        for (auto &v : m->data()) {
            v = r.get_double();
        }
    }
    if (!r.at_end()) {
        throw DataError(source_name + ": trailing bytes after set payload");
    }
    return out;
}

void write_set(const fs::path &path, const data::SupervisedSet &set,
               const nlohmann::json &config) {
    write_file_atomic(path, encode_set(set, config));
}

LoadedSet read_set(const fs::path &path) { return decode_set(read_file(path), path.string()); }

} // namespace phn::io
