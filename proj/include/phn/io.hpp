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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "phn/pipeline.hpp"

namespace phn::io {

/// Writes to "<path>.tmp" and renames over `path`. DataError naming the path
/// on failure. Parent directories are created.
void write_file_atomic(const std::filesystem::path &path, std::string_view content);

/// DataError naming the path when the file is missing or unreadable.
std::string read_file(const std::filesystem::path &path);

/// DataError on parse failure.
nlohmann::json read_json(const std::filesystem::path &path);

/// Two-space indented JSON with a trailing newline.
std::string dump_json(const nlohmann::json &doc);

/// "%.17g": round-trips every double.
std::string format_double(double v);

/**
 * Supervised-set container, all integers and doubles little-endian:
 *
 *   "PHNSET\0\0"            8 bytes
 *   version                 u32 (1)
 *   config length           u32
 *   config JSON             UTF-8, that many bytes
 *   rows                    u64
 *   n_features, n_targets   u32, u32
 *   features                rows × n_features f64, row-major
 *   targets                 rows × n_targets f64, row-major
 */
inline constexpr std::uint32_t kSetVersion = 1;

std::string encode_set(const data::SupervisedSet &set, const nlohmann::json &config);

struct LoadedSet {
    data::SupervisedSet set;
    nlohmann::json config;
};

/// DataError for a bad magic, version, truncation or trailing bytes.
LoadedSet decode_set(std::string_view bytes, const std::string &source_name = "<buffer>");

void write_set(const std::filesystem::path &path, const data::SupervisedSet &set,
               const nlohmann::json &config);
LoadedSet read_set(const std::filesystem::path &path);

} // namespace phn::io
