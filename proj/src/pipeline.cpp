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

#include "phn/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "phn/error.hpp"
#include "phn/linalg.hpp"

namespace phn::data {

namespace {

std::vector<std::string> split_fields(const std::string &line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_double(const std::string &text, double &value) {
    const char *begin = text.data();
    const char *end = begin + text.size();
    if (begin != end && *begin == '+') {
        ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc{} && ptr == end && std::isfinite(value);
}

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
    std::int64_t year;
    unsigned month;
    unsigned day;
};

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {y + (m <= 2), m, d};
}

std::string iso_minute(std::int64_t epoch_minutes) {
    const std::int64_t days = epoch_minutes / 1440;
    const std::int64_t minute_of_day = epoch_minutes % 1440;
    const auto date = civil_from_days(days);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:00",
                  static_cast<long long>(date.year), date.month, date.day,
                  static_cast<long long>(minute_of_day / 60),
                  static_cast<long long>(minute_of_day % 60));
    return buf;
}

void require_cols(const Matrix &m, std::size_t cols, const char *what) {
    if (m.cols() != cols) {
        throw ShapeError(std::string(what) + ": expected " + std::to_string(cols) +
                         " columns, got " + std::to_string(m.cols()));
    }
}

} // namespace

std::int64_t parse_timestamp(const std::string &text) {
    std::int64_t as_int = 0;
    {
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), as_int);
        if (ec == std::errc{} && ptr == text.data() + text.size()) {
            return as_int;
        }
    }
    int y = 0;
    unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char sep = 0;
    int consumed = 0;
    const int fields = std::sscanf(text.c_str(), "%4d-%2u-%2u%c%2u:%2u%n", &y, &mo, &d, &sep, &h,
                                   &mi, &consumed);
    if (fields < 6 || (sep != 'T' && sep != ' ') || mo < 1 || mo > 12 || d < 1 || d > 31 ||
        h > 23 || mi > 59) {
        throw DataError("unrecognised timestamp '" + text + "'");
    }
    std::string rest = text.substr(static_cast<std::size_t>(consumed));
    if (!rest.empty() && rest.front() == ':') {
        int more = 0;
        if (std::sscanf(rest.c_str(), ":%2u%n", &s, &more) != 1 || s > 60) {
            throw DataError("unrecognised timestamp '" + text + "'");
        }
        rest = rest.substr(static_cast<std::size_t>(more));
    }
    if (!(rest.empty() || rest == "Z")) {
        throw DataError("unrecognised timestamp '" + text + "'");
    }
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

TimeSeriesFrame parse_csv(std::istream &in, const std::string &source_name) {
    TimeSeriesFrame frame;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<double> values;
    std::int64_t previous = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto fields = split_fields(line);
        if (!have_header) {
            if (fields.size() < 2) {
                throw DataError(source_name + ": header needs a timestamp and at least one channel");
            }
            for (std::size_t c = 1; c < fields.size(); ++c) {
                frame.channel_names.push_back(trim(fields[c]));
            }
            have_header = true;
            continue;
        }
        const std::size_t expected = frame.channel_names.size() + 1;
        if (fields.size() != expected) {
            throw DataError(source_name + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(expected));
        }
        const std::string stamp = trim(fields[0]);
        std::int64_t key = 0;
        try {
            key = parse_timestamp(stamp);
        } catch (const DataError &e) {
            throw DataError(source_name + ": line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!frame.timestamps.empty() && key <= previous) {
            throw DataError(source_name + ": line " + std::to_string(line_no) + ": timestamp '" +
                            stamp + "' is not after the previous row (timestamps must be strictly "
                                    "increasing)");
        }
        previous = key;
        frame.timestamps.push_back(stamp);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            double v = 0.0;
            if (!parse_double(trim(fields[c]), v)) {
                throw DataError(source_name + ": line " + std::to_string(line_no) + ", column '" +
                                frame.channel_names[c - 1] + "': non-numeric value '" + fields[c] +
                                "'");
            }
            values.push_back(v);
        }
    }
    if (!have_header) {
        throw DataError(source_name + ": no header row");
    }
    frame.values = Matrix(frame.timestamps.size(), frame.channel_names.size());
    std::copy(values.begin(), values.end(), frame.values.data().begin());
    return frame;
}

TimeSeriesFrame load_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return parse_csv(in, path.string());
}

void write_csv(const TimeSeriesFrame &frame, std::ostream &out) {
    out << "timestamp";
    for (const auto &name : frame.channel_names) {
        out << ',' << name;
    }
    out << '\n';
    char buf[40];
    for (std::size_t t = 0; t < frame.n_steps(); ++t) {
        out << frame.timestamps[t];
        for (double v : frame.values.row(t)) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            out << buf;
        }
        out << '\n';
    }
}

TimeSeriesFrame synth_generate(const SynthConfig &config) {
    if (config.n_steps < 100) {
        throw SizeError("synthetic series needs at least 100 steps, got " +
                        std::to_string(config.n_steps));
    }
    if (config.n_base_channels < 1) {
        throw SizeError("synthetic series needs at least one base channel");
    }
    constexpr std::size_t kCycles = 5;
    constexpr std::size_t kMovingWindow = 10;
    constexpr double kArCoefficient = 0.9;
    constexpr double kArNoise = 0.15;
    constexpr double kSpikeRate = 0.004;
    constexpr double kSpikeDecay = 0.8;

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Plant-wide cycles shared by all channels (periods in minutes).
    std::array<double, kCycles> period{};
    for (auto &p : period) {
        p = 90.0 + 510.0 * unit(rng);
    }

    const std::size_t n = config.n_steps;
    const std::size_t nb = config.n_base_channels;
    TimeSeriesFrame frame;
    frame.values = Matrix(n, 3 * nb);
    frame.timestamps.reserve(n);
    // 2023-01-01T00:00 in minutes since the epoch.
    const std::int64_t start = days_from_civil(2023, 1, 1) * 1440;
    for (std::size_t t = 0; t < n; ++t) {
        frame.timestamps.push_back(iso_minute(start + static_cast<std::int64_t>(t)));
    }
    char name[32];
    for (const char *suffix : {"", "_d1", "_ma10"}) {
        for (std::size_t c = 0; c < nb; ++c) {
            std::snprintf(name, sizeof(name), "s%03zu%s", c, suffix);
            frame.channel_names.emplace_back(name);
        }
    }

    std::vector<double> base(n);
    for (std::size_t c = 0; c < nb; ++c) {
        const std::size_t n_terms = 2 + static_cast<std::size_t>(unit(rng) * 3.0) % 3;
        std::array<std::size_t, kCycles> order{0, 1, 2, 3, 4};
        std::shuffle(order.begin(), order.end(), rng);
        std::array<double, 4> amp{};
        std::array<double, 4> phase{};
        for (std::size_t k = 0; k < n_terms; ++k) {
            amp[k] = 0.5 + 1.5 * unit(rng);
            phase[k] = 2.0 * std::numbers::pi * unit(rng);
        }
        const double offset = -50.0 + 200.0 * unit(rng);
        const double scale = 0.5 + 19.5 * unit(rng);

        double ar = 0.0;
        double spike = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            double s = 0.0;
            for (std::size_t k = 0; k < n_terms; ++k) {
                s += amp[k] * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) /
                                           period[order[k]] +
                                       phase[k]);
            }
            ar = kArCoefficient * ar + kArNoise * gauss(rng);
            spike *= kSpikeDecay;
            if (unit(rng) < kSpikeRate) {
                spike += (unit(rng) < 0.5 ? -1.0 : 1.0) * (1.5 + 1.5 * unit(rng));
            }
            base[t] = offset + scale * (s + ar + spike);
        }

        double window_sum = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            frame.values(t, c) = base[t];
            frame.values(t, nb + c) = t == 0 ? 0.0 : base[t] - base[t - 1];
            window_sum += base[t];
            if (t >= kMovingWindow) {
                window_sum -= base[t - kMovingWindow];
            }
            const std::size_t count = std::min(t + 1, kMovingWindow);
            frame.values(t, 2 * nb + c) = window_sum / static_cast<double>(count);
        }
    }
    return frame;
}

TargetSet build_targets(const Matrix &channels, std::array<std::size_t, 2> sensors,
                        std::size_t shift_steps, std::size_t window_steps) {
    for (auto s : sensors) {
        if (s >= channels.cols()) {
            throw IndexError("sensor channel " + std::to_string(s) + " outside " +
                             std::to_string(channels.cols()) + " channels");
        }
    }
    if (window_steps < 1) {
        throw ConfigError("target window must cover at least one step");
    }
    const std::size_t horizon = shift_steps + window_steps - 1;
    if (channels.rows() <= horizon) {
        throw SizeError("series of " + std::to_string(channels.rows()) +
                        " steps is too short for shift " + std::to_string(shift_steps) +
                        " and window " + std::to_string(window_steps));
    }
    const std::size_t rows = channels.rows() - horizon;
    TargetSet out{channels.slice_rows(0, rows), Matrix(rows, 2)};
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t t = 0; t < rows; ++t) {
            double sum = 0.0;
            for (std::size_t w = 0; w < window_steps; ++w) {
                sum += channels(t + shift_steps + w, sensors[k]);
            }
            out.targets(t, k) = sum / static_cast<double>(window_steps);
        }
    }
    return out;
}

ScalerStats standardize_fit(const Matrix &train) {
    if (train.rows() == 0) {
        throw SizeError("cannot fit a scaler on zero rows");
    }
    const std::size_t n = train.rows();
    const std::size_t c = train.cols();
    ScalerStats stats{std::vector<double>(c, 0.0), std::vector<double>(c, 0.0),
                      std::vector<bool>(c, false)};
    for (std::size_t j = 0; j < c; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean += train(i, j);
        }
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = train(i, j) - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        const double sd = std::sqrt(var);
        stats.mean[j] = mean;
        // Relative test: a column that only varies at round-off level is constant.
        stats.constant[j] = !(sd > 1e-12 * std::max(1.0, std::abs(mean)));
        stats.std[j] = stats.constant[j] ? 1.0 : sd;
    }
    return stats;
}

Matrix standardize_apply(const Matrix &m, const ScalerStats &stats) {
    require_cols(m, stats.mean.size(), "standardize_apply");
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(i, j) = stats.constant[j] ? 0.0 : (m(i, j) - stats.mean[j]) / stats.std[j];
        }
    }
    return out;
}

Matrix destandardize(const Matrix &m, const ScalerStats &stats) {
    require_cols(m, stats.mean.size(), "destandardize");
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(i, j) = m(i, j) * stats.std[j] + stats.mean[j];
        }
    }
    return out;
}

PcaModel pca_fit(const Matrix &train, std::size_t k) {
    const std::size_t n = train.rows();
    const std::size_t c = train.cols();
    if (k < 1 || k > c) {
        throw ConfigError("PCA needs 1 <= k <= " + std::to_string(c) + " components, got " +
                          std::to_string(k));
    }
    if (n == 0) {
        throw SizeError("cannot fit PCA on zero rows");
    }
    PcaModel model;
    model.mean.assign(c, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            model.mean[j] += train(i, j);
        }
    }
    for (auto &m : model.mean) {
        m /= static_cast<double>(n);
    }
    Matrix cov(c, c);
    std::vector<double> centered(c);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            centered[j] = train(i, j) - model.mean[j];
        }
        for (std::size_t a = 0; a < c; ++a) {
            const double ca = centered[a];
            for (std::size_t b = a; b < c; ++b) {
                cov(a, b) += ca * centered[b];
            }
        }
    }
    for (std::size_t a = 0; a < c; ++a) {
        for (std::size_t b = a; b < c; ++b) {
            cov(a, b) /= static_cast<double>(n);
            cov(b, a) = cov(a, b);
        }
    }
    double trace = 0.0;
    for (std::size_t a = 0; a < c; ++a) {
        trace += cov(a, a);
    }

    const auto eig = linalg::jacobi_eigen(cov, 1e-10);
    model.jacobi_sweeps = eig.sweeps;
    model.components = Matrix(k, c);
    for (std::size_t r = 0; r < k; ++r) {
        // Sign convention: largest-magnitude loading positive.
        std::size_t arg = 0;
        for (std::size_t j = 1; j < c; ++j) {
            if (std::abs(eig.vectors(j, r)) > std::abs(eig.vectors(arg, r))) {
                arg = j;
            }
        }
        const double sign = eig.vectors(arg, r) < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < c; ++j) {
            model.components(r, j) = sign * eig.vectors(j, r);
        }
        model.eigenvalues.push_back(eig.values[r]);
        model.explained_variance_ratio.push_back(trace > 0.0 ? std::max(0.0, eig.values[r]) / trace
                                                             : 0.0);
    }
    return model;
}

Matrix pca_transform(const Matrix &m, const PcaModel &model) {
    require_cols(m, model.mean.size(), "pca_transform");
    const std::size_t k = model.components.rows();
    Matrix out(m.rows(), k);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t r = 0; r < k; ++r) {
            double s = 0.0;
            for (std::size_t j = 0; j < m.cols(); ++j) {
                s += (m(i, j) - model.mean[j]) * model.components(r, j);
            }
            out(i, r) = s;
        }
    }
    return out;
}

AngleScaler angle_scale_fit(const Matrix &train) {
    if (train.rows() == 0) {
        throw SizeError("cannot fit angle scaling on zero rows");
    }
    AngleScaler s{std::vector<double>(train.cols()), std::vector<double>(train.cols())};
    for (std::size_t j = 0; j < train.cols(); ++j) {
        s.min[j] = train(0, j);
        s.max[j] = train(0, j);
        for (std::size_t i = 1; i < train.rows(); ++i) {
            s.min[j] = std::min(s.min[j], train(i, j));
            s.max[j] = std::max(s.max[j], train(i, j));
        }
    }
    return s;
}

Matrix angle_scale_apply(const Matrix &m, const AngleScaler &scaler, std::size_t *clamped) {
    require_cols(m, scaler.min.size(), "angle_scale_apply");
    constexpr double pi = std::numbers::pi;
    Matrix out(m.rows(), m.cols());
    std::size_t count = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const double span = scaler.max[j] - scaler.min[j];
            double v = span > 0.0 ? -pi + 2.0 * pi * ((m(i, j) - scaler.min[j]) / span) : 0.0;
            if (v < -pi || v > pi) {
                v = std::clamp(v, -pi, pi);
                ++count;
            }
            out(i, j) = v;
        }
    }
    if (clamped != nullptr) {
        *clamped += count;
    }
    return out;
}

SplitSizes chronological_split(std::size_t n, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train fraction must lie in (0, 1)");
    }
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train >= n) {
        throw ConfigError("split of " + std::to_string(n) + " rows at fraction " +
                          std::to_string(train_fraction) + " leaves an empty side");
    }
    return {n_train, n - n_train};
}

PreprocessResult preprocess(const TimeSeriesFrame &frame, const PreprocessConfig &config) {
    const auto targets =
        build_targets(frame.values, config.sensors, config.shift_steps, config.window_steps);
    const auto sizes = chronological_split(targets.features.rows(), config.train_fraction);
    const Matrix train_raw = targets.features.slice_rows(0, sizes.n_train);
    const Matrix test_raw = targets.features.slice_rows(sizes.n_train, sizes.n_test);

    PreprocessResult out;
    out.feature_stats = standardize_fit(train_raw);
    const Matrix train_z = standardize_apply(train_raw, out.feature_stats);
    const Matrix test_z = standardize_apply(test_raw, out.feature_stats);

    out.pca = pca_fit(train_z, config.k);
    const Matrix train_pc = pca_transform(train_z, out.pca);
    const Matrix test_pc = pca_transform(test_z, out.pca);

    out.angles = angle_scale_fit(train_pc);
    out.train.x = angle_scale_apply(train_pc, out.angles, &out.train_clamped);
    out.test.x = angle_scale_apply(test_pc, out.angles, &out.test_clamped);

    const Matrix y_train = targets.targets.slice_rows(0, sizes.n_train);
    const Matrix y_test = targets.targets.slice_rows(sizes.n_train, sizes.n_test);
    out.target_stats = standardize_fit(y_train);
    out.train.y = standardize_apply(y_train, out.target_stats);
    out.test.y = standardize_apply(y_test, out.target_stats);
    return out;
}

} // namespace phn::data
