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

#include "phn/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "phn/error.hpp"

namespace phn::config {

namespace {

using nlohmann::json;
using Setter = std::function<void(RunConfig &, const json &)>;

[[noreturn]] void type_error(const std::string &key, const char *expected) {
    throw ConfigError("config key '" + key + "' expects " + expected);
}

template <class T> T as_unsigned(const std::string &key, const json &v) {
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
        type_error(key, "a non-negative integer");
    }
    return static_cast<T>(v.get<std::uint64_t>());
}

int as_int(const std::string &key, const json &v) {
    if (!v.is_number_integer()) {
        type_error(key, "an integer");
    }
    return v.get<int>();
}

double as_double(const std::string &key, const json &v) {
    if (!v.is_number()) {
        type_error(key, "a number");
    }
    return v.get<double>();
}

std::string as_string(const std::string &key, const json &v) {
    if (!v.is_string()) {
        type_error(key, "a string");
    }
    return v.get<std::string>();
}

const std::map<std::string, Setter> &setters() {
    static const std::map<std::string, Setter> table = {
        {"data.source", [](RunConfig &c, const json &v) { c.data_source = as_string("data.source", v); }},
        {"data.sensor_indices",
         [](RunConfig &c, const json &v) {
             if (v.is_null()) {
                 c.sensor_indices.reset();
                 return;
             }
             if (!v.is_array() || v.size() != 2) {
                 type_error("data.sensor_indices", "an array of two channel indices");
             }
             c.sensor_indices = std::array<std::size_t, 2>{
                 as_unsigned<std::size_t>("data.sensor_indices", v[0]),
                 as_unsigned<std::size_t>("data.sensor_indices", v[1])};
         }},
        {"data.n_steps", [](RunConfig &c, const json &v) { c.data_n_steps = as_unsigned<std::size_t>("data.n_steps", v); }},
        {"data.n_base_channels",
         [](RunConfig &c, const json &v) {
             c.data_n_base_channels = as_unsigned<std::size_t>("data.n_base_channels", v);
         }},
        {"data.seed", [](RunConfig &c, const json &v) { c.data_seed = as_unsigned<std::uint64_t>("data.seed", v); }},
        {"preprocess.k", [](RunConfig &c, const json &v) { c.k = as_unsigned<std::size_t>("preprocess.k", v); }},
        {"preprocess.shift_steps",
         [](RunConfig &c, const json &v) { c.shift_steps = as_unsigned<std::size_t>("preprocess.shift_steps", v); }},
        {"preprocess.window_steps",
         [](RunConfig &c, const json &v) { c.window_steps = as_unsigned<std::size_t>("preprocess.window_steps", v); }},
        {"preprocess.train_fraction",
         [](RunConfig &c, const json &v) { c.train_fraction = as_double("preprocess.train_fraction", v); }},
        {"train.variant", [](RunConfig &c, const json &v) { c.variant = as_string("train.variant", v); }},
        {"train.epochs", [](RunConfig &c, const json &v) { c.epochs = as_int("train.epochs", v); }},
        {"train.lr_quantum", [](RunConfig &c, const json &v) { c.lr_quantum = as_double("train.lr_quantum", v); }},
        {"train.lr_classical",
         [](RunConfig &c, const json &v) { c.lr_classical = as_double("train.lr_classical", v); }},
        {"train.batch_size",
         [](RunConfig &c, const json &v) { c.batch_size = as_unsigned<std::size_t>("train.batch_size", v); }},
        {"train.seed", [](RunConfig &c, const json &v) { c.train_seed = as_unsigned<std::uint64_t>("train.seed", v); }},
        {"train.activation", [](RunConfig &c, const json &v) { c.activation = as_string("train.activation", v); }},
        {"analysis.depths",
         [](RunConfig &c, const json &v) {
             if (!v.is_array()) {
                 type_error("analysis.depths", "an array of integers");
             }
             c.depths.clear();
             for (const auto &d : v) {
                 c.depths.push_back(as_int("analysis.depths", d));
             }
         }},
        {"analysis.n_feature_samples",
         [](RunConfig &c, const json &v) {
             c.n_feature_samples = as_unsigned<std::size_t>("analysis.n_feature_samples", v);
         }},
        {"analysis.n_weight_realizations",
         [](RunConfig &c, const json &v) {
             c.n_weight_realizations = as_unsigned<std::size_t>("analysis.n_weight_realizations", v);
         }},
        {"analysis.gamma", [](RunConfig &c, const json &v) { c.gamma = as_double("analysis.gamma", v); }},
        {"analysis.n_data", [](RunConfig &c, const json &v) { c.n_data = as_double("analysis.n_data", v); }},
        {"analysis.fourier_samples",
         [](RunConfig &c, const json &v) {
             c.fourier_samples = as_unsigned<std::size_t>("analysis.fourier_samples", v);
         }},
        {"analysis.fourier_grid",
         [](RunConfig &c, const json &v) { c.fourier_grid = as_int("analysis.fourier_grid", v); }},
        {"analysis.near_zero_threshold",
         [](RunConfig &c, const json &v) {
             c.near_zero_threshold = as_double("analysis.near_zero_threshold", v);
         }},
        {"analysis.seed",
         [](RunConfig &c, const json &v) { c.analysis_seed = as_unsigned<std::uint64_t>("analysis.seed", v); }},
        {"output.dir", [](RunConfig &c, const json &v) { c.output_dir = as_string("output.dir", v); }},
    };
    return table;
}

} // namespace

RunConfig from_json(const json &doc) {
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object of dotted keys");
    }
    RunConfig config;
    for (const auto &[key, value] : doc.items()) {
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
        it->second(config, value);
    }
    return config;
}

RunConfig load(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return from_json(json::parse(ss.str()));
    } catch (const json::parse_error &e) {
        throw ConfigError(path.string() + ": invalid JSON: " + e.what());
    }
}

json to_json(const RunConfig &c) {
    json doc = json::object();
    doc["data.source"] = c.data_source;
    doc["data.sensor_indices"] =
        c.sensor_indices ? json::array({(*c.sensor_indices)[0], (*c.sensor_indices)[1]}) : json();
    doc["data.n_steps"] = c.data_n_steps;
    doc["data.n_base_channels"] = c.data_n_base_channels;
    doc["data.seed"] = c.data_seed;
    doc["preprocess.k"] = c.k;
    doc["preprocess.shift_steps"] = c.shift_steps;
    doc["preprocess.window_steps"] = c.window_steps;
    doc["preprocess.train_fraction"] = c.train_fraction;
    doc["train.variant"] = c.variant;
    doc["train.epochs"] = c.epochs;
    doc["train.lr_quantum"] = c.lr_quantum;
    doc["train.lr_classical"] = c.lr_classical;
    doc["train.batch_size"] = c.batch_size;
    doc["train.seed"] = c.train_seed;
    doc["train.activation"] = c.activation;
    doc["analysis.depths"] = c.depths;
    doc["analysis.n_feature_samples"] = c.n_feature_samples;
    doc["analysis.n_weight_realizations"] = c.n_weight_realizations;
    doc["analysis.gamma"] = c.gamma;
    doc["analysis.n_data"] = c.n_data;
    doc["analysis.fourier_samples"] = c.fourier_samples;
    doc["analysis.fourier_grid"] = c.fourier_grid;
    doc["analysis.near_zero_threshold"] = c.near_zero_threshold;
    doc["analysis.seed"] = c.analysis_seed;
    doc["output.dir"] = c.output_dir;
    return doc;
}

void override_seed(RunConfig &config, std::uint64_t seed) {
    config.data_seed = seed;
    config.train_seed = seed;
    config.analysis_seed = seed;
}

std::vector<std::string> known_keys() {
    std::vector<std::string> keys;
    for (const auto &[k, _] : setters()) {
        keys.push_back(k);
    }
    return keys;
}

} // namespace phn::config
