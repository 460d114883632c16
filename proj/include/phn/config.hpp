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

/**
 * @file config.hpp
 * Run configuration: a flat JSON object whose keys are dotted names such as
 * "train.epochs". Absent keys take defaults, unknown keys are rejected, and
 * the resolved configuration is echoed into every output artifact.
 */

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace phn::config {

inline constexpr int kFormatVersion = 1;

struct RunConfig {
    // data
    std::string data_source = "synth"; // "synth" or a CSV path
    std::optional<std::array<std::size_t, 2>> sensor_indices;
    std::size_t data_n_steps = 6500;
    std::size_t data_n_base_channels = 64;
    std::uint64_t data_seed = 0;

    // preprocess
    std::size_t k = 5;
    std::size_t shift_steps = 15;
    std::size_t window_steps = 10;
    double train_fraction = 0.8;

    // train
    std::string variant = "hybrid";
    int epochs = 100;
    double lr_quantum = 0.05;
    double lr_classical = 0.005;
    std::size_t batch_size = 32;
    std::uint64_t train_seed = 0;
    std::string activation = "tanh";

    // analysis
    std::vector<int> depths{1, 2, 3};
    std::size_t n_feature_samples = 1000;
    std::size_t n_weight_realizations = 100;
    double gamma = 1.0;
    double n_data = 4000.0;
    std::size_t fourier_samples = 1000;
    int fourier_grid = 8;
    double near_zero_threshold = 0.5;
    std::uint64_t analysis_seed = 0;

    // output
    std::string output_dir = "out";
};

/// ConfigError for unknown keys, wrong value types, or a non-object document.
RunConfig from_json(const nlohmann::json &doc);
/// ConfigError when the file is missing or not valid JSON.
RunConfig load(const std::filesystem::path &path);

/// Every key, defaults included. sensor_indices is null when unset.
nlohmann::json to_json(const RunConfig &config);

/// --seed: replaces data, train and analysis seeds.
void override_seed(RunConfig &config, std::uint64_t seed);

/// The sorted list of accepted keys.
std::vector<std::string> known_keys();

} // namespace phn::config
