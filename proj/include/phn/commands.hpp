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
 * @file commands.hpp
 * The four batch commands behind the `phn` executable. Each reads the resolved
 * configuration, writes its artifacts atomically under config.output_dir, and
 * prints a short summary. Errors surface as phn::Error subclasses; see
 * exit_code().
 *
 * Artifacts (all under output_dir):
 *   gen-data    data.csv
 *   preprocess  scaler.json, pca.json, train.bin, test.bin, preprocess_summary.json
 *   train       model_<v>.json, loss_<v>.csv, residuals_<v>.csv, summary_<v>.json
 *   analyze     fisher_ranks.csv, fisher_report.json, fisher_histogram_depth<N>.csv
 *               fourier_samples.json, fourier_summary.csv, fourier_summary.json
 */

#include <exception>
#include <iosfwd>
#include <string_view>

#include "phn/config.hpp"

namespace phn::cli {

void cmd_gen_data(const config::RunConfig &config, std::ostream &log);
void cmd_preprocess(const config::RunConfig &config, std::ostream &log);
void cmd_train(const config::RunConfig &config, std::ostream &log);
/// `which` is "fisher" or "fourier"; anything else is a ConfigError.
void cmd_analyze(const config::RunConfig &config, std::string_view which, std::ostream &log);

/// 1 for configuration problems (ConfigError, SpecError), 2 for everything
/// else raised while reading or processing data.
int exit_code(const std::exception &e);

} // namespace phn::cli
