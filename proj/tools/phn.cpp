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

// phn: batch entry point.
//
//   phn gen-data   --config run.json [--output DIR] [--seed N]
//   phn preprocess --config run.json ...
//   phn train      --config run.json ...
//   phn analyze fisher|fourier --config run.json ...
//
// Exit status: 0 ok, 1 configuration error, 2 data error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "phn/commands.hpp"
#include "phn/config.hpp"
#include "phn/error.hpp"

namespace {

struct Common {
    std::string config_path;
    std::string output;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App *cmd, Common &opts) {
    cmd->add_option("--config", opts.config_path, "JSON config with dotted keys");
    cmd->add_option("--output", opts.output, "output directory (overrides output.dir)");
    cmd->add_option("--seed", opts.seed, "seed for data, training and analysis (overrides config)");
}

phn::config::RunConfig resolve(const Common &opts) {
    auto cfg = opts.config_path.empty() ? phn::config::RunConfig{}
                                        : phn::config::load(opts.config_path);
    if (!opts.output.empty()) {
        cfg.output_dir = opts.output;
    }
    if (opts.seed) {
        phn::config::override_seed(cfg, *opts.seed);
    }
    return cfg;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Hybrid quantum-classical forecasting toolkit"};
    app.require_subcommand(1);
    Common opts;
    std::string which;

    auto *gen = app.add_subcommand("gen-data", "write a synthetic plant-like series to data.csv");
    auto *pre = app.add_subcommand("preprocess", "targets, scaling, PCA and the train/test split");
    auto *trn = app.add_subcommand("train", "train the classical, quantum or hybrid model");
    auto *ana = app.add_subcommand("analyze", "Fisher or Fourier diagnostics of the toy ansatz");
    for (auto *cmd : {gen, pre, trn, ana}) {
        add_common(cmd, opts);
    }
    ana->add_option("which", which, "fisher or fourier")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        const auto cfg = resolve(opts);
        if (gen->parsed()) {
            phn::cli::cmd_gen_data(cfg, std::cout);
        } else if (pre->parsed()) {
            phn::cli::cmd_preprocess(cfg, std::cout);
        } else if (trn->parsed()) {
            phn::cli::cmd_train(cfg, std::cout);
        } else {
            phn::cli::cmd_analyze(cfg, which, std::cout);
        }
    } catch (const phn::Error &e) {
        const int rc = phn::cli::exit_code(e);
        std::cerr << (rc == 1 ? "config error: " : "data error: ") << e.what() << '\n';
        return rc;
    } catch (const std::exception &e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
