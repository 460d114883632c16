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

// Runs the phn executable end to end in scratch directories.

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sys/wait.h>

#include "doctest.h"
#include "phn/io.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string &args, const fs::path &log) {
    const std::string cmd = std::string(PHN_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json small_config(const fs::path &out) {
    return json{{"data.sensor_indices", {0, 1}},
                {"data.n_steps", 400},
                {"data.n_base_channels", 8},
                {"train.epochs", 2},
                {"train.variant", "hybrid"},
                {"analysis.depths", {1, 2}},
                {"analysis.n_feature_samples", 30},
                {"analysis.n_weight_realizations", 3},
                {"analysis.fourier_samples", 12},
                {"output.dir", out.string()}};
}

fs::path write_config(const fs::path &dir, const std::string &name, const json &cfg) {
    const auto path = dir / name;
    phn::io::write_file_atomic(path, cfg.dump());
    return path;
}

std::map<std::string, std::string> snapshot(const fs::path &dir) {
    std::map<std::string, std::string> files;
    for (const auto &e : fs::directory_iterator(dir)) {
        if (e.is_regular_file()) {
            files[e.path().filename().string()] = phn::io::read_file(e.path());
        }
    }
    return files;
}

} // namespace

TEST_CASE("full chain with small settings, byte-identical rerun") {
    const auto dir = phn::testing::scratch_dir("cli");
    const auto out = dir / "out";
    const auto cfg = write_config(dir, "run.json", small_config(out));
    const auto log = dir / "log.txt";
    const std::string c = " --config " + cfg.string();

    const char *steps[] = {"gen-data", "preprocess", "train", "analyze fisher", "analyze fourier"};
    for (const char *step : steps) {
        INFO(step << ": " << phn::io::read_file(log));
        CHECK(run(std::string(step) + c, log) == 0);
    }
    for (const char *name :
         {"data.csv", "scaler.json", "pca.json", "train.bin", "test.bin", "preprocess_summary.json",
          "model_hybrid.json", "loss_hybrid.csv", "residuals_hybrid.csv", "summary_hybrid.json",
          "fisher_ranks.csv", "fisher_report.json", "fisher_histogram_depth1.csv",
          "fisher_histogram_depth2.csv", "fourier_samples.json", "fourier_summary.csv",
          "fourier_summary.json"}) {
        CHECK_MESSAGE(fs::exists(out / name), name);
    }
    const auto summary = phn::io::read_json(out / "summary_hybrid.json");
    CHECK(summary.contains("config"));
    const auto loss = phn::io::read_file(out / "loss_hybrid.csv");
    // Two '#' lines, the column header, then epochs 0..2.
    CHECK(std::count(loss.begin(), loss.end(), '\n') == 2 + 1 + 3);
    CHECK(loss.find("\n2,") != std::string::npos);

    const auto first = snapshot(out);
    for (const char *step : steps) {
        CHECK(run(std::string(step) + c, log) == 0);
    }
    const auto second = snapshot(out);
    CHECK(first.size() == second.size());
    for (const auto &[name, bytes] : first) {
        CHECK_MESSAGE(second.at(name) == bytes, name);
    }

    // --seed changes the data; --output redirects.
    CHECK(run("gen-data" + c + " --seed 5 --output " + (dir / "other").string(), log) == 0);
    CHECK(phn::io::read_file(dir / "other" / "data.csv") != first.at("data.csv"));

    // Each variant writes its own artifacts next to the others.
    auto classical = small_config(out);
    classical["train.variant"] = "classical";
    CHECK(run("train --config " + write_config(dir, "c.json", classical).string(), log) == 0);
    CHECK(fs::exists(out / "model_classical.json"));
    CHECK(phn::io::read_file(out / "model_hybrid.json") == first.at("model_hybrid.json"));
    fs::remove_all(dir);
}

TEST_CASE("exit codes") {
    const auto dir = phn::testing::scratch_dir("cli_exit");
    const auto out = dir / "out";
    const auto log = dir / "log.txt";
    auto with = [&](const char *key, const json &value) {
        auto cfg = small_config(out);
        if (value.is_null()) {
            cfg.erase(key);
        } else {
            cfg[key] = value;
        }
        return " --config " + write_config(dir, "c.json", cfg).string();
    };

    SUBCASE("configuration errors exit 1") {
        CHECK(run("gen-data" + with("train.epochz", 3), log) == 1);
        CHECK(phn::io::read_file(log).find("train.epochz") != std::string::npos);
        CHECK(run("gen-data" + with("data.n_steps", 50), log) == 1);
        CHECK(run("gen-data" + with("train.epochs", "ten"), log) == 1);
        CHECK(run("gen-data --config " + (dir / "missing.json").string(), log) == 1);
        CHECK(run("gen-data --bogus-flag", log) == 1);
        CHECK(run("", log) == 1);
        CHECK(run("analyze" + with("train.epochs", 1), log) == 1);

        REQUIRE(run("gen-data" + with("train.epochs", 1), log) == 0);
        CHECK(run("preprocess" + with("data.sensor_indices", nullptr), log) == 1);
        CHECK(phn::io::read_file(log).find("sensor_indices") != std::string::npos);
        REQUIRE(run("preprocess" + with("train.epochs", 1), log) == 0);
        CHECK(run("train" + with("train.variant", "quantum-only"), log) == 1);
        CHECK(run("analyze spectral" + with("train.epochs", 1), log) == 1);
        CHECK(run("analyze fourier" + with("analysis.fourier_grid", 2), log) == 1);
    }
    SUBCASE("data errors exit 2") {
        CHECK(run("train" + with("train.epochs", 1), log) == 2);
        CHECK(phn::io::read_file(log).find("preprocess") != std::string::npos);
        CHECK(run("preprocess" + with("train.epochs", 1), log) == 2);
        CHECK(phn::io::read_file(log).find("gen-data") != std::string::npos);

        phn::io::write_file_atomic(dir / "bad.csv", "timestamp,a,b,c\n0,1,2,3\n1,1,x,3\n");
        CHECK(run("preprocess" + with("data.source", (dir / "bad.csv").string()), log) == 2);
        CHECK(phn::io::read_file(log).find("line 3") != std::string::npos);

        REQUIRE(run("gen-data" + with("train.epochs", 1), log) == 0);
        REQUIRE(run("preprocess" + with("train.epochs", 1), log) == 0);
        phn::io::write_file_atomic(out / "train.bin", "PHNSET");
        CHECK(run("train" + with("train.epochs", 1), log) == 2);
    }
    SUBCASE("help exits 0") {
        CHECK(run("--help", log) == 0);
    }
    fs::remove_all(dir);
}
