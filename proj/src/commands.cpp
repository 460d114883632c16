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

#include "phn/commands.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "phn/analysis.hpp"
#include "phn/error.hpp"
#include "phn/hybrid.hpp"
#include "phn/io.hpp"
#include "phn/pipeline.hpp"

namespace phn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kHistogramBins = 40;

fs::path out_dir(const config::RunConfig &c) { return fs::path(c.output_dir); }

json envelope(const char *format, const config::RunConfig &c) {
    return {{"format", format}, {"version", config::kFormatVersion}, {"config", config::to_json(c)}};
}

// CSV preamble: format line and the resolved config as one JSON line.
std::string csv_header(const char *format, const config::RunConfig &c) {
    return std::string("# format: ") + format + " v" + std::to_string(config::kFormatVersion) +
           "\n# config: " + config::to_json(c).dump() + "\n";
}

json to_json(const data::ScalerStats &s) {
    std::vector<int> constant(s.constant.begin(), s.constant.end());
    return {{"n_columns", s.mean.size()}, {"mean", s.mean}, {"std", s.std}, {"constant", constant}};
}

json matrix_rows(const Matrix &m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
    }
    return rows;
}

data::TimeSeriesFrame load_source(const config::RunConfig &c) {
    if (c.data_source == "synth") {
        const fs::path path = out_dir(c) / "data.csv";
        if (!fs::exists(path)) {
            throw DataError(path.string() + " not found; run `phn gen-data` first or set "
                                            "data.source to a CSV path");
        }
        return data::load_csv(path);
    }
    return data::load_csv(c.data_source);
}

io::LoadedSet load_artifact_set(const fs::path &path) {
    if (!fs::exists(path)) {
        throw DataError(path.string() + " not found; run `phn preprocess` first");
    }
    return io::read_set(path);
}

hybrid::TrainConfig train_config(const config::RunConfig &c) {
    hybrid::TrainConfig t;
    t.epochs = c.epochs;
    t.lr_quantum = c.lr_quantum;
    t.lr_classical = c.lr_classical;
    t.batch_size = c.batch_size;
    t.seed = c.train_seed;
    t.activation = nn::activation_from_string(c.activation);
    hybrid::validate(t);
    return t;
}

void run_fisher(const config::RunConfig &c, std::ostream &log) {
    if (c.depths.empty()) {
        throw ConfigError("analysis.depths must list at least one depth");
    }
    for (int d : c.depths) {
        if (d < 1) {
            throw ConfigError("analysis.depths entry " + std::to_string(d) + " is not >= 1");
        }
    }
    analysis::FisherConfig fc;
    fc.n_feature_samples = c.n_feature_samples;
    fc.n_weight_realizations = c.n_weight_realizations;
    fc.near_zero = c.near_zero_threshold;
    fc.seed = c.analysis_seed;
    analysis::EffDimConfig ec{c.gamma, c.n_data};
    const auto study = analysis::average_fisher_study(c.depths, fc, ec);
    if (study.low_sample) {
        log << "warning: only " << c.n_weight_realizations
            << " weight realization(s); averages and spectra are low-sample estimates\n";
    }

    std::ostringstream table;
    table << csv_header("phn-fisher-ranks", c);
    table << "depth,n_params,average_rank,min_realization_rank,max_realization_rank,"
             "effective_dimension,near_zero_fraction,near_zero_fraction_relative\n";
    json depths = json::array();
    double hist_hi = 0.0;
    for (const auto &d : study.depths) {
        hist_hi = std::max(hist_hi, *std::max_element(d.eigenvalues.begin(), d.eigenvalues.end()));
    }
    hist_hi = std::max(hist_hi, 1.0);
    for (const auto &d : study.depths) {
        const auto [lo_rank, hi_rank] =
            std::minmax_element(d.realization_ranks.begin(), d.realization_ranks.end());
        table << d.depth << ',' << d.n_params << ',' << d.average_rank << ',' << *lo_rank << ','
              << *hi_rank << ',' << io::format_double(d.effective_dimension) << ','
              << io::format_double(d.near_zero_fraction) << ','
              << io::format_double(d.near_zero_fraction_relative) << '\n';
        depths.push_back({{"depth", d.depth},
                          {"n_params", d.n_params},
                          {"average_rank", d.average_rank},
                          {"realization_ranks", d.realization_ranks},
                          {"effective_dimension", d.effective_dimension},
                          {"near_zero_fraction", d.near_zero_fraction},
                          {"near_zero_fraction_relative", d.near_zero_fraction_relative},
                          {"min_eigenvalue", d.min_eigenvalue},
                          {"max_asymmetry", d.max_asymmetry},
                          {"average_fisher", matrix_rows(d.average)},
                          {"normalized_eigenvalues", d.eigenvalues}});

        const auto counts = analysis::histogram(d.eigenvalues, kHistogramBins, 0.0, hist_hi);
        std::ostringstream hist;
        hist << csv_header("phn-fisher-histogram", c);
        hist << "bin_lo,bin_hi,count,frequency\n";
        const double width = hist_hi / static_cast<double>(kHistogramBins);
        for (std::size_t b = 0; b < counts.size(); ++b) {
            hist << io::format_double(width * static_cast<double>(b)) << ','
                 << io::format_double(width * static_cast<double>(b + 1)) << ',' << counts[b] << ','
                 << io::format_double(static_cast<double>(counts[b]) /
                                      static_cast<double>(d.eigenvalues.size()))
                 << '\n';
        }
        io::write_file_atomic(out_dir(c) / ("fisher_histogram_depth" + std::to_string(d.depth) + ".csv"),
                              hist.str());
        char line[200];
        std::snprintf(line, sizeof(line),
                      "depth %d: P=%d rank(avg F)=%d d_eff=%.4f near-zero=%.1f%% (relative rule "
                      "%.1f%%)\n",
                      d.depth, d.n_params, d.average_rank, d.effective_dimension,
                      100.0 * d.near_zero_fraction, 100.0 * d.near_zero_fraction_relative);
        log << line;
    }
    io::write_file_atomic(out_dir(c) / "fisher_ranks.csv", table.str());

    json report = envelope("phn-fisher-report", c);
    report["kappa"] = study.kappa;
    report["low_sample"] = study.low_sample;
    report["near_zero_threshold"] = fc.near_zero;
    report["near_zero_relative_threshold"] = fc.near_zero_relative;
    report["rank_tolerance"] = fc.rank_tol;
    report["depths"] = depths;
    io::write_file_atomic(out_dir(c) / "fisher_report.json", io::dump_json(report));
}

void run_fourier(const config::RunConfig &c, std::ostream &log) {
    const auto spec = circuits::build_toy_ansatz(1);
    const auto cloud =
        analysis::fourier_cloud(spec, c.fourier_samples, c.analysis_seed, c.fourier_grid);

    json samples = json::array();
    for (const auto &t : cloud.samples) {
        json records = json::array();
        for (int l1 = -1; l1 <= 1; ++l1) {
            for (int l2 = -1; l2 <= 1; ++l2) {
                const auto v = t.at(l1, l2);
                records.push_back({{"l1", l1}, {"l2", l2}, {"re", v.real()}, {"im", v.imag()}});
            }
        }
        samples.push_back({{"coefficients", records}, {"leakage", t.leakage}});
    }
    json doc = envelope("phn-fourier-samples", c);
    doc["grid"] = c.fourier_grid;
    doc["samples"] = samples;
    io::write_file_atomic(out_dir(c) / "fourier_samples.json", io::dump_json(doc));

    std::ostringstream csv;
    csv << csv_header("phn-fourier-summary", c);
    csv << "l1,l2,max_abs,min_abs,q25_abs,median_abs,q75_abs,phase_spread,max_abs_imag\n";
    json summary = json::array();
    for (const auto &s : cloud.summary) {
        csv << s.l1 << ',' << s.l2 << ',' << io::format_double(s.max_abs) << ','
            << io::format_double(s.min_abs) << ',' << io::format_double(s.abs_quantiles[1]) << ','
            << io::format_double(s.abs_quantiles[2]) << ','
            << io::format_double(s.abs_quantiles[3]) << ',' << io::format_double(s.phase_spread)
            << ',' << io::format_double(s.max_abs_imag) << '\n';
        summary.push_back({{"l1", s.l1},
                           {"l2", s.l2},
                           {"max_abs", s.max_abs},
                           {"min_abs", s.min_abs},
                           {"abs_quantiles", s.abs_quantiles},
                           {"phase_spread", s.phase_spread},
                           {"max_abs_imag", s.max_abs_imag}});
    }
    io::write_file_atomic(out_dir(c) / "fourier_summary.csv", csv.str());
    json sdoc = envelope("phn-fourier-summary", c);
    sdoc["n_samples"] = c.fourier_samples;
    sdoc["grid"] = c.fourier_grid;
    sdoc["coefficients"] = summary;
    sdoc["max_leakage"] = cloud.max_leakage;
    sdoc["max_symmetry_error"] = cloud.max_symmetry_error;
    sdoc["max_abs"] = cloud.max_abs;
    io::write_file_atomic(out_dir(c) / "fourier_summary.json", io::dump_json(sdoc));

    char line[160];
    std::snprintf(line, sizeof(line),
                  "%zu samples, %zu clouds, max |c| = %.4f, leakage %.2e, symmetry error %.2e\n",
                  c.fourier_samples, cloud.summary.size(), cloud.max_abs, cloud.max_leakage,
                  cloud.max_symmetry_error);
    log << line;
}

} // namespace

void cmd_gen_data(const config::RunConfig &c, std::ostream &log) {
    if (c.data_n_steps < 100) {
        throw ConfigError("data.n_steps = " + std::to_string(c.data_n_steps) +
                          " is below the generator minimum of 100 steps");
    }
    if (c.data_n_base_channels < 1) {
        throw ConfigError("data.n_base_channels must be >= 1");
    }
    const auto frame = data::synth_generate({c.data_n_steps, c.data_n_base_channels, c.data_seed});
    std::ostringstream out;
    out << csv_header("phn-data-csv", c);
    data::write_csv(frame, out);
    const fs::path path = out_dir(c) / "data.csv";
    io::write_file_atomic(path, out.str());
    log << "wrote " << path.string() << " (" << frame.n_steps() << " rows x "
        << frame.n_channels() << " channels)\n";
}

void cmd_preprocess(const config::RunConfig &c, std::ostream &log) {
    if (!c.sensor_indices) {
        throw ConfigError("data.sensor_indices is required (two channel indices for the targets)");
    }
    data::PreprocessConfig pc;
    pc.sensors = *c.sensor_indices;
    pc.k = c.k;
    pc.shift_steps = c.shift_steps;
    pc.window_steps = c.window_steps;
    pc.train_fraction = c.train_fraction;
    if (!(pc.train_fraction > 0.0 && pc.train_fraction < 1.0)) {
        throw ConfigError("preprocess.train_fraction must lie in (0, 1)");
    }
    if (pc.window_steps < 1) {
        throw ConfigError("preprocess.window_steps must be >= 1");
    }
    const auto frame = load_source(c);
    if (pc.k < 1 || pc.k > frame.n_channels()) {
        throw ConfigError("preprocess.k = " + std::to_string(pc.k) + " must lie in [1, " +
                          std::to_string(frame.n_channels()) + "]");
    }
    for (auto s : pc.sensors) {
        if (s >= frame.n_channels()) {
            throw ConfigError("data.sensor_indices entry " + std::to_string(s) + " outside " +
                              std::to_string(frame.n_channels()) + " channels");
        }
    }
    const auto r = data::preprocess(frame, pc);

    json scaler = envelope("phn-scaler", c);
    scaler["features"] = to_json(r.feature_stats);
    scaler["targets"] = to_json(r.target_stats);
    scaler["angles"] = {{"n_columns", r.angles.min.size()}, {"min", r.angles.min}, {"max", r.angles.max}};
    io::write_file_atomic(out_dir(c) / "scaler.json", io::dump_json(scaler));

    json pca = envelope("phn-pca", c);
    pca["k"] = r.pca.components.rows();
    pca["n_channels"] = r.pca.components.cols();
    pca["mean"] = r.pca.mean;
    pca["components"] = matrix_rows(r.pca.components);
    pca["eigenvalues"] = r.pca.eigenvalues;
    pca["explained_variance_ratio"] = r.pca.explained_variance_ratio;
    pca["jacobi_sweeps"] = r.pca.jacobi_sweeps;
    io::write_file_atomic(out_dir(c) / "pca.json", io::dump_json(pca));

    const json cfg = config::to_json(c);
    io::write_set(out_dir(c) / "train.bin", r.train, cfg);
    io::write_set(out_dir(c) / "test.bin", r.test, cfg);

    double evr_total = 0.0;
    for (double v : r.pca.explained_variance_ratio) {
        evr_total += v;
    }
    json summary = envelope("phn-preprocess-summary", c);
    summary["n_train"] = r.train.size();
    summary["n_test"] = r.test.size();
    summary["train_clamped"] = r.train_clamped;
    summary["test_clamped"] = r.test_clamped;
    summary["explained_variance_ratio"] = r.pca.explained_variance_ratio;
    summary["explained_variance_total"] = evr_total;
    io::write_file_atomic(out_dir(c) / "preprocess_summary.json", io::dump_json(summary));

    log << "train rows " << r.train.size() << ", test rows " << r.test.size() << '\n';
    log << "explained variance ratio:";
    for (double v : r.pca.explained_variance_ratio) {
        log << ' ' << io::format_double(v);
    }
    log << " (total " << io::format_double(evr_total) << ")\n";
    log << "clamped angles: train " << r.train_clamped << ", test " << r.test_clamped << '\n';
}

void cmd_train(const config::RunConfig &c, std::ostream &log) {
    const auto variant = hybrid::variant_from_string(c.variant);
    const auto tc = train_config(c);
    const auto train_set = load_artifact_set(out_dir(c) / "train.bin");
    const auto test_set = load_artifact_set(out_dir(c) / "test.bin");
    if (train_set.set.x.cols() != 5 || test_set.set.x.cols() != 5 || train_set.set.y.cols() != 2 ||
        test_set.set.y.cols() != 2) {
        throw DataError("the model needs 5 features and 2 targets; rerun `phn preprocess` with "
                        "preprocess.k = 5");
    }
    const auto result = hybrid::train(train_set.set, test_set.set, variant, tc);
    const auto &rep = result.report;
    const std::string v(hybrid::to_string(variant));

    json model = hybrid::to_json(result.model);
    model["config"] = config::to_json(c);
    io::write_file_atomic(out_dir(c) / ("model_" + v + ".json"), io::dump_json(model));

    std::ostringstream loss;
    loss << csv_header("phn-loss-curve", c);
    loss << "epoch,train_mse,test_mse\n";
    for (std::size_t e = 0; e < rep.train_mse.size(); ++e) {
        loss << e << ',' << io::format_double(rep.train_mse[e]) << ','
             << io::format_double(rep.test_mse[e]) << '\n';
    }
    io::write_file_atomic(out_dir(c) / ("loss_" + v + ".csv"), loss.str());

    std::ostringstream res;
    res << csv_header("phn-residuals", c);
    res << "row,pred_0,pred_1,truth_0,truth_1,rel_0,rel_1\n";
    for (std::size_t i = 0; i < test_set.set.size(); ++i) {
        res << i << ',' << io::format_double(rep.residuals.predictions(i, 0)) << ','
            << io::format_double(rep.residuals.predictions(i, 1)) << ','
            << io::format_double(test_set.set.y(i, 0)) << ','
            << io::format_double(test_set.set.y(i, 1)) << ','
            << io::format_double(rep.residuals.relative(i, 0)) << ','
            << io::format_double(rep.residuals.relative(i, 1)) << '\n';
    }
    io::write_file_atomic(out_dir(c) / ("residuals_" + v + ".csv"), res.str());

    json summary = envelope("phn-train-summary", c);
    summary["variant"] = v;
    summary["epochs"] = c.epochs;
    summary["final_train_mse"] = rep.train_mse.back();
    summary["final_test_mse"] = rep.test_mse.back();
    summary["train_mse"] = rep.train_mse;
    summary["test_mse"] = rep.test_mse;
    summary["mean_abs_residual"] = rep.residuals.mean_abs;
    summary["max_abs_residual"] = rep.residuals.max_abs;
    summary["test_mse_per_sensor"] = rep.residuals.mse_per_sensor;
    io::write_file_atomic(out_dir(c) / ("summary_" + v + ".json"), io::dump_json(summary));

    char line[200];
    std::snprintf(line, sizeof(line),
                  "%s: train MSE %.6f -> %.6f, test MSE %.6f -> %.6f, mean |r| %.4f (%.1f s)\n",
                  v.c_str(), rep.train_mse.front(), rep.train_mse.back(), rep.test_mse.front(),
                  rep.test_mse.back(), rep.residuals.mean_abs, rep.wall_seconds);
    log << line;
}

void cmd_analyze(const config::RunConfig &c, std::string_view which, std::ostream &log) {
    if (which == "fisher") {
        run_fisher(c, log);
    } else if (which == "fourier") {
        run_fourier(c, log);
    } else {
        throw ConfigError("unknown analysis '" + std::string(which) +
                          "' (expected fisher or fourier)");
    }
}

int exit_code(const std::exception &e) {
    if (dynamic_cast<const ConfigError *>(&e) != nullptr ||
        dynamic_cast<const SpecError *>(&e) != nullptr) {
        return 1;
    }
    return 2;
}

} // namespace phn::cli
