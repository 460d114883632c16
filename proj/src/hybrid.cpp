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

#include "phn/hybrid.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "phn/error.hpp"

namespace phn::hybrid {

namespace {

// Samples per reduction chunk. Fixed so sums do not depend on thread count.
constexpr std::size_t kChunk = 16;
constexpr double kResidualFloor = 1e-6;
// Mixed into the seed for the PQC angle stream.
constexpr std::uint64_t kPqcStream = 0x9e3779b97f4a7c15ULL;

void check_input(std::span<const double> x) {
    if (x.size() != 5) {
        throw ShapeError("model input has " + std::to_string(x.size()) + " entries, expected 5");
    }
}

void add_into(std::vector<double> &dst, const std::vector<double> &src) {
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] += src[i];
    }
}

} // namespace

std::string_view to_string(Variant v) {
    switch (v) {
    case Variant::classical:
        return "classical";
    case Variant::quantum:
        return "quantum";
    case Variant::hybrid:
        return "hybrid";
    }
    return "?";
}

Variant variant_from_string(std::string_view name) {
    if (name == "classical") {
        return Variant::classical;
    }
    if (name == "quantum") {
        return Variant::quantum;
    }
    if (name == "hybrid") {
        return Variant::hybrid;
    }
    throw ConfigError("unknown variant '" + std::string(name) +
                      "' (expected one of: classical, quantum, hybrid)");
}

const circuits::AnsatzSpec &production_ansatz() {
    static const circuits::AnsatzSpec spec = circuits::build_production_ansatz();
    return spec;
}

PhnModel init_model(Variant variant, std::uint64_t seed, nn::Activation activation) {
    PhnModel model{variant, nn::DenseNet::init(seed, activation), {}};
    std::mt19937_64 rng(seed ^ kPqcStream);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (auto &p : model.pqc) {
        p.resize(static_cast<std::size_t>(production_ansatz().n_params()));
        for (auto &v : p) {
            v = angle(rng);
        }
    }
    return model;
}

std::array<double, kOutputs> phn_forward(const PhnModel &model, std::span<const double> x) {
    check_input(x);
    std::array<double, kOutputs> y{};
    if (model.uses_net()) {
        const auto out = model.net.forward(x);
        y = {out[0], out[1]};
    }
    if (model.uses_pqc()) {
        for (int k = 0; k < kOutputs; ++k) {
            y[k] += circuits::evaluate(production_ansatz(), model.pqc[k], x);
        }
    }
    return y;
}

Matrix predict(const PhnModel &model, const Matrix &x, Exec exec) {
    Matrix out(x.rows(), kOutputs);
    for_each_index(exec, x.rows(), [&](std::size_t i) {
        const auto y = phn_forward(model, x.row(i));
        out(i, 0) = y[0];
        out(i, 1) = y[1];
    });
    return out;
}

double mse_loss(const Matrix &pred, const Matrix &truth) {
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
        throw ShapeError("prediction and truth shapes differ");
    }
    if (pred.empty()) {
        throw ShapeError("mse of an empty matrix");
    }
    double s = 0.0;
    const auto p = pred.data();
    const auto t = truth.data();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - t[i];
        s += d * d;
    }
    return s / static_cast<double>(p.size());
}

Adam::Adam(std::size_t n_params, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n_params, 0.0), v_(n_params, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size()) {
        throw ShapeError("Adam step size mismatch");
    }
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
    }
}

Gradient batch_gradient(const PhnModel &model, const Matrix &x, const Matrix &y,
                        std::size_t first, std::size_t count, Exec exec) {
    if (x.rows() != y.rows() || y.cols() != kOutputs) {
        throw ShapeError("batch features and targets disagree");
    }
    if (count == 0 || first + count > x.rows()) {
        throw ShapeError("batch range out of bounds");
    }
    const auto &spec = production_ansatz();
    const auto n_q = static_cast<std::size_t>(spec.n_params());
    const double scale = 2.0 / static_cast<double>(count * kOutputs);

    auto empty_gradient = [&] {
        Gradient g;
        g.net.assign(model.uses_net() ? model.net.n_params() : 0, 0.0);
        for (auto &p : g.pqc) {
            p.assign(model.uses_pqc() ? n_q : 0, 0.0);
        }
        return g;
    };

    const std::size_t n_chunks = (count + kChunk - 1) / kChunk;
    std::vector<Gradient> partial(n_chunks);
    for_each_index(exec, n_chunks, [&](std::size_t c) {
        Gradient g = empty_gradient();
        std::vector<double> qgrad(n_q);
        const std::size_t lo = first + c * kChunk;
        const std::size_t hi = std::min(first + count, lo + kChunk);
        for (std::size_t i = lo; i < hi; ++i) {
            const auto xi = x.row(i);
            check_input(xi);
            std::array<double, kOutputs> q{};
            std::array<std::vector<double>, kOutputs> qg;
            if (model.uses_pqc()) {
                for (int k = 0; k < kOutputs; ++k) {
                    q[k] = circuits::evaluate_with_gradient(spec, model.pqc[k], xi, qgrad);
                    qg[k] = qgrad;
                }
            }
            std::array<double, kOutputs> pred = q;
            if (model.uses_net()) {
                const auto out = model.net.forward(xi);
                pred[0] += out[0];
                pred[1] += out[1];
            }
            std::array<double, kOutputs> dy{};
            for (int k = 0; k < kOutputs; ++k) {
                const double d = pred[k] - y(i, static_cast<std::size_t>(k));
                g.loss += d * d;
                dy[k] = scale * d;
            }
            if (model.uses_net()) {
                model.net.accumulate_gradient(xi, dy, g.net);
            }
            if (model.uses_pqc()) {
                for (int k = 0; k < kOutputs; ++k) {
                    for (std::size_t j = 0; j < n_q; ++j) {
                        g.pqc[k][j] += dy[k] * qg[k][j];
                    }
                }
            }
        }
        partial[c] = std::move(g);
    });

    Gradient total = empty_gradient();
    for (const auto &g : partial) {
        total.loss += g.loss;
        add_into(total.net, g.net);
        for (int k = 0; k < kOutputs; ++k) {
            add_into(total.pqc[k], g.pqc[k]);
        }
    }
    total.loss /= static_cast<double>(count * kOutputs);
    return total;
}

void validate(const TrainConfig &config) {
    if (config.epochs < 0) {
        throw ConfigError("train.epochs must be >= 0");
    }
    if (!(config.lr_quantum >= 0.0) || !(config.lr_classical >= 0.0) ||
        !std::isfinite(config.lr_quantum) || !std::isfinite(config.lr_classical)) {
        throw ConfigError("learning rates must be finite and non-negative");
    }
}

ResidualReport evaluate(const PhnModel &model, const data::SupervisedSet &set, Exec exec) {
    if (set.size() == 0) {
        throw ConfigError("cannot evaluate on an empty set");
    }
    ResidualReport r;
    r.predictions = predict(model, set.x, exec);
    r.relative = Matrix(set.size(), kOutputs);
    double sum_abs = 0.0;
    std::array<double, kOutputs> sq{};
    for (std::size_t i = 0; i < set.size(); ++i) {
        for (std::size_t k = 0; k < kOutputs; ++k) {
            const double truth = set.y(i, k);
            const double diff = r.predictions(i, k) - truth;
            const double rel = diff / std::max(std::abs(truth), kResidualFloor);
            r.relative(i, k) = rel;
            sum_abs += std::abs(rel);
            r.max_abs = std::max(r.max_abs, std::abs(rel));
            sq[k] += diff * diff;
        }
    }
    const auto n = static_cast<double>(set.size());
    r.mean_abs = sum_abs / (n * kOutputs);
    for (std::size_t k = 0; k < kOutputs; ++k) {
        r.mse_per_sensor[k] = sq[k] / n;
    }
    r.mse = (sq[0] + sq[1]) / (n * kOutputs);
    return r;
}

TrainResult train(const data::SupervisedSet &train_set, const data::SupervisedSet &test_set,
                  Variant variant, const TrainConfig &config) {
    return train(init_model(variant, config.seed, config.activation), train_set, test_set,
                 config);
}

TrainResult train(PhnModel model, const data::SupervisedSet &train_set,
                  const data::SupervisedSet &test_set, const TrainConfig &config) {
    validate(config);
    if (train_set.size() == 0 || test_set.size() == 0) {
        throw ConfigError("training needs non-empty train and test sets");
    }
    const auto start = std::chrono::steady_clock::now();
    TrainReport report;
    auto record = [&] {
        report.train_mse.push_back(mse_loss(predict(model, train_set.x, config.exec), train_set.y));
        report.test_mse.push_back(mse_loss(predict(model, test_set.x, config.exec), test_set.y));
    };
    record();

    Adam opt_net(model.net.n_params(), config.lr_classical);
    std::array<Adam, kOutputs> opt_pqc{Adam(model.pqc[0].size(), config.lr_quantum),
                                       Adam(model.pqc[1].size(), config.lr_quantum)};
    const std::size_t n = train_set.size();
    const std::size_t batch = config.batch_size == 0 ? n : std::min(config.batch_size, n);
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        for (std::size_t first = 0, b = 0; first < n; first += batch, ++b) {
            const std::size_t count = std::min(batch, n - first);
            const auto g =
                batch_gradient(model, train_set.x, train_set.y, first, count, config.exec);
            if (!std::isfinite(g.loss)) {
                throw NumericError("loss became non-finite at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(b) +
                                   "; the learning rate is probably too high");
            }
            if (model.uses_net()) {
                opt_net.step(model.net.params(), g.net);
            }
            if (model.uses_pqc()) {
                for (int k = 0; k < kOutputs; ++k) {
                    opt_pqc[k].step(model.pqc[k], g.pqc[k]);
                }
            }
        }
        record();
        if (!std::isfinite(report.train_mse.back())) {
            throw NumericError("training MSE became non-finite after epoch " +
                               std::to_string(epoch) + "; the learning rate is probably too high");
        }
    }
    report.residuals = evaluate(model, test_set, config.exec);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(model), std::move(report)};
}

nlohmann::json to_json(const PhnModel &model) {
    return {{"format", "phn-model"},
            {"version", 1},
            {"variant", to_string(model.variant)},
            {"net", nn::to_json(model.net)},
            {"pqc", {model.pqc[0], model.pqc[1]}},
            {"ansatz", circuits::to_json(production_ansatz())}};
}

PhnModel model_from_json(const nlohmann::json &doc) {
    try {
        if (doc.value("format", std::string{}) != "phn-model") {
            throw DataError("not a phn-model checkpoint");
        }
        PhnModel model;
        try {
            model.variant = variant_from_string(doc.at("variant").get<std::string>());
        } catch (const ConfigError &e) {
            throw DataError(std::string("checkpoint: ") + e.what());
        }
        model.net = nn::dense_net_from_json(doc.at("net"));
        const auto pqc = doc.at("pqc").get<std::vector<std::vector<double>>>();
        const auto n_q = static_cast<std::size_t>(production_ansatz().n_params());
        if (pqc.size() != kOutputs || pqc[0].size() != n_q || pqc[1].size() != n_q) {
            throw DataError("checkpoint pqc must hold two vectors of " + std::to_string(n_q) +
                            " angles");
        }
        model.pqc = {pqc[0], pqc[1]};
        if (model.net.n_inputs() != 5 || model.net.n_outputs() != kOutputs) {
            throw DataError("checkpoint network must map 5 inputs to 2 outputs");
        }
        return model;
    } catch (const nlohmann::json::exception &e) {
        throw DataError(std::string("malformed model checkpoint: ") + e.what());
    }
}

} // namespace phn::hybrid
