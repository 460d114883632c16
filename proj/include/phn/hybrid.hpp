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
 * @file hybrid.hpp
 * Parallel hybrid network: a dense regressor and two copies of the 5-qubit
 * production circuit read the same 5 angles; the circuit outputs are added to
 * the two network outputs. Training uses Adam with separate learning rates for
 * the classical and quantum parameter groups.
 */

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "phn/circuits.hpp"
#include "phn/dense_net.hpp"
#include "phn/exec.hpp"
#include "phn/matrix.hpp"
#include "phn/pipeline.hpp"

namespace phn::hybrid {

enum class Variant { classical, quantum, hybrid };

std::string_view to_string(Variant v);
/// ConfigError naming the three accepted values.
Variant variant_from_string(std::string_view name);

/// Shared production circuit (built once).
const circuits::AnsatzSpec &production_ansatz();

inline constexpr int kOutputs = 2;

struct PhnModel {
    Variant variant = Variant::hybrid;
    nn::DenseNet net;
    /// One 20-angle parameter vector per output component.
    std::array<std::vector<double>, kOutputs> pqc;

    [[nodiscard]] bool uses_net() const { return variant != Variant::quantum; }
    [[nodiscard]] bool uses_pqc() const { return variant != Variant::classical; }

    friend bool operator==(const PhnModel &, const PhnModel &) = default;
};

/// Glorot net from `seed` and PQC angles uniform in [0, 2π) from a stream
/// derived from `seed`. The net does not depend on the variant, so the three
/// variants trained with one seed start from the same classical weights.
PhnModel init_model(Variant variant, std::uint64_t seed,
                    nn::Activation activation = nn::Activation::Tanh);

/// y = net(x) + [pqc1(x), pqc2(x)], dropping the unused part for the
/// classical and quantum variants. ShapeError unless x has 5 entries.
std::array<double, kOutputs> phn_forward(const PhnModel &model, std::span<const double> x);

/// n × 2 predictions, one row per input row.
Matrix predict(const PhnModel &model, const Matrix &x, Exec exec = Exec::parallel);

/// Mean of squared differences over all entries. ShapeError on mismatch.
double mse_loss(const Matrix &pred, const Matrix &truth);

class Adam {
  public:
    explicit Adam(std::size_t n_params, double lr, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8);

    void step(std::span<double> params, std::span<const double> grad);
    [[nodiscard]] long steps() const { return t_; }

  private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::vector<double> m_, v_;
};

struct Gradient {
    double loss = 0.0;
    std::vector<double> net;
    std::array<std::vector<double>, kOutputs> pqc;
};

/// Loss and gradient of the batch MSE over rows [first, first + count).
/// Samples are processed in fixed chunks that are reduced in index order, so
/// the result does not depend on `exec` or the thread count.
Gradient batch_gradient(const PhnModel &model, const Matrix &x, const Matrix &y,
                        std::size_t first, std::size_t count, Exec exec = Exec::parallel);

struct TrainConfig {
    int epochs = 100;
    double lr_quantum = 0.05;
    double lr_classical = 0.005;
    /// 0 means one full batch per epoch.
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    nn::Activation activation = nn::Activation::Tanh;
    Exec exec = Exec::parallel;
};

/// ConfigError for non-positive epochs count, negative learning rates, etc.
void validate(const TrainConfig &config);

struct ResidualReport {
    /// n × 2 relative errors (pred - truth) / max(|truth|, 1e-6).
    Matrix relative;
    Matrix predictions;
    double mean_abs = 0.0;
    double max_abs = 0.0;
    std::array<double, kOutputs> mse_per_sensor{};
    double mse = 0.0;
};

/// ConfigError on an empty set.
ResidualReport evaluate(const PhnModel &model, const data::SupervisedSet &set,
                        Exec exec = Exec::parallel);

struct TrainReport {
    /// Length epochs + 1; entry 0 is the untrained model.
    std::vector<double> train_mse;
    std::vector<double> test_mse;
    ResidualReport residuals;
    double wall_seconds = 0.0;
};

struct TrainResult {
    PhnModel model;
    TrainReport report;
};

/// Sequential chronological mini-batches, no shuffling. NumericError when the
/// loss turns non-finite.
TrainResult train(const data::SupervisedSet &train_set, const data::SupervisedSet &test_set,
                  Variant variant, const TrainConfig &config);

/// Same as above but continues from a given model.
TrainResult train(PhnModel model, const data::SupervisedSet &train_set,
                  const data::SupervisedSet &test_set, const TrainConfig &config);

/// {"format": "phn-model", "version": 1, "variant", "net": <dense net>,
///  "pqc": [[20 angles], [20 angles]], "ansatz": <ansatz document>}
nlohmann::json to_json(const PhnModel &model);
PhnModel model_from_json(const nlohmann::json &doc);

} // namespace phn::hybrid
