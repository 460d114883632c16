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
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace phn::nn {

enum class Activation { Tanh, Relu };

std::string_view to_string(Activation act);
Activation activation_from_string(std::string_view name);

/**
 * One-hidden-layer fully connected regressor, y = W2·σ(W1·x + b1) + b2.
 *
 * All weights live in one flat buffer so the optimizer can treat the network
 * as a single parameter group. Layout, in order:
 *   W1  n_hidden × n_inputs, row-major
 *   b1  n_hidden
 *   W2  n_outputs × n_hidden, row-major
 *   b2  n_outputs
 */
class DenseNet {
  public:
    DenseNet(int n_inputs = 5, int n_hidden = 256, int n_outputs = 2,
             Activation activation = Activation::Tanh);

    /// Glorot-uniform weights in ±sqrt(6 / (fan_in + fan_out)), zero biases.
    static DenseNet init(std::uint64_t seed, Activation activation = Activation::Tanh,
                         int n_inputs = 5, int n_hidden = 256, int n_outputs = 2);

    [[nodiscard]] int n_inputs() const { return n_in_; }
    [[nodiscard]] int n_hidden() const { return n_hidden_; }
    [[nodiscard]] int n_outputs() const { return n_out_; }
    [[nodiscard]] Activation activation() const { return activation_; }

    [[nodiscard]] std::size_t n_params() const { return params_.size(); }
    std::span<double> params() { return params_; }
    [[nodiscard]] std::span<const double> params() const { return params_; }

    std::span<double> w1() { return {params_.data() + w1_off(), w1_size()}; }
    std::span<double> b1() { return {params_.data() + b1_off(), b1_size()}; }
    std::span<double> w2() { return {params_.data() + w2_off(), w2_size()}; }
    std::span<double> b2() { return {params_.data() + b2_off(), b2_size()}; }
    [[nodiscard]] std::span<const double> w1() const { return {params_.data() + w1_off(), w1_size()}; }
    [[nodiscard]] std::span<const double> b1() const { return {params_.data() + b1_off(), b1_size()}; }
    [[nodiscard]] std::span<const double> w2() const { return {params_.data() + w2_off(), w2_size()}; }
    [[nodiscard]] std::span<const double> b2() const { return {params_.data() + b2_off(), b2_size()}; }

    /// NumericError on non-finite input, ShapeError on a wrong input length.
    [[nodiscard]] std::vector<double> forward(std::span<const double> x) const;

    /// Adds dL/dθ to `grad` (flat layout above) for an upstream gradient
    /// dL/dy, and returns the network output.
    std::vector<double> accumulate_gradient(std::span<const double> x,
                                            std::span<const double> dloss_dy,
                                            std::span<double> grad) const;

    friend bool operator==(const DenseNet &, const DenseNet &) = default;

  private:
    [[nodiscard]] std::size_t w1_off() const { return 0; }
    [[nodiscard]] std::size_t w1_size() const { return std::size_t(n_hidden_) * n_in_; }
    [[nodiscard]] std::size_t b1_off() const { return w1_size(); }
    [[nodiscard]] std::size_t b1_size() const { return std::size_t(n_hidden_); }
    [[nodiscard]] std::size_t w2_off() const { return b1_off() + b1_size(); }
    [[nodiscard]] std::size_t w2_size() const { return std::size_t(n_out_) * n_hidden_; }
    [[nodiscard]] std::size_t b2_off() const { return w2_off() + w2_size(); }
    [[nodiscard]] std::size_t b2_size() const { return std::size_t(n_out_); }

    void hidden_layer(std::span<const double> x, std::vector<double> &pre,
                      std::vector<double> &act) const;

    int n_in_;
    int n_hidden_;
    int n_out_;
    Activation activation_;
    std::vector<double> params_;
};

/// Gradient of the per-sample MSE (mean over outputs) with respect to every
/// weight and bias, flat layout.
std::vector<double> backward(const DenseNet &net, std::span<const double> x,
                             std::span<const double> y_true);

/// Checkpoint document: {"format": "phn-dense-net", "version": 1,
/// "layer_sizes": [in, hidden, out], "activation": "tanh", "w1": [...],
/// "b1": [...], "w2": [...], "b2": [...]}, matrices row-major.
nlohmann::json to_json(const DenseNet &net);
DenseNet dense_net_from_json(const nlohmann::json &doc);

} // namespace phn::nn
