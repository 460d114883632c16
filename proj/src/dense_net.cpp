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

#include "phn/dense_net.hpp"

#include <cmath>
#include <random>
#include <string>

#include "phn/error.hpp"

namespace phn::nn {

std::string_view to_string(Activation act) {
    return act == Activation::Tanh ? "tanh" : "relu";
}

Activation activation_from_string(std::string_view name) {
    if (name == "tanh") {
        return Activation::Tanh;
    }
    if (name == "relu") {
        return Activation::Relu;
    }
    throw ConfigError("unknown activation '" + std::string(name) + "' (expected tanh or relu)");
}

DenseNet::DenseNet(int n_inputs, int n_hidden, int n_outputs, Activation activation)
    : n_in_(n_inputs), n_hidden_(n_hidden), n_out_(n_outputs), activation_(activation) {
    if (n_inputs < 1 || n_hidden < 1 || n_outputs < 1) {
        throw SizeError("layer sizes must be positive");
    }
    params_.assign(b2_off() + b2_size(), 0.0);
}

DenseNet DenseNet::init(std::uint64_t seed, Activation activation, int n_inputs, int n_hidden,
                        int n_outputs) {
    DenseNet net(n_inputs, n_hidden, n_outputs, activation);
    std::mt19937_64 rng(seed);
    auto fill = [&rng](std::span<double> w, int fan_in, int fan_out) {
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (auto &v : w) {
            v = dist(rng);
        }
    };
    fill(net.w1(), n_inputs, n_hidden);
    fill(net.w2(), n_hidden, n_outputs);
    return net;
}

void DenseNet::hidden_layer(std::span<const double> x, std::vector<double> &pre,
                            std::vector<double> &act) const {
    if (x.size() != static_cast<std::size_t>(n_in_)) {
        throw ShapeError("dense net expects " + std::to_string(n_in_) + " inputs, got " +
                         std::to_string(x.size()));
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw NumericError("non-finite input to dense net");
        }
    }
    pre.resize(static_cast<std::size_t>(n_hidden_));
    act.resize(static_cast<std::size_t>(n_hidden_));
    const double *w1 = params_.data() + w1_off();
    const double *b1 = params_.data() + b1_off();
    for (int h = 0; h < n_hidden_; ++h) {
        double z = b1[h];
        const double *w = w1 + std::size_t(h) * n_in_;
        for (int i = 0; i < n_in_; ++i) {
            z += w[i] * x[static_cast<std::size_t>(i)];
        }
        pre[static_cast<std::size_t>(h)] = z;
        act[static_cast<std::size_t>(h)] = activation_ == Activation::Tanh ? std::tanh(z)
                                                                           : (z > 0.0 ? z : 0.0);
    }
}

std::vector<double> DenseNet::forward(std::span<const double> x) const {
    std::vector<double> pre;
    std::vector<double> act;
    hidden_layer(x, pre, act);
    std::vector<double> y(static_cast<std::size_t>(n_out_));
    const double *w2 = params_.data() + w2_off();
    const double *b2 = params_.data() + b2_off();
    for (int o = 0; o < n_out_; ++o) {
        double s = b2[o];
        const double *w = w2 + std::size_t(o) * n_hidden_;
        for (int h = 0; h < n_hidden_; ++h) {
            s += w[h] * act[static_cast<std::size_t>(h)];
        }
        y[static_cast<std::size_t>(o)] = s;
    }
    return y;
}

std::vector<double> DenseNet::accumulate_gradient(std::span<const double> x,
                                                  std::span<const double> dloss_dy,
                                                  std::span<double> grad) const {
    if (grad.size() != params_.size()) {
        throw ShapeError("gradient buffer does not match parameter count");
    }
    if (dloss_dy.size() != static_cast<std::size_t>(n_out_)) {
        throw ShapeError("upstream gradient has the wrong length");
    }
    std::vector<double> pre;
    std::vector<double> act;
    hidden_layer(x, pre, act);

    const double *w2 = params_.data() + w2_off();
    const double *b2 = params_.data() + b2_off();
    std::vector<double> y(static_cast<std::size_t>(n_out_));
    std::vector<double> dact(static_cast<std::size_t>(n_hidden_), 0.0);
    double *g_w2 = grad.data() + w2_off();
    double *g_b2 = grad.data() + b2_off();
    for (int o = 0; o < n_out_; ++o) {
        const double *w = w2 + std::size_t(o) * n_hidden_;
        const double d = dloss_dy[static_cast<std::size_t>(o)];
        double s = b2[o];
        double *gw = g_w2 + std::size_t(o) * n_hidden_;
        for (int h = 0; h < n_hidden_; ++h) {
            const auto hu = static_cast<std::size_t>(h);
            s += w[h] * act[hu];
            gw[h] += d * act[hu];
            dact[hu] += d * w[h];
        }
        g_b2[o] += d;
        y[static_cast<std::size_t>(o)] = s;
    }

    double *g_w1 = grad.data() + w1_off();
    double *g_b1 = grad.data() + b1_off();
    for (int h = 0; h < n_hidden_; ++h) {
        const auto hu = static_cast<std::size_t>(h);
        const double dz = activation_ == Activation::Tanh ? dact[hu] * (1.0 - act[hu] * act[hu])
                                                          : (pre[hu] > 0.0 ? dact[hu] : 0.0);
        g_b1[h] += dz;
        double *gw = g_w1 + std::size_t(h) * n_in_;
        for (int i = 0; i < n_in_; ++i) {
            gw[i] += dz * x[static_cast<std::size_t>(i)];
        }
    }
    return y;
}

std::vector<double> backward(const DenseNet &net, std::span<const double> x,
                             std::span<const double> y_true) {
    const auto y = net.forward(x);
    if (y_true.size() != y.size()) {
        throw ShapeError("target has the wrong length");
    }
    std::vector<double> dy(y.size());
    for (std::size_t o = 0; o < y.size(); ++o) {
        dy[o] = 2.0 * (y[o] - y_true[o]) / static_cast<double>(y.size());
    }
    std::vector<double> grad(net.n_params(), 0.0);
    net.accumulate_gradient(x, dy, grad);
    return grad;
}

nlohmann::json to_json(const DenseNet &net) {
    auto vec = [](std::span<const double> s) { return std::vector<double>(s.begin(), s.end()); };
    return {{"format", "phn-dense-net"},
            {"version", 1},
            {"layer_sizes", {net.n_inputs(), net.n_hidden(), net.n_outputs()}},
            {"activation", to_string(net.activation())},
            {"w1", vec(net.w1())},
            {"b1", vec(net.b1())},
            {"w2", vec(net.w2())},
            {"b2", vec(net.b2())}};
}

DenseNet dense_net_from_json(const nlohmann::json &doc) {
    try {
        if (doc.value("format", std::string{}) != "phn-dense-net") {
            throw DataError("not a phn-dense-net document");
        }
        const auto sizes = doc.at("layer_sizes").get<std::vector<int>>();
        if (sizes.size() != 3) {
            throw DataError("layer_sizes must have three entries");
        }
        DenseNet net(sizes[0], sizes[1], sizes[2],
                     activation_from_string(doc.at("activation").get<std::string>()));
        auto load = [&doc](const char *key, std::span<double> dst) {
            const auto v = doc.at(key).get<std::vector<double>>();
            if (v.size() != dst.size()) {
                throw DataError(std::string("checkpoint field ") + key + " has " +
                                std::to_string(v.size()) + " values, expected " +
                                std::to_string(dst.size()));
            }
            std::copy(v.begin(), v.end(), dst.begin());
        };
        load("w1", net.w1());
        load("b1", net.b1());
        load("w2", net.w2());
        load("b2", net.b2());
        return net;
    } catch (const nlohmann::json::exception &e) {
        throw DataError(std::string("malformed dense-net checkpoint: ") + e.what());
    }
}

} // namespace phn::nn
