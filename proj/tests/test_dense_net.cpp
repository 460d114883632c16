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

#include <cmath>
#include <random>

#include "doctest.h"
#include "phn/dense_net.hpp"
#include "phn/error.hpp"

using namespace phn;
using namespace phn::nn;

TEST_CASE("layer sizes and layout") {
    const DenseNet net;
    CHECK(net.n_params() == 5 * 256 + 256 + 2 * 256 + 2);
    CHECK(net.w1().size() == 1280);
    CHECK(net.b2().size() == 2);
    CHECK_THROWS_AS(DenseNet(0, 4, 2), SizeError);
}

TEST_CASE("hand-computed forward pass") {
    DenseNet net(2, 2, 1, Activation::Relu);
    // W1 = [[1, -1], [0.5, 2]], b1 = [0, -1], W2 = [[2, 3]], b2 = [0.5]
    const double w1[] = {1, -1, 0.5, 2};
    std::copy(std::begin(w1), std::end(w1), net.w1().begin());
    net.b1()[1] = -1.0;
    net.w2()[0] = 2.0;
    net.w2()[1] = 3.0;
    net.b2()[0] = 0.5;
    const std::vector<double> x{1.0, 2.0};
    // h = relu([-1, 3.5]) = [0, 3.5]; y = 0 + 10.5 + 0.5
    CHECK(net.forward(x)[0] == doctest::Approx(11.0));

    DenseNet t(2, 2, 1, Activation::Tanh);
    std::copy(std::begin(w1), std::end(w1), t.w1().begin());
    t.w2()[0] = 1.0;
    CHECK(t.forward(x)[0] == doctest::Approx(std::tanh(-1.0)));
}

TEST_CASE("input checks") {
    const auto net = DenseNet::init(1);
    std::vector<double> x(5, 0.1);
    CHECK_NOTHROW((void)net.forward(x));
    x[2] = std::nan("");
    CHECK_THROWS_AS((void)net.forward(x), NumericError);
    std::vector<double> short_x(4, 0.0);
    CHECK_THROWS_AS((void)net.forward(short_x), ShapeError);
}

TEST_CASE("Glorot initialization") {
    const auto a = DenseNet::init(7);
    const auto b = DenseNet::init(7);
    CHECK(a == b);
    CHECK_FALSE(a == DenseNet::init(8));
    const double bound1 = std::sqrt(6.0 / (5 + 256));
    for (double w : a.w1()) {
        CHECK(std::abs(w) <= bound1);
    }
    for (double v : a.b1()) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("backprop matches central differences") {
    for (auto act : {Activation::Tanh, Activation::Relu}) {
        auto net = DenseNet::init(3, act, 5, 16, 2);
        std::mt19937_64 rng(5);
        std::normal_distribution<double> g(0.0, 1.0);
        std::vector<double> x(5), y(2);
        for (auto &v : x) {
            v = g(rng);
        }
        for (auto &v : y) {
            v = g(rng);
        }
        const auto grad = backward(net, x, y);
        auto loss = [&](const DenseNet &n) {
            const auto p = n.forward(x);
            return ((p[0] - y[0]) * (p[0] - y[0]) + (p[1] - y[1]) * (p[1] - y[1])) / 2.0;
        };
        const double h = 1e-6;
        double worst = 0.0;
        for (std::size_t i = 0; i < net.n_params(); ++i) {
            const double orig = net.params()[i];
            net.params()[i] = orig + h;
            const double up = loss(net);
            net.params()[i] = orig - h;
            const double down = loss(net);
            net.params()[i] = orig;
            worst = std::max(worst, std::abs((up - down) / (2 * h) - grad[i]));
        }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("JSON round trip") {
    const auto net = DenseNet::init(9, Activation::Relu, 5, 8, 2);
    const auto doc = to_json(net);
    CHECK(doc["layer_sizes"] == nlohmann::json({5, 8, 2}));
    CHECK(dense_net_from_json(nlohmann::json::parse(doc.dump())) == net);
    auto bad = doc;
    bad["b1"] = std::vector<double>(7, 0.0);
    CHECK_THROWS_AS(dense_net_from_json(bad), DataError);
    bad = doc;
    bad.erase("w2");
    CHECK_THROWS_AS(dense_net_from_json(bad), DataError);
    CHECK_THROWS_AS(activation_from_string("gelu"), ConfigError);
}
