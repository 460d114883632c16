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
#include <numbers>
#include <random>

#include "doctest.h"
#include "phn/circuits.hpp"
#include "phn/error.hpp"
#include "test_util.hpp"

using namespace phn;
using namespace phn::circuits;
using sim::GateKind;

namespace {

std::vector<double> uniform_angles(std::mt19937_64 &rng, int n) {
    std::uniform_real_distribution<double> d(0.0, 2.0 * std::numbers::pi);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto &x : v) {
        x = d(rng);
    }
    return v;
}

} // namespace

TEST_CASE("production ansatz shape") {
    const auto spec = build_production_ansatz();
    CHECK(spec.n_qubits() == 5);
    CHECK(spec.n_features() == 5);
    CHECK(spec.n_params() == 20);
    CHECK(spec.gates().size() == 35);
    int cnots = 0;
    for (const auto &g : spec.gates()) {
        cnots += g.kind == GateKind::CNOT;
    }
    CHECK(cnots == 5);
}

TEST_CASE("toy ansatz parameter counts") {
    CHECK(build_toy_ansatz(1).n_params() == 7);
    CHECK(build_toy_ansatz(2).n_params() == 10);
    CHECK(build_toy_ansatz(3).n_params() == 13);
    CHECK(build_toy_ansatz(1).n_features() == 2);
    CHECK_THROWS_AS(build_toy_ansatz(0), ConfigError);
}

TEST_CASE("spec validation") {
    const auto z0 = sim::Observable::pauli_z(0);
    SUBCASE("binding on H") {
        std::vector<AnsatzGate> g{{GateKind::H, {0, 0}, ParamBinding::trainable(0)}};
        CHECK_THROWS_AS(AnsatzSpec(1, 0, g, z0), SpecError);
    }
    SUBCASE("missing binding on RX") {
        std::vector<AnsatzGate> g{{GateKind::RX, {0, 0}, ParamBinding::none()}};
        CHECK_THROWS_AS(AnsatzSpec(1, 0, g, z0), SpecError);
    }
    SUBCASE("feature out of range") {
        std::vector<AnsatzGate> g{{GateKind::RZ, {0, 0}, ParamBinding::feature(1)}};
        CHECK_THROWS_AS(AnsatzSpec(1, 1, g, z0), SpecError);
    }
    SUBCASE("gap in trainable indices") {
        std::vector<AnsatzGate> g{{GateKind::RX, {0, 0}, ParamBinding::trainable(1)}};
        CHECK_THROWS_AS(AnsatzSpec(1, 0, g, z0), SpecError);
    }
    SUBCASE("wire out of range") {
        std::vector<AnsatzGate> g{{GateKind::RX, {3, 0}, ParamBinding::fixed(0.1)}};
        CHECK_THROWS_AS(AnsatzSpec(2, 0, g, z0), IndexError);
    }
    SUBCASE("bind length mismatch") {
        const auto spec = build_toy_ansatz(1);
        std::vector<double> p(6), x(2);
        CHECK_THROWS_AS((void)spec.bind(p, x), ShapeError);
    }
}

TEST_CASE("evaluate_with_gradient matches parameter shift on both ansätze") {
    std::mt19937_64 rng(21);
    for (const auto &spec : {build_production_ansatz(), build_toy_ansatz(2)}) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto theta = uniform_angles(rng, spec.n_params());
            const auto x = uniform_angles(rng, spec.n_features());
            std::vector<double> grad(theta.size());
            const double value = evaluate_with_gradient(spec, theta, x, grad);
            CHECK(value == doctest::Approx(evaluate(spec, theta, x)).epsilon(1e-12));
            const auto ps = sim::param_shift_gradient(spec.bind(theta, x), spec.observable());
            CHECK(phn::testing::max_abs_diff(grad, ps) < 1e-9);
        }
    }
}

TEST_CASE("probability jacobian") {
    std::mt19937_64 rng(22);
    const auto spec = build_toy_ansatz(1);
    const auto theta = uniform_angles(rng, 7);
    const std::vector<double> x{0.3, -1.1};
    std::vector<double> probs(4);
    const auto jac = probability_jacobian(spec, theta, x, probs);
    CHECK(jac.rows() == 4);
    CHECK(jac.cols() == 7);
    const auto direct = circuit_probabilities(spec, theta, x);
    for (std::size_t y = 0; y < 4; ++y) {
        CHECK(probs[y] == doctest::Approx(direct[y]).epsilon(1e-12));
    }
    std::vector<double> short_buf(3);
    CHECK_THROWS_AS(probability_jacobian(spec, theta, x, short_buf), ShapeError);
}

TEST_CASE("repeated toy blocks fuse into one") {
    // Generators of the block commute, so depth 2 with angles (a, b, c) and
    // (d, e, f) equals depth 1 with (a + d, b + e, c + f).
    std::mt19937_64 rng(23);
    const auto s1 = build_toy_ansatz(1);
    const auto s2 = build_toy_ansatz(2);
    const auto t2 = uniform_angles(rng, 10);
    std::vector<double> t1(t2.begin(), t2.begin() + 7);
    for (int i = 0; i < 3; ++i) {
        t1[static_cast<std::size_t>(4 + i)] += t2[static_cast<std::size_t>(7 + i)];
    }
    const std::vector<double> x{0.9, 2.2};
    const auto p1 = circuit_probabilities(s1, t1, x);
    const auto p2 = circuit_probabilities(s2, t2, x);
    CHECK(phn::testing::max_abs_diff(p1, p2) < 1e-12);
}

TEST_CASE("JSON round trip") {
    for (const auto &spec : {build_production_ansatz(), build_toy_ansatz(3)}) {
        const auto doc = to_json(spec);
        CHECK(doc["format"] == "phn-ansatz");
        CHECK(ansatz_from_json(doc) == spec);
        CHECK(ansatz_from_json(nlohmann::json::parse(doc.dump())) == spec);
    }
    const auto proj = AnsatzSpec(2, 0, {{GateKind::H, {0, 0}, ParamBinding::none()},
                                        {GateKind::RX, {1, 0}, ParamBinding::fixed(0.25)}},
                                 sim::Observable::projector("10"));
    CHECK(ansatz_from_json(to_json(proj)) == proj);

    auto bad = to_json(build_toy_ansatz(1));
    bad["n_params"] = 9;
    CHECK_THROWS_AS(ansatz_from_json(bad), SpecError);
    bad = to_json(build_toy_ansatz(1));
    bad["gates"][0]["kind"] = "TOFFOLI";
    CHECK_THROWS_AS(ansatz_from_json(bad), SpecError);
    CHECK_THROWS_AS(ansatz_from_json(nlohmann::json{{"format", "other"}}), SpecError);
    CHECK_THROWS_AS(ansatz_from_json(nlohmann::json{{"format", "phn-ansatz"}}), SpecError);
}
