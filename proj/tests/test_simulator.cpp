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
#include "phn/error.hpp"
#include "phn/exec.hpp"
#include "phn/simulator.hpp"
#include "test_util.hpp"

using namespace phn;
using namespace phn::sim;
using phn::testing::random_circuit;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<Complex> oracle_state(const BoundCircuit &c) {
    std::vector<Gate> gates;
    for (const auto &bg : c.gates) {
        gates.push_back(bg.gate);
    }
    const auto u = dense_unitary_oracle(gates, c.n_qubits);
    const std::size_t dim = std::size_t{1} << c.n_qubits;
    std::vector<Complex> psi(dim);
    for (std::size_t r = 0; r < dim; ++r) {
        psi[r] = u[r * dim]; // U |0⟩ = first column
    }
    return psi;
}

} // namespace

TEST_CASE("zero state and size limits") {
    const auto s = Statevector::zero(3);
    CHECK(s.size() == 8);
    CHECK(s.amplitudes()[0] == Complex(1.0, 0.0));
    CHECK(s.norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(Statevector::zero(0), SizeError);
    CHECK_THROWS_AS(Statevector::zero(kMaxQubits + 1), SizeError);
}

TEST_CASE("single gates on basis states") {
    SUBCASE("X via RX(pi) flips qubit 0 (most significant bit)") {
        auto s = Statevector::zero(2);
        s.apply(Gate::rx(0, pi));
        CHECK(std::abs(s.amplitudes()[2] - Complex(0.0, -1.0)) < 1e-15);
    }
    SUBCASE("H then H is identity") {
        auto s = Statevector::zero(1);
        s.apply(Gate::h(0));
        CHECK(std::abs(s.amplitudes()[0] - std::numbers::sqrt2 / 2) < 1e-15);
        s.apply(Gate::h(0));
        CHECK(std::abs(s.amplitudes()[0] - 1.0) < 1e-15);
        CHECK(std::abs(s.amplitudes()[1]) < 1e-15);
    }
    SUBCASE("RZ phases") {
        auto s = Statevector::zero(1);
        s.apply(Gate::h(0)).apply(Gate::rz(0, 0.7));
        const auto a = s.amplitudes();
        CHECK(std::arg(a[1] / a[0]) == doctest::Approx(0.7));
    }
    SUBCASE("CNOT maps |10> to |11>") {
        auto s = Statevector::zero(2);
        s.apply(Gate::rx(0, pi)).apply(Gate::cnot(0, 1));
        CHECK(std::abs(s.amplitudes()[3]) == doctest::Approx(1.0));
    }
    SUBCASE("RZZ phase depends on parity") {
        auto s = Statevector::zero(2);
        s.apply(Gate::h(0)).apply(Gate::h(1)).apply(Gate::rzz(0, 1, 0.4));
        const auto a = s.amplitudes();
        CHECK(std::arg(a[1] / a[0]) == doctest::Approx(0.4));
        CHECK(std::arg(a[3] / a[0]) == doctest::Approx(0.0));
    }
}

TEST_CASE("gate validation") {
    auto s = Statevector::zero(2);
    CHECK_THROWS_AS(s.apply(Gate::rx(2, 0.1)), IndexError);
    CHECK_THROWS_AS(s.apply(Gate::cnot(1, 1)), IndexError);
    CHECK_THROWS_AS(s.apply(Gate::rzz(-1, 0, 0.1)), IndexError);
    CHECK_THROWS_AS(gate_kind_from_string("SWAP"), SpecError);
    CHECK(gate_kind_from_string("RZZ") == GateKind::RZZ);
}

TEST_CASE("kernel statevector matches dense oracle for n <= 4") {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 4; ++n) {
        for (int trial = 0; trial < 25; ++trial) {
            const auto c = random_circuit(rng, n, 30, 4);
            const auto psi = run(c);
            const auto ref = oracle_state(c);
            double err = 0.0;
            for (std::size_t i = 0; i < ref.size(); ++i) {
                err = std::max(err, std::abs(psi.amplitudes()[i] - ref[i]));
            }
            CHECK(err < 1e-10);
        }
    }
    std::vector<Gate> g{Gate::h(0)};
    CHECK_THROWS_AS(dense_unitary_oracle(g, 5), SizeError);
}

TEST_CASE("norm is preserved") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const auto c = random_circuit(rng, 6, 60, 3);
        CHECK(std::abs(run(c).norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("adjoint gradient agrees with parameter shift and finite differences") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 4;
        const auto c = phn::testing::tie_shared_angles(random_circuit(rng, n, 25, 5));
        const auto obs = Observable::pauli_z(trial % n);
        const auto adj = adjoint_gradient(c, obs);
        const auto ps = param_shift_gradient(c, obs);
        const auto fd = phn::testing::finite_difference_gradient(c, obs);
        CHECK(phn::testing::max_abs_diff(adj, ps) < 1e-9);
        CHECK(phn::testing::max_abs_diff(adj, fd) < 1e-6);
    }
}

TEST_CASE("adjoint jacobian over projectors") {
    std::mt19937_64 rng(14);
    const auto c = phn::testing::tie_shared_angles(random_circuit(rng, 3, 20, 4));
    std::vector<Observable> obs;
    for (std::uint64_t y = 0; y < 8; ++y) {
        obs.push_back(Observable::projector(3, y));
    }
    std::vector<double> values(8);
    const auto jac = adjoint_jacobian(c, obs, values);
    const auto probs = probabilities(run(c));
    double total = 0.0;
    for (std::size_t y = 0; y < 8; ++y) {
        CHECK(values[y] == doctest::Approx(probs[y]).epsilon(1e-12));
        const auto ps = param_shift_gradient(c, obs[y]);
        for (std::size_t p = 0; p < ps.size(); ++p) {
            CHECK(std::abs(jac(y, p) - ps[p]) < 1e-9);
        }
        total += values[y];
    }
    CHECK(total == doctest::Approx(1.0));
    // Probability gradients sum to zero.
    for (std::size_t p = 0; p < jac.cols(); ++p) {
        double s = 0.0;
        for (std::size_t y = 0; y < 8; ++y) {
            s += jac(y, p);
        }
        CHECK(std::abs(s) < 1e-12);
    }
}

TEST_CASE("observables") {
    CHECK(Observable::projector("01").basis_index() == 1);
    CHECK(Observable::projector("10").basis_index() == 2);
    CHECK_THROWS_AS(Observable::projector("0x"), ShapeError);
    auto s = Statevector::zero(2);
    CHECK(expectation(s, Observable::pauli_z(1)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(expectation(s, Observable::pauli_z(2)), ShapeError);
    CHECK_THROWS_AS(expectation(s, Observable::projector("000")), ShapeError);
}

TEST_CASE("bound circuit validation") {
    BoundCircuit c;
    c.n_qubits = 2;
    c.n_trainable = 1;
    c.gates.push_back({Gate::h(0), 0});
    CHECK_THROWS_AS(run(c), SpecError);
    c.gates[0] = {Gate::rx(0, 0.1), 1};
    CHECK_THROWS_AS(run(c), SpecError);
    std::vector<double> grad(2);
    c.gates[0].trainable = 0;
    CHECK_THROWS_AS(adjoint_value_and_gradient(c, Observable::pauli_z(0), grad), ShapeError);
}

TEST_CASE("large states: parallel kernels match a single thread bit for bit") {
    std::mt19937_64 rng(15);
    const auto c = random_circuit(rng, 16, 40, 3);
    const int saved = max_threads();
#ifdef _OPENMP
    omp_set_num_threads(1);
#endif
    const auto serial = run(c);
#ifdef _OPENMP
    omp_set_num_threads(std::max(2, saved));
#endif
    const auto parallel = run(c);
#ifdef _OPENMP
    omp_set_num_threads(saved);
#endif
    CHECK(std::equal(serial.amplitudes().begin(), serial.amplitudes().end(),
                     parallel.amplitudes().begin()));
}
