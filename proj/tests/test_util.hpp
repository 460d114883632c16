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

// Helpers shared by the unit tests and the acceptance driver.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "phn/simulator.hpp"

namespace phn::testing {

/// Random circuit on n qubits with `n_gates` gates drawn from every kind.
/// About two thirds of the parameterized gates are trainable; indices may be
/// shared between gates so gradient accumulation is exercised.
inline sim::BoundCircuit random_circuit(std::mt19937_64 &rng, int n_qubits, int n_gates,
                                        int n_params) {
    using sim::GateKind;
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::uniform_int_distribution<int> wire(0, n_qubits - 1);
    std::uniform_int_distribution<int> kind(0, n_qubits > 1 ? 4 : 2);
    std::uniform_int_distribution<int> param(0, n_params - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    sim::BoundCircuit c;
    c.n_qubits = n_qubits;
    c.n_trainable = n_params;
    for (int g = 0; g < n_gates; ++g) {
        static constexpr GateKind kinds[] = {GateKind::H, GateKind::RX, GateKind::RZ,
                                             GateKind::RZZ, GateKind::CNOT};
        const GateKind k = kinds[kind(rng)];
        sim::BoundGate bg;
        bg.gate.kind = k;
        bg.gate.wires[0] = wire(rng);
        if (sim::arity(k) == 2) {
            do {
                bg.gate.wires[1] = wire(rng);
            } while (bg.gate.wires[1] == bg.gate.wires[0]);
        }
        if (sim::is_parameterized(k)) {
            bg.gate.angle = angle(rng);
            if (unit(rng) < 0.67) {
                bg.trainable = param(rng);
            }
        }
        c.gates.push_back(bg);
    }
    return c;
}

/// Sets the angle of every gate bound to parameter i to params[i].
inline sim::BoundCircuit with_params(sim::BoundCircuit c, const std::vector<double> &params) {
    for (auto &bg : c.gates) {
        if (bg.trainable >= 0) {
            bg.gate.angle = params[static_cast<std::size_t>(bg.trainable)];
        }
    }
    return c;
}

/// Central finite differences of ⟨O⟩ with shared parameters moved together.
inline std::vector<double> finite_difference_gradient(const sim::BoundCircuit &c,
                                                      const sim::Observable &obs,
                                                      double h = 1e-6) {
    std::vector<double> params(static_cast<std::size_t>(c.n_trainable), 0.0);
    for (const auto &bg : c.gates) {
        if (bg.trainable >= 0) {
            params[static_cast<std::size_t>(bg.trainable)] = bg.gate.angle;
        }
    }
    std::vector<double> grad(params.size(), 0.0);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto plus = params;
        auto minus = params;
        plus[i] += h;
        minus[i] -= h;
        grad[i] = (sim::expectation(sim::run(with_params(c, plus)), obs) -
                   sim::expectation(sim::run(with_params(c, minus)), obs)) /
                  (2.0 * h);
    }
    return grad;
}

/// Makes every gate sharing a trainable index carry the same angle, so the
/// circuit is a function of its parameter vector.
inline sim::BoundCircuit tie_shared_angles(sim::BoundCircuit c) {
    std::vector<double> params(static_cast<std::size_t>(c.n_trainable), 0.0);
    std::vector<bool> seen(params.size(), false);
    for (const auto &bg : c.gates) {
        if (bg.trainable >= 0 && !seen[static_cast<std::size_t>(bg.trainable)]) {
            params[static_cast<std::size_t>(bg.trainable)] = bg.gate.angle;
            seen[static_cast<std::size_t>(bg.trainable)] = true;
        }
    }
    return with_params(std::move(c), params);
}

inline double max_abs_diff(const std::vector<double> &a, const std::vector<double> &b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string &tag) {
    static std::uint64_t counter = 0;
    auto dir = std::filesystem::temp_directory_path() /
               ("phn_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace phn::testing
