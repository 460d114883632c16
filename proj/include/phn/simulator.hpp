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
 * @file simulator.hpp
 * Dense statevector simulation for the five gate kinds used by the
 * forecasting ansätze, with exact expectations and circuit gradients.
 *
 * Conventions:
 *  - RX(θ) = exp(-iθX/2), RZ(θ) = exp(-iθZ/2), RZZ(θ) = exp(-iθ Z⊗Z/2).
 *  - Qubit 0 is the most significant bit of a basis label, so on two qubits
 *    the amplitude index of |q0 q1⟩ is 2·q0 + q1.
 */

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phn/matrix.hpp"

namespace phn::sim {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 20;
/// Largest register accepted by the dense-unitary oracle.
inline constexpr int kMaxOracleQubits = 4;

enum class GateKind { H, RX, RZ, RZZ, CNOT };

std::string_view to_string(GateKind kind);
GateKind gate_kind_from_string(std::string_view name);

/// Number of wires the gate kind acts on.
int arity(GateKind kind);
/// True for RX, RZ and RZZ, the kinds that carry an angle and a Pauli
/// generator.
bool is_parameterized(GateKind kind);

struct Gate {
    GateKind kind = GateKind::H;
    /// For CNOT wires = {control, target}. Unused entries are 0.
    std::array<int, 2> wires{0, 0};
    double angle = 0.0;

    static Gate h(int q) { return {GateKind::H, {q, 0}, 0.0}; }
    static Gate rx(int q, double theta) { return {GateKind::RX, {q, 0}, theta}; }
    static Gate rz(int q, double theta) { return {GateKind::RZ, {q, 0}, theta}; }
    static Gate rzz(int a, int b, double theta) { return {GateKind::RZZ, {a, b}, theta}; }
    static Gate cnot(int control, int target) { return {GateKind::CNOT, {control, target}, 0.0}; }

    /// The inverse gate.
    [[nodiscard]] Gate adjoint() const;

    /// Throws IndexError if a wire is outside [0, n_qubits) or a two-qubit
    /// gate repeats a wire.
    void validate(int n_qubits) const;
};

class Observable {
  public:
    enum class Kind { PauliZ, Projector };

    /// Z on a single qubit.
    static Observable pauli_z(int qubit);
    /// |b⟩⟨b| for a bitstring such as "01" (qubit 0 first).
    static Observable projector(std::string_view bitstring);
    /// |index⟩⟨index| on an n-qubit register.
    static Observable projector(int n_qubits, std::uint64_t index);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] int qubit() const { return qubit_; }
    [[nodiscard]] std::uint64_t basis_index() const { return index_; }
    [[nodiscard]] int n_qubits() const { return n_qubits_; }

    /// Throws ShapeError if the observable cannot act on an n-qubit state.
    void validate(int n_qubits) const;
    /// Replaces amplitudes with O|ψ⟩.
    void apply(std::span<Complex> amplitudes) const;

    friend bool operator==(const Observable &, const Observable &) = default;

  private:
    Kind kind_ = Kind::PauliZ;
    int qubit_ = 0;
    int n_qubits_ = 0; // projectors only
    std::uint64_t index_ = 0;
};

class Statevector {
  public:
    /// |0…0⟩ on n qubits; SizeError outside [1, kMaxQubits].
    static Statevector zero(int n_qubits);

    [[nodiscard]] int n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t size() const { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const { return amps_; }
    std::span<Complex> amplitudes() { return amps_; }

    /// Applies the gate unitary in place.
    Statevector &apply(const Gate &gate);
    /// Applies the Pauli generator G of a parameterized gate (X, Z or Z⊗Z),
    /// so that d/dθ exp(-iθG/2)|ψ⟩ = -i/2 · G · exp(-iθG/2)|ψ⟩.
    Statevector &apply_generator(const Gate &gate);

    [[nodiscard]] double norm() const;

  private:
    explicit Statevector(int n_qubits);

    int n_qubits_ = 0;
    std::vector<Complex> amps_;
};

Statevector new_zero_state(int n_qubits);
Statevector apply_gate(Statevector state, const Gate &gate);
double expectation(const Statevector &state, const Observable &obs);
std::vector<double> probabilities(const Statevector &state);
/// ⟨a|b⟩.
Complex inner(std::span<const Complex> a, std::span<const Complex> b);

/// A gate whose angle may be a trainable parameter. `trainable` indexes the
/// gradient vector, -1 for gates with a fixed or data-bound angle.
struct BoundGate {
    Gate gate;
    int trainable = -1;
};

/// A fully bound circuit acting on |0…0⟩.
struct BoundCircuit {
    int n_qubits = 1;
    int n_trainable = 0;
    std::vector<BoundGate> gates;

    /// Checks wire ranges and that trainable flags sit on parameterized gates
    /// with indices in [0, n_trainable). Throws SpecError / IndexError.
    void validate() const;
};

Statevector run(const BoundCircuit &circuit);

/// ⟨O⟩ and its gradient with respect to every trainable angle, by the adjoint
/// method: one forward pass, then a single backward sweep that un-computes the
/// state and the co-state together.
double adjoint_value_and_gradient(const BoundCircuit &circuit, const Observable &obs,
                                  std::span<double> gradient);
std::vector<double> adjoint_gradient(const BoundCircuit &circuit, const Observable &obs);

/// Jacobian of several observables at once (rows = observables, cols =
/// trainable angles). Values are written to `values` when it is non-empty.
Matrix adjoint_jacobian(const BoundCircuit &circuit, std::span<const Observable> observables,
                        std::span<double> values = {});

/// Two-term parameter-shift rule at ±π/2 per gate occurrence. Used as an
/// independent check on the adjoint sweep.
std::vector<double> param_shift_gradient(const BoundCircuit &circuit, const Observable &obs);

/// Row-major 2^n × 2^n unitary built by explicitly embedding every gate
/// matrix and multiplying. SizeError for n > kMaxOracleQubits.
std::vector<Complex> dense_unitary_oracle(std::span<const Gate> circuit, int n_qubits);

} // namespace phn::sim
