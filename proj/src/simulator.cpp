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

#include "phn/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "phn/error.hpp"

namespace phn::sim {

namespace {

// Below this many amplitudes the kernels run single-threaded; thread start-up
// dominates for the 2- and 5-qubit circuits used in training.
constexpr std::ptrdiff_t kParallelAmplitudes = std::ptrdiff_t{1} << 14;

std::size_t wire_mask(int n_qubits, int q) {
    return std::size_t{1} << static_cast<unsigned>(n_qubits - 1 - q);
}

// Index of the k-th basis state whose `mask` bit is zero.
inline std::size_t insert_zero_bit(std::size_t k, std::size_t mask) {
    const std::size_t low = k & (mask - 1);
    return ((k - low) << 1) | low;
}

// Runs body(i) for i in [0, n); OpenMP only for large states so small
// circuits never enter the runtime.
template <class Body> inline void amp_loop(std::ptrdiff_t n, Body &&body) {
    if (n >= kParallelAmplitudes) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
        body(i);
        }
        return;
    }
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        body(i);
    }
}

struct Mat2 {
    Complex m00, m01, m10, m11;
};

Mat2 single_qubit_matrix(const Gate &g) {
    const double c = std::cos(g.angle / 2.0);
    const double s = std::sin(g.angle / 2.0);
    switch (g.kind) {
    case GateKind::H: {
        const double r = std::numbers::sqrt2 / 2.0;
        return {r, r, r, -r};
    }
    case GateKind::RX:
        return {c, Complex(0.0, -s), Complex(0.0, -s), c};
    case GateKind::RZ:
        return {Complex(c, -s), 0.0, 0.0, Complex(c, s)};
    default:
        throw SpecError("not a single-qubit gate: " + std::string(to_string(g.kind)));
    }
}

void apply_mat2(std::span<Complex> amps, std::size_t mask, const Mat2 &u) {
    const auto pairs = static_cast<std::ptrdiff_t>(amps.size() / 2);
    amp_loop(pairs, [&](std::ptrdiff_t k) {
        const std::size_t i = insert_zero_bit(static_cast<std::size_t>(k), mask);
        const std::size_t j = i | mask;
        const Complex a = amps[i];
        const Complex b = amps[j];
        amps[i] = u.m00 * a + u.m01 * b;
        amps[j] = u.m10 * a + u.m11 * b;
    });
}

void apply_rz(std::span<Complex> amps, std::size_t mask, double theta) {
    const Complex lo = std::polar(1.0, -theta / 2.0);
    const Complex hi = std::polar(1.0, theta / 2.0);
    const auto n = static_cast<std::ptrdiff_t>(amps.size());
    amp_loop(n, [&](std::ptrdiff_t i) {
        amps[i] *= (static_cast<std::size_t>(i) & mask) ? hi : lo;
    });
}

void apply_rzz(std::span<Complex> amps, std::size_t mask_a, std::size_t mask_b, double theta) {
    const Complex same = std::polar(1.0, -theta / 2.0);
    const Complex differ = std::polar(1.0, theta / 2.0);
    const auto n = static_cast<std::ptrdiff_t>(amps.size());
    amp_loop(n, [&](std::ptrdiff_t i) {
        const auto u = static_cast<std::size_t>(i);
        const bool a = (u & mask_a) != 0;
        const bool b = (u & mask_b) != 0;
        amps[i] *= (a == b) ? same : differ;
    });
}

void apply_cnot(std::span<Complex> amps, std::size_t control, std::size_t target) {
    const auto pairs = static_cast<std::ptrdiff_t>(amps.size() / 2);
    amp_loop(pairs, [&](std::ptrdiff_t k) {
        const std::size_t i = insert_zero_bit(static_cast<std::size_t>(k), target);
        if (i & control) {
            std::swap(amps[i], amps[i | target]);
        }
    });
}

// Sign pattern of a Z-type generator: Z_q or Z_a Z_b.
void apply_z_signs(std::span<Complex> amps, std::size_t mask) {
    const auto n = static_cast<std::ptrdiff_t>(amps.size());
    amp_loop(n, [&](std::ptrdiff_t i) {
        if (std::popcount(static_cast<std::size_t>(i) & mask) & 1U) {
            amps[i] = -amps[i];
        }
    });
}

void apply_x(std::span<Complex> amps, std::size_t mask) {
    const auto pairs = static_cast<std::ptrdiff_t>(amps.size() / 2);
    amp_loop(pairs, [&](std::ptrdiff_t k) {
        const std::size_t i = insert_zero_bit(static_cast<std::size_t>(k), mask);
        std::swap(amps[i], amps[i | mask]);
    });
}

} // namespace

std::string_view to_string(GateKind kind) {
    switch (kind) {
    case GateKind::H:
        return "H";
    case GateKind::RX:
        return "RX";
    case GateKind::RZ:
        return "RZ";
    case GateKind::RZZ:
        return "RZZ";
    case GateKind::CNOT:
        return "CNOT";
    }
    return "?";
}

GateKind gate_kind_from_string(std::string_view name) {
    for (auto kind : {GateKind::H, GateKind::RX, GateKind::RZ, GateKind::RZZ, GateKind::CNOT}) {
        if (to_string(kind) == name) {
        return kind;
        }
    }
    throw SpecError("unknown gate kind '" + std::string(name) + "'");
}

int arity(GateKind kind) { return (kind == GateKind::RZZ || kind == GateKind::CNOT) ? 2 : 1; }

bool is_parameterized(GateKind kind) {
    return kind == GateKind::RX || kind == GateKind::RZ || kind == GateKind::RZZ;
}

Gate Gate::adjoint() const {
    Gate inv = *this;
    if (is_parameterized(kind)) {
        inv.angle = -angle;
    }
    return inv;
}

void Gate::validate(int n_qubits) const {
    for (int w = 0; w < arity(kind); ++w) {
        if (wires[w] < 0 || wires[w] >= n_qubits) {
        throw IndexError(std::string(to_string(kind)) + " wire " + std::to_string(wires[w]) +
                     " outside a " + std::to_string(n_qubits) + "-qubit register");
        }
    }
    if (arity(kind) == 2 && wires[0] == wires[1]) {
        throw IndexError(std::string(to_string(kind)) + " needs two distinct wires");
    }
}

Observable Observable::pauli_z(int qubit) {
    Observable o;
    o.kind_ = Kind::PauliZ;
    o.qubit_ = qubit;
    return o;
}

Observable Observable::projector(std::string_view bitstring) {
    if (bitstring.empty() || bitstring.size() > static_cast<std::size_t>(kMaxQubits)) {
        throw ShapeError("projector bitstring must have 1.." + std::to_string(kMaxQubits) +
                 " characters");
    }
    std::uint64_t index = 0;
    for (char c : bitstring) {
        if (c != '0' && c != '1') {
        throw ShapeError("projector bitstring may only contain 0 and 1");
        }
        index = (index << 1U) | static_cast<std::uint64_t>(c == '1');
    }
    return projector(static_cast<int>(bitstring.size()), index);
}

Observable Observable::projector(int n_qubits, std::uint64_t index) {
    Observable o;
    o.kind_ = Kind::Projector;
    o.n_qubits_ = n_qubits;
    o.index_ = index;
    if (n_qubits < 1 || n_qubits > kMaxQubits || index >= (std::uint64_t{1} << n_qubits)) {
        throw ShapeError("projector index out of range");
    }
    return o;
}

void Observable::validate(int n_qubits) const {
    if (kind_ == Kind::PauliZ) {
        if (qubit_ < 0 || qubit_ >= n_qubits) {
        throw ShapeError("Z observable on qubit " + std::to_string(qubit_) + " of a " +
                     std::to_string(n_qubits) + "-qubit state");
        }
    } else if (n_qubits_ != n_qubits) {
        throw ShapeError("projector on " + std::to_string(n_qubits_) + " qubits applied to a " +
                 std::to_string(n_qubits) + "-qubit state");
    }
}

void Observable::apply(std::span<Complex> amplitudes) const {
    const int n = std::countr_zero(amplitudes.size());
    validate(n);
    if (kind_ == Kind::PauliZ) {
        apply_z_signs(amplitudes, wire_mask(n, qubit_));
        return;
    }
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        if (i != index_) {
        amplitudes[i] = 0.0;
        }
    }
}

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw SizeError("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                std::to_string(kMaxQubits) + "]");
    }
    amps_.assign(std::size_t{1} << n_qubits, Complex(0.0, 0.0));
}

Statevector Statevector::zero(int n_qubits) {
    Statevector s(n_qubits);
    s.amps_[0] = 1.0;
    return s;
}

Statevector &Statevector::apply(const Gate &gate) {
    gate.validate(n_qubits_);
    const std::size_t m0 = wire_mask(n_qubits_, gate.wires[0]);
    switch (gate.kind) {
    case GateKind::H:
    case GateKind::RX:
        apply_mat2(amps_, m0, single_qubit_matrix(gate));
        break;
    case GateKind::RZ:
        apply_rz(amps_, m0, gate.angle);
        break;
    case GateKind::RZZ:
        apply_rzz(amps_, m0, wire_mask(n_qubits_, gate.wires[1]), gate.angle);
        break;
    case GateKind::CNOT:
        apply_cnot(amps_, m0, wire_mask(n_qubits_, gate.wires[1]));
        break;
    }
    return *this;
}

Statevector &Statevector::apply_generator(const Gate &gate) {
    gate.validate(n_qubits_);
    const std::size_t m0 = wire_mask(n_qubits_, gate.wires[0]);
    switch (gate.kind) {
    case GateKind::RX:
        apply_x(amps_, m0);
        break;
    case GateKind::RZ:
        apply_z_signs(amps_, m0);
        break;
    case GateKind::RZZ:
        apply_z_signs(amps_, m0 | wire_mask(n_qubits_, gate.wires[1]));
        break;
    default:
        throw SpecError(std::string(to_string(gate.kind)) + " has no generator");
    }
    return *this;
}

double Statevector::norm() const {
    double sum = 0.0;
    for (const auto &a : amps_) {
        sum += std::norm(a);
    }
    return std::sqrt(sum);
}

Statevector new_zero_state(int n_qubits) { return Statevector::zero(n_qubits); }

Statevector apply_gate(Statevector state, const Gate &gate) {
    state.apply(gate);
    return state;
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
    Complex sum(0.0, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += std::conj(a[i]) * b[i];
    }
    return sum;
}

double expectation(const Statevector &state, const Observable &obs) {
    obs.validate(state.n_qubits());
    const auto amps = state.amplitudes();
    if (obs.kind() == Observable::Kind::Projector) {
        return std::norm(amps[obs.basis_index()]);
    }
    const std::size_t mask = wire_mask(state.n_qubits(), obs.qubit());
    double sum = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        sum += (i & mask) ? -std::norm(amps[i]) : std::norm(amps[i]);
    }
    return sum;
}

std::vector<double> probabilities(const Statevector &state) {
    std::vector<double> p(state.size());
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::norm(amps[i]);
    }
    return p;
}

void BoundCircuit::validate() const {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw SizeError("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                std::to_string(kMaxQubits) + "]");
    }
    if (n_trainable < 0) {
        throw SpecError("negative trainable count");
    }
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const auto &bg = gates[i];
        bg.gate.validate(n_qubits);
        if (bg.trainable < 0) {
        continue;
        }
        if (!is_parameterized(bg.gate.kind)) {
        throw SpecError("gate " + std::to_string(i) + " (" +
                    std::string(to_string(bg.gate.kind)) +
                    ") is flagged trainable but has no angle");
        }
        if (bg.trainable >= n_trainable) {
        throw SpecError("gate " + std::to_string(i) + " trainable index " +
                    std::to_string(bg.trainable) + " >= " + std::to_string(n_trainable));
        }
    }
}

Statevector run(const BoundCircuit &circuit) {
    circuit.validate();
    auto state = Statevector::zero(circuit.n_qubits);
    for (const auto &bg : circuit.gates) {
        state.apply(bg.gate);
    }
    return state;
}

Matrix adjoint_jacobian(const BoundCircuit &circuit, std::span<const Observable> observables,
                std::span<double> values) {
    auto psi = run(circuit);
    for (const auto &obs : observables) {
        obs.validate(circuit.n_qubits);
    }
    if (!values.empty() && values.size() != observables.size()) {
        throw ShapeError("values buffer does not match observable count");
    }

    std::vector<Statevector> lambdas;
    lambdas.reserve(observables.size());
    for (std::size_t k = 0; k < observables.size(); ++k) {
        Statevector lam = psi;
        observables[k].apply(lam.amplitudes());
        if (!values.empty()) {
        values[k] = inner(psi.amplitudes(), lam.amplitudes()).real();
        }
        lambdas.push_back(std::move(lam));
    }

    Matrix jac(observables.size(), static_cast<std::size_t>(circuit.n_trainable));
    Statevector mu = psi;
    for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
        const auto &bg = *it;
        if (bg.trainable >= 0) {
        // psi currently holds U_i … U_1|0⟩; d/dθ of that is -i/2 · G · psi.
        auto dst = mu.amplitudes();
        auto src = psi.amplitudes();
        std::copy(src.begin(), src.end(), dst.begin());
        mu.apply_generator(bg.gate);
        for (std::size_t k = 0; k < lambdas.size(); ++k) {
            const Complex overlap = inner(lambdas[k].amplitudes(), mu.amplitudes());
            // 2·Re⟨λ| (-i/2) G |ψ⟩ = Im⟨λ|G|ψ⟩
            jac(k, static_cast<std::size_t>(bg.trainable)) += overlap.imag();
        }
        }
        const Gate inv = bg.gate.adjoint();
        psi.apply(inv);
        for (auto &lam : lambdas) {
        lam.apply(inv);
        }
    }
    return jac;
}

double adjoint_value_and_gradient(const BoundCircuit &circuit, const Observable &obs,
                          std::span<double> gradient) {
    if (gradient.size() != static_cast<std::size_t>(circuit.n_trainable)) {
        throw ShapeError("gradient buffer has " + std::to_string(gradient.size()) +
                 " entries, circuit has " + std::to_string(circuit.n_trainable) +
                 " trainable angles");
    }
    double value = 0.0;
    const auto jac = adjoint_jacobian(circuit, std::span(&obs, 1), std::span(&value, 1));
    const auto row = jac.row(0);
    std::copy(row.begin(), row.end(), gradient.begin());
    return value;
}

std::vector<double> adjoint_gradient(const BoundCircuit &circuit, const Observable &obs) {
    std::vector<double> grad(static_cast<std::size_t>(circuit.n_trainable));
    adjoint_value_and_gradient(circuit, obs, grad);
    return grad;
}

std::vector<double> param_shift_gradient(const BoundCircuit &circuit, const Observable &obs) {
    circuit.validate();
    obs.validate(circuit.n_qubits);
    std::vector<double> grad(static_cast<std::size_t>(circuit.n_trainable), 0.0);
    constexpr double shift = std::numbers::pi / 2.0;
    BoundCircuit shifted = circuit;
    for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
        const int p = circuit.gates[i].trainable;
        if (p < 0) {
        continue;
        }
        const double angle = circuit.gates[i].gate.angle;
        shifted.gates[i].gate.angle = angle + shift;
        const double plus = expectation(run(shifted), obs);
        shifted.gates[i].gate.angle = angle - shift;
        const double minus = expectation(run(shifted), obs);
        shifted.gates[i].gate.angle = angle;
        grad[static_cast<std::size_t>(p)] += 0.5 * (plus - minus);
    }
    return grad;
}

namespace {

// ⟨row|G|col⟩ of a gate on an n-qubit register, computed from the gate's
// local 2×2 or 4×4 matrix by reading the wire bits out of the labels.
Complex embedded_element(const Gate &g, int n, std::size_t row, std::size_t col) {
    auto bit = [n](std::size_t label, int q) {
        return (label >> static_cast<unsigned>(n - 1 - q)) & 1U;
    };
    auto others_equal = [&](std::initializer_list<int> skip) {
        for (int q = 0; q < n; ++q) {
        bool skipped = false;
        for (int s : skip) {
            skipped = skipped || (s == q);
        }
        if (!skipped && bit(row, q) != bit(col, q)) {
            return false;
        }
        }
        return true;
    };

    if (arity(g.kind) == 1) {
        const int q = g.wires[0];
        if (!others_equal({q})) {
        return 0.0;
        }
        const double c = std::cos(g.angle / 2.0);
        const double s = std::sin(g.angle / 2.0);
        const double r = 1.0 / std::sqrt(2.0);
        const Complex h[2][2] = {{r, r}, {r, -r}};
        const Complex rx[2][2] = {{c, Complex(0, -s)}, {Complex(0, -s), c}};
        const Complex rz[2][2] = {{Complex(c, -s), 0.0}, {0.0, Complex(c, s)}};
        const auto &m = g.kind == GateKind::H ? h : (g.kind == GateKind::RX ? rx : rz);
        return m[bit(row, q)][bit(col, q)];
    }

    const int a = g.wires[0];
    const int b = g.wires[1];
    if (!others_equal({a, b})) {
        return 0.0;
    }
    const std::size_t r2 = 2 * bit(row, a) + bit(row, b);
    const std::size_t c2 = 2 * bit(col, a) + bit(col, b);
    if (g.kind == GateKind::CNOT) {
        static constexpr int perm[4] = {0, 1, 3, 2};
        return perm[c2] == static_cast<int>(r2) ? 1.0 : 0.0;
    }
    if (r2 != c2) {
        return 0.0;
    }
    const double zz = (r2 == 0 || r2 == 3) ? 1.0 : -1.0;
    return std::polar(1.0, -g.angle * zz / 2.0);
}

} // namespace

std::vector<Complex> dense_unitary_oracle(std::span<const Gate> circuit, int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxOracleQubits) {
        throw SizeError("dense oracle supports 1.." + std::to_string(kMaxOracleQubits) +
                " qubits, got " + std::to_string(n_qubits));
    }
    const std::size_t dim = std::size_t{1} << n_qubits;
    std::vector<Complex> total(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        total[i * dim + i] = 1.0;
    }
    std::vector<Complex> gate(dim * dim);
    std::vector<Complex> next(dim * dim);
    for (const auto &g : circuit) {
        g.validate(n_qubits);
        for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            gate[r * dim + c] = embedded_element(g, n_qubits, r, c);
        }
        }
        for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            Complex sum = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
            sum += gate[r * dim + k] * total[k * dim + c];
            }
            next[r * dim + c] = sum;
        }
        }
        total.swap(next);
    }
    return total;
}

} // namespace phn::sim
