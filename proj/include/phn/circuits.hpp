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
 * @file circuits.hpp
 * Symbolic ansatz descriptions (gate lists whose angles are bound to trainable
 * parameters, input features, or constants) and the two builders used by the
 * forecasting model and the diagnostics.
 */

#include <span>
#include <vector>

#include "json.hpp"
#include "phn/simulator.hpp"

namespace phn::circuits {

struct ParamBinding {
    enum class Kind { None, Trainable, Feature, Fixed };

    Kind kind = Kind::None;
    int index = 0;      // Trainable / Feature
    double value = 0.0; // Fixed, radians

    static ParamBinding none() { return {}; }
    static ParamBinding trainable(int i) { return {Kind::Trainable, i, 0.0}; }
    static ParamBinding feature(int i) { return {Kind::Feature, i, 0.0}; }
    static ParamBinding fixed(double radians) { return {Kind::Fixed, 0, radians}; }

    friend bool operator==(const ParamBinding &, const ParamBinding &) = default;
};

struct AnsatzGate {
    sim::GateKind kind = sim::GateKind::H;
    std::array<int, 2> wires{0, 0};
    ParamBinding binding;

    friend bool operator==(const AnsatzGate &, const AnsatzGate &) = default;
};

class AnsatzSpec {
  public:
    AnsatzSpec(int n_qubits, int n_features, std::vector<AnsatzGate> gates,
               sim::Observable observable);

    [[nodiscard]] int n_qubits() const { return n_qubits_; }
    [[nodiscard]] int n_features() const { return n_features_; }
    [[nodiscard]] int n_params() const { return n_params_; }
    [[nodiscard]] const std::vector<AnsatzGate> &gates() const { return gates_; }
    [[nodiscard]] const sim::Observable &observable() const { return observable_; }

    /// Substitutes parameter and feature values. Trainable gates keep their
    /// parameter index so the result can be differentiated directly.
    [[nodiscard]] sim::BoundCircuit bind(std::span<const double> params,
                                         std::span<const double> features) const;

    friend bool operator==(const AnsatzSpec &, const AnsatzSpec &) = default;

  private:
    int n_qubits_;
    int n_features_;
    int n_params_ = 0;
    std::vector<AnsatzGate> gates_;
    sim::Observable observable_;
};

/// The 5-qubit forecasting circuit: H layer, RZ/RX variational layer, RZ
/// feature encoding, an RZZ ring, an RX layer and a CNOT ring; Z on qubit 0.
/// 20 trainable angles.
AnsatzSpec build_production_ansatz();

/// The 2-qubit diagnostic circuit with `depth` repetitions of the final
/// trainable block; 4 + 3·depth trainable angles. ConfigError if depth < 1.
///
/// Each block is an XX coupling (RZZ conjugated by Hadamards on both wires)
/// followed by RX on each wire. The three generators XX, XI and IX commute,
/// so extra repetitions re-parameterize the same block. That is what keeps
/// the Fisher rank at 7 for every depth.
AnsatzSpec build_toy_ansatz(int depth);

/// ⟨observable⟩ of the bound circuit. ShapeError on length mismatch.
double evaluate(const AnsatzSpec &spec, std::span<const double> params,
                std::span<const double> features);

/// Basis-outcome distribution of the bound circuit.
std::vector<double> circuit_probabilities(const AnsatzSpec &spec, std::span<const double> params,
                                          std::span<const double> features);

/// Model output and its gradient with respect to the trainable parameters
/// (adjoint method).
double evaluate_with_gradient(const AnsatzSpec &spec, std::span<const double> params,
                              std::span<const double> features, std::span<double> gradient);

/// Jacobian of every basis probability (rows, 2^n) with respect to the
/// trainable parameters (cols). Probabilities are written to `probs`.
Matrix probability_jacobian(const AnsatzSpec &spec, std::span<const double> params,
                            std::span<const double> features, std::span<double> probs);

nlohmann::json to_json(const AnsatzSpec &spec);
/// Parses and validates; SpecError on malformed documents.
AnsatzSpec ansatz_from_json(const nlohmann::json &doc);

} // namespace phn::circuits
