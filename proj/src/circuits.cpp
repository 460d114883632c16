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

#include "phn/circuits.hpp"

#include <algorithm>
#include <string>

#include "phn/error.hpp"

namespace phn::circuits {

using sim::GateKind;

namespace {

void check_length(std::string_view what, std::size_t got, int expected) {
    if (got != static_cast<std::size_t>(expected)) {
        throw ShapeError(std::string(what) + " has " + std::to_string(got) + " entries, expected " +
                         std::to_string(expected));
    }
}

AnsatzGate make(GateKind kind, int a, int b = 0, ParamBinding binding = ParamBinding::none()) {
    return {kind, {a, b}, binding};
}

} // namespace

AnsatzSpec::AnsatzSpec(int n_qubits, int n_features, std::vector<AnsatzGate> gates,
                       sim::Observable observable)
    : n_qubits_(n_qubits), n_features_(n_features), gates_(std::move(gates)),
      observable_(observable) {
    if (n_qubits < 1 || n_qubits > sim::kMaxQubits) {
        throw SizeError("ansatz qubit count " + std::to_string(n_qubits) + " out of range");
    }
    if (n_features < 0) {
        throw SpecError("negative feature count");
    }
    observable_.validate(n_qubits);

    std::vector<bool> seen;
    for (std::size_t i = 0; i < gates_.size(); ++i) {
        const auto &g = gates_[i];
        sim::Gate{g.kind, g.wires, 0.0}.validate(n_qubits);
        const bool parameterized = sim::is_parameterized(g.kind);
        const auto where = "gate " + std::to_string(i) + " (" + std::string(sim::to_string(g.kind)) + ")";
        using K = ParamBinding::Kind;
        if (!parameterized && g.binding.kind != K::None) {
            throw SpecError(where + " takes no angle but has a binding");
        }
        if (parameterized && g.binding.kind == K::None) {
            throw SpecError(where + " needs an angle binding");
        }
        if (g.binding.kind == K::Feature &&
            (g.binding.index < 0 || g.binding.index >= n_features)) {
            throw SpecError(where + " feature index " + std::to_string(g.binding.index) +
                            " >= feature count " + std::to_string(n_features));
        }
        if (g.binding.kind == K::Trainable) {
            if (g.binding.index < 0) {
                throw SpecError(where + " has a negative parameter index");
            }
            const auto idx = static_cast<std::size_t>(g.binding.index);
            if (idx >= seen.size()) {
                seen.resize(idx + 1, false);
            }
            seen[idx] = true;
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw SpecError("trainable parameter indices are not contiguous from 0");
    }
    n_params_ = static_cast<int>(seen.size());
}

sim::BoundCircuit AnsatzSpec::bind(std::span<const double> params,
                                   std::span<const double> features) const {
    check_length("parameter vector", params.size(), n_params_);
    check_length("feature vector", features.size(), n_features_);
    sim::BoundCircuit circuit;
    circuit.n_qubits = n_qubits_;
    circuit.n_trainable = n_params_;
    circuit.gates.reserve(gates_.size());
    for (const auto &g : gates_) {
        sim::BoundGate bg{{g.kind, g.wires, 0.0}, -1};
        switch (g.binding.kind) {
        case ParamBinding::Kind::None:
            break;
        case ParamBinding::Kind::Trainable:
            bg.gate.angle = params[static_cast<std::size_t>(g.binding.index)];
            bg.trainable = g.binding.index;
            break;
        case ParamBinding::Kind::Feature:
            bg.gate.angle = features[static_cast<std::size_t>(g.binding.index)];
            break;
        case ParamBinding::Kind::Fixed:
            bg.gate.angle = g.binding.value;
            break;
        }
        circuit.gates.push_back(bg);
    }
    return circuit;
}

AnsatzSpec build_production_ansatz() {
    constexpr int n = 5;
    std::vector<AnsatzGate> gates;
    int p = 0;
    for (int q = 0; q < n; ++q) {
        gates.push_back(make(GateKind::H, q));
    }
    for (int q = 0; q < n; ++q) {
        gates.push_back(make(GateKind::RZ, q, 0, ParamBinding::trainable(p++)));
        gates.push_back(make(GateKind::RX, q, 0, ParamBinding::trainable(p++)));
    }
    for (int q = 0; q < n; ++q) {
        gates.push_back(make(GateKind::RZ, q, 0, ParamBinding::feature(q)));
    }
    for (int q = 0; q < n; ++q) {
        gates.push_back(make(GateKind::RZZ, q, (q + 1) % n, ParamBinding::trainable(p++)));
    }
    for (int q = 0; q < n; ++q) {
        gates.push_back(make(GateKind::RX, q, 0, ParamBinding::trainable(p++)));
    }
    for (int q = 0; q < n; ++q) {
        gates.push_back(make(GateKind::CNOT, q, (q + 1) % n));
    }
    return {n, n, std::move(gates), sim::Observable::pauli_z(0)};
}

AnsatzSpec build_toy_ansatz(int depth) {
    if (depth < 1) {
        throw ConfigError("toy ansatz depth must be >= 1, got " + std::to_string(depth));
    }
    std::vector<AnsatzGate> gates;
    int p = 0;
    gates.push_back(make(GateKind::H, 0));
    gates.push_back(make(GateKind::H, 1));
    for (int q = 0; q < 2; ++q) {
        gates.push_back(make(GateKind::RZ, q, 0, ParamBinding::trainable(p++)));
        gates.push_back(make(GateKind::RX, q, 0, ParamBinding::trainable(p++)));
    }
    gates.push_back(make(GateKind::RZ, 0, 0, ParamBinding::feature(0)));
    gates.push_back(make(GateKind::RZ, 1, 0, ParamBinding::feature(1)));
    for (int r = 0; r < depth; ++r) {
        gates.push_back(make(GateKind::H, 0));
        gates.push_back(make(GateKind::H, 1));
        gates.push_back(make(GateKind::RZZ, 0, 1, ParamBinding::trainable(p++)));
        gates.push_back(make(GateKind::H, 0));
        gates.push_back(make(GateKind::H, 1));
        gates.push_back(make(GateKind::RX, 0, 0, ParamBinding::trainable(p++)));
        gates.push_back(make(GateKind::RX, 1, 0, ParamBinding::trainable(p++)));
    }
    return {2, 2, std::move(gates), sim::Observable::pauli_z(0)};
}

double evaluate(const AnsatzSpec &spec, std::span<const double> params,
                std::span<const double> features) {
    return sim::expectation(sim::run(spec.bind(params, features)), spec.observable());
}

std::vector<double> circuit_probabilities(const AnsatzSpec &spec, std::span<const double> params,
                                          std::span<const double> features) {
    return sim::probabilities(sim::run(spec.bind(params, features)));
}

double evaluate_with_gradient(const AnsatzSpec &spec, std::span<const double> params,
                              std::span<const double> features, std::span<double> gradient) {
    return sim::adjoint_value_and_gradient(spec.bind(params, features), spec.observable(),
                                           gradient);
}

Matrix probability_jacobian(const AnsatzSpec &spec, std::span<const double> params,
                            std::span<const double> features, std::span<double> probs) {
    const std::size_t dim = std::size_t{1} << spec.n_qubits();
    check_length("probability buffer", probs.size(), static_cast<int>(dim));
    std::vector<sim::Observable> projectors;
    projectors.reserve(dim);
    for (std::size_t y = 0; y < dim; ++y) {
        projectors.push_back(sim::Observable::projector(spec.n_qubits(), y));
    }
    return sim::adjoint_jacobian(spec.bind(params, features), projectors, probs);
}

nlohmann::json to_json(const AnsatzSpec &spec) {
    using nlohmann::json;
    json gates = json::array();
    for (const auto &g : spec.gates()) {
        json jg;
        jg["kind"] = sim::to_string(g.kind);
        jg["wires"] = sim::arity(g.kind) == 2 ? json::array({g.wires[0], g.wires[1]})
                                              : json::array({g.wires[0]});
        switch (g.binding.kind) {
        case ParamBinding::Kind::None:
            break;
        case ParamBinding::Kind::Trainable:
            jg["binding"] = {{"type", "trainable"}, {"index", g.binding.index}};
            break;
        case ParamBinding::Kind::Feature:
            jg["binding"] = {{"type", "feature"}, {"index", g.binding.index}};
            break;
        case ParamBinding::Kind::Fixed:
            jg["binding"] = {{"type", "fixed"}, {"value", g.binding.value}};
            break;
        }
        gates.push_back(std::move(jg));
    }
    json obs;
    const auto &o = spec.observable();
    if (o.kind() == sim::Observable::Kind::PauliZ) {
        obs = {{"kind", "Z"}, {"qubit", o.qubit()}};
    } else {
        std::string bits(static_cast<std::size_t>(o.n_qubits()), '0');
        for (int q = 0; q < o.n_qubits(); ++q) {
            if ((o.basis_index() >> static_cast<unsigned>(o.n_qubits() - 1 - q)) & 1U) {
                bits[static_cast<std::size_t>(q)] = '1';
            }
        }
        obs = {{"kind", "projector"}, {"bitstring", bits}};
    }
    return {{"format", "phn-ansatz"},
            {"version", 1},
            {"n_qubits", spec.n_qubits()},
            {"n_features", spec.n_features()},
            {"n_params", spec.n_params()},
            {"observable", obs},
            {"gates", gates}};
}

AnsatzSpec ansatz_from_json(const nlohmann::json &doc) {
    try {
        if (doc.value("format", std::string{}) != "phn-ansatz") {
            throw SpecError("not a phn-ansatz document");
        }
        const int n_qubits = doc.at("n_qubits").get<int>();
        const int n_features = doc.at("n_features").get<int>();
        std::vector<AnsatzGate> gates;
        for (const auto &jg : doc.at("gates")) {
            AnsatzGate g;
            g.kind = sim::gate_kind_from_string(jg.at("kind").get<std::string>());
            const auto wires = jg.at("wires").get<std::vector<int>>();
            if (wires.size() != static_cast<std::size_t>(sim::arity(g.kind))) {
                throw SpecError(std::string(sim::to_string(g.kind)) + " expects " +
                                std::to_string(sim::arity(g.kind)) + " wires");
            }
            g.wires[0] = wires[0];
            g.wires[1] = wires.size() > 1 ? wires[1] : 0;
            if (jg.contains("binding")) {
                const auto &b = jg.at("binding");
                const auto type = b.at("type").get<std::string>();
                if (type == "trainable") {
                    g.binding = ParamBinding::trainable(b.at("index").get<int>());
                } else if (type == "feature") {
                    g.binding = ParamBinding::feature(b.at("index").get<int>());
                } else if (type == "fixed") {
                    g.binding = ParamBinding::fixed(b.at("value").get<double>());
                } else {
                    throw SpecError("unknown binding type '" + type + "'");
                }
            }
            gates.push_back(g);
        }
        const auto &jo = doc.at("observable");
        const auto kind = jo.at("kind").get<std::string>();
        sim::Observable obs = kind == "Z" ? sim::Observable::pauli_z(jo.at("qubit").get<int>())
                              : kind == "projector"
                                  ? sim::Observable::projector(jo.at("bitstring").get<std::string>())
                                  : throw SpecError("unknown observable kind '" + kind + "'");
        AnsatzSpec spec(n_qubits, n_features, std::move(gates), obs);
        if (doc.contains("n_params") && doc.at("n_params").get<int>() != spec.n_params()) {
            throw SpecError("n_params header disagrees with the gate list");
        }
        return spec;
    } catch (const nlohmann::json::exception &e) {
        throw SpecError(std::string("malformed ansatz document: ") + e.what());
    }
}

} // namespace phn::circuits
