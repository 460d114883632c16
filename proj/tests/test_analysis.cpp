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
#include "phn/analysis.hpp"
#include "phn/error.hpp"
#include "phn/linalg.hpp"

using namespace phn;
using namespace phn::analysis;
using circuits::AnsatzGate;
using circuits::AnsatzSpec;
using circuits::ParamBinding;
using sim::GateKind;

namespace {

// RZ(x) then RX(θ0) on one qubit. The feature only adds a phase, so the
// outcome distribution is Bernoulli(cos²(θ0/2)) whose Fisher information is 1.
// An optional trailing RZ(θ1) has no effect on the probabilities at all.
AnsatzSpec single_qubit(bool idle_param) {
    std::vector<AnsatzGate> g{{GateKind::RZ, {0, 0}, ParamBinding::feature(0)},
                              {GateKind::RX, {0, 0}, ParamBinding::trainable(0)}};
    if (idle_param) {
        g.push_back({GateKind::RZ, {0, 0}, ParamBinding::trainable(1)});
    }
    return AnsatzSpec(1, 1, g, sim::Observable::pauli_z(0));
}

// H, RZ(x), H measured in Z gives <Z> = cos x.
AnsatzSpec cosine_model() {
    std::vector<AnsatzGate> g{{GateKind::H, {0, 0}, ParamBinding::none()},
                              {GateKind::RZ, {0, 0}, ParamBinding::feature(0)},
                              {GateKind::H, {0, 0}, ParamBinding::none()}};
    return AnsatzSpec(1, 1, g, sim::Observable::pauli_z(0));
}

Matrix identity(std::size_t n, double scale = 1.0) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = scale;
    }
    return m;
}

std::vector<double> uniform_theta(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(0.0, 2.0 * std::numbers::pi);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto &t : v) {
        t = d(rng);
    }
    return v;
}

double trace(const Matrix &m) {
    double t = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        t += m(i, i);
    }
    return t;
}

} // namespace

TEST_CASE("Fisher of a single-qubit rotation equals the sample count") {
    const auto xs = sample_features(25, 1, 3);
    for (double theta : {0.3, 1.0, 2.5}) {
        const std::vector<double> p{theta};
        const auto f = empirical_fisher(single_qubit(false), p, xs);
        CHECK(f.rows() == 1);
        CHECK(f(0, 0) == doctest::Approx(25.0).epsilon(1e-10));
    }
}

TEST_CASE("a parameter without effect gives a zero row and column") {
    const auto xs = sample_features(10, 1, 4);
    const std::vector<double> p{0.8, 1.9};
    const auto f = empirical_fisher(single_qubit(true), p, xs);
    CHECK(f(0, 0) == doctest::Approx(10.0));
    CHECK(std::abs(f(0, 1)) < 1e-12);
    CHECK(std::abs(f(1, 0)) < 1e-12);
    CHECK(std::abs(f(1, 1)) < 1e-12);
}

TEST_CASE("toy-ansatz Fisher is symmetric PSD and independent of exec") {
    const auto xs = sample_features(40, 2, 5);
    for (int depth : {1, 2, 3}) {
        const auto spec = circuits::build_toy_ansatz(depth);
        const auto theta = uniform_theta(spec.n_params(), 10 + depth);
        const auto a = empirical_fisher(spec, theta, xs, Exec::serial);
        const auto b = empirical_fisher(spec, theta, xs, Exec::parallel);
        CHECK(a == b);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            for (std::size_t j = 0; j < a.cols(); ++j) {
                CHECK(a(i, j) == a(j, i));
            }
        }
        const auto eig = linalg::jacobi_eigen(a);
        CHECK(eig.values.back() > -1e-9 * eig.values.front());
        CHECK(linalg::numerical_rank(eig.values, 1e-10) <= 7);
    }
    const std::vector<double> wrong(3, 0.0);
    CHECK_THROWS_AS(empirical_fisher(circuits::build_toy_ansatz(1), wrong, xs), ShapeError);
}

TEST_CASE("normalized Fisher") {
    Matrix a(2, 2);
    a(0, 0) = 3.0;
    a(1, 1) = 1.0;
    a(0, 1) = a(1, 0) = 0.5;
    Matrix b(2, 2);
    b(0, 0) = 1.0;
    b(1, 1) = 7.0;
    const auto n = normalized_fisher({a, b});
    CHECK((trace(n[0]) + trace(n[1])) / 2.0 == doctest::Approx(2.0));

    Matrix a3 = a;
    Matrix b3 = b;
    for (auto &v : a3.data()) {
        v *= 3.0;
    }
    for (auto &v : b3.data()) {
        v *= 3.0;
    }
    const auto n3 = normalized_fisher({a3, b3});
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(n3[0].data()[i] == doctest::Approx(n[0].data()[i]).epsilon(1e-14));
    }

    const auto id = normalized_fisher({identity(4, 2.5)});
    CHECK(id[0] == identity(4));
    CHECK_THROWS_AS(normalized_fisher({Matrix(3, 3)}), NumericError);
}

TEST_CASE("kappa and effective dimension") {
    CHECK(kappa(1.0, 4000.0) == doctest::Approx(4000.0 / (2.0 * std::numbers::pi * std::log(4000.0))));
    CHECK_THROWS_AS(kappa(0.0, 100.0), ConfigError);
    CHECK_THROWS_AS(kappa(1.5, 100.0), ConfigError);
    CHECK_THROWS_AS(kappa(1.0, 2.0), ConfigError);

    SUBCASE("zero Fisher gives zero") {
        CHECK(effective_dimension_kappa({Matrix(3, 3), Matrix(3, 3)}, 50.0) == 0.0);
    }
    SUBCASE("identity closed form P log(1 + k) / log k, decreasing toward P") {
        const std::vector<Matrix> fhat{identity(5), identity(5)};
        double prev = 1e300;
        for (double k : {2.0, 10.0, 100.0, 1e4, 1e8}) {
            const double d = effective_dimension_kappa(fhat, k);
            CHECK(d == doctest::Approx(5.0 * std::log1p(k) / std::log(k)).epsilon(1e-12));
            CHECK(d > 5.0);
            CHECK(d < prev);
            prev = d;
        }
    }
    SUBCASE("mixture matches direct evaluation") {
        // det(I + k F) for diagonal F is a product; average of the square roots.
        Matrix f1(2, 2);
        f1(0, 0) = 2.0;
        Matrix f2(2, 2);
        f2(0, 0) = 1.0;
        f2(1, 1) = 1.0;
        const double k = 30.0;
        const double mean = (std::sqrt(1 + 2 * k) + (1 + k)) / 2.0;
        CHECK(effective_dimension_kappa({f1, f2}, k) ==
              doctest::Approx(2.0 * std::log(mean) / std::log(k)).epsilon(1e-12));
        CHECK(effective_dimension({f1, f2}, 1.0, 4000.0) ==
              doctest::Approx(effective_dimension_kappa({f1, f2}, kappa(1.0, 4000.0))));
    }
    SUBCASE("large kappa does not overflow") {
        const std::vector<Matrix> fhat{identity(40, 50.0)};
        const double d = effective_dimension_kappa(fhat, 1e12);
        CHECK(std::isfinite(d));
        CHECK(d > 40.0);
    }
    CHECK_THROWS_AS(effective_dimension_kappa({identity(2)}, 1.0), NumericError);
    CHECK_THROWS_AS(effective_dimension_kappa({identity(2)}, 0.5), NumericError);
}

TEST_CASE("Fisher study on the toy ansatz") {
    FisherConfig cfg;
    cfg.n_feature_samples = 60;
    cfg.n_weight_realizations = 4;
    cfg.seed = 9;
    const std::vector<int> depths{1, 2};
    const auto study = average_fisher_study(depths, cfg);
    CHECK(study.low_sample);
    CHECK(study.kappa == doctest::Approx(kappa(1.0, 4000.0)));
    REQUIRE(study.depths.size() == 2);
    for (const auto &r : study.depths) {
        CHECK(r.n_params == 4 + 3 * r.depth);
        CHECK(r.realization_ranks.size() == 4);
        CHECK(r.eigenvalues.size() == 4u * static_cast<std::size_t>(r.n_params));
        double mean = 0.0;
        for (double e : r.eigenvalues) {
            mean += e;
        }
        mean /= static_cast<double>(r.eigenvalues.size());
        // Mean trace of F̂ is d, so the mean eigenvalue is 1.
        CHECK(mean == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(r.min_eigenvalue > -1e-9);
        CHECK(r.max_asymmetry < 1e-12);
        CHECK(r.average_rank <= r.n_params);
        CHECK(r.effective_dimension > 0.0);
        CHECK(r.effective_dimension <= r.n_params + 1e-9);
        CHECK(r.near_zero_fraction >= 0.0);
        CHECK(r.near_zero_fraction <= 1.0);
    }

    auto serial = cfg;
    serial.exec = Exec::serial;
    const auto again = average_fisher_study(depths, serial);
    CHECK(again.depths[1].eigenvalues == study.depths[1].eigenvalues);
    CHECK(again.depths[0].effective_dimension == study.depths[0].effective_dimension);

    const std::vector<int> bad{0};
    CHECK_THROWS_AS(average_fisher_study(bad, cfg), ConfigError);
    CHECK_THROWS_AS(average_fisher_study(std::vector<int>{}, cfg), ConfigError);
    auto zero = cfg;
    zero.n_weight_realizations = 0;
    CHECK_THROWS_AS(average_fisher_study(depths, zero), ConfigError);
}

TEST_CASE("histogram") {
    const std::vector<double> v{-1.0, 0.0, 0.1, 0.5, 0.99, 1.0, 3.0};
    const auto h = histogram(v, 4, 0.0, 1.0);
    CHECK(h == std::vector<std::size_t>{3, 0, 1, 3});
}

TEST_CASE("Fourier coefficients of cos x") {
    const auto t = fourier_coefficients(cosine_model(), {}, 8);
    CHECK(t.n_features == 1);
    CHECK(std::abs(t.at(1, 0) - Complex(0.5, 0.0)) < 1e-12);
    CHECK(std::abs(t.at(-1, 0) - Complex(0.5, 0.0)) < 1e-12);
    CHECK(std::abs(t.at(0, 0)) < 1e-12);
    CHECK(t.leakage < 1e-12);
    CHECK(std::abs(t.at(1, 1)) == 0.0);

    CHECK_THROWS_AS(fourier_coefficients(cosine_model(), {}, 2), ConfigError);
    const auto prod = circuits::build_production_ansatz();
    CHECK_THROWS_AS(fourier_coefficients(prod, std::vector<double>(20, 0.0), 8), SpecError);
}

TEST_CASE("toy-ansatz Fourier tables") {
    for (int depth : {1, 2, 3}) {
        const auto spec = circuits::build_toy_ansatz(depth);
        const auto theta = uniform_theta(spec.n_params(), 40 + depth);
        const auto t8 = fourier_coefficients(spec, theta, 8);
        const auto t16 = fourier_coefficients(spec, theta, 16, Exec::parallel);
        CHECK(t8.leakage < 1e-12);
        CHECK(std::abs(t8.at(0, 0).imag()) < 1e-12);
        for (int l1 = -1; l1 <= 1; ++l1) {
            for (int l2 = -1; l2 <= 1; ++l2) {
                // Real output: c_{-l} = conj(c_l).
                CHECK(std::abs(t8.at(l1, l2) - std::conj(t8.at(-l1, -l2))) < 1e-12);
                // No frequency above 1, so finer grids do not alias.
                CHECK(std::abs(t8.at(l1, l2) - t16.at(l1, l2)) < 1e-12);
            }
        }
        // Reconstruct f at an off-grid point from the nine coefficients.
        const std::vector<double> x{0.37, -2.1};
        Complex sum = 0.0;
        for (int l1 = -1; l1 <= 1; ++l1) {
            for (int l2 = -1; l2 <= 1; ++l2) {
                sum += t8.at(l1, l2) * std::exp(Complex(0.0, l1 * x[0] + l2 * x[1]));
            }
        }
        CHECK(sum.real() == doctest::Approx(circuits::evaluate(spec, theta, x)).epsilon(1e-10));
    }
}

TEST_CASE("Fourier clouds") {
    const auto spec = circuits::build_toy_ansatz(2);
    const auto a = fourier_cloud(spec, 30, 7);
    const auto b = fourier_cloud(spec, 30, 7, 8, Exec::serial);
    CHECK(a.samples.size() == 30);
    CHECK(a.thetas.size() == 30);
    CHECK(a.summary.size() == kReportedCoefficients.size());
    CHECK(a.max_leakage < 1e-12);
    CHECK(a.max_symmetry_error < 1e-12);
    CHECK(a.max_abs <= 1.0);
    CHECK(a.thetas == b.thetas);
    for (std::size_t i = 0; i < a.summary.size(); ++i) {
        const auto &s = a.summary[i];
        CHECK(s.l1 == kReportedCoefficients[i][0]);
        CHECK(s.l2 == kReportedCoefficients[i][1]);
        CHECK(s.min_abs <= s.abs_quantiles[2]);
        CHECK(s.abs_quantiles[2] <= s.max_abs);
        CHECK(s.abs_quantiles[0] == s.min_abs);
        CHECK(s.abs_quantiles[4] == s.max_abs);
        CHECK(s.phase_spread >= 0.0);
        CHECK(s.phase_spread <= 2.0);
        CHECK(s.max_abs == b.summary[i].max_abs);
    }
    CHECK_FALSE(fourier_cloud(spec, 5, 8).thetas == fourier_cloud(spec, 5, 7).thetas);
}
