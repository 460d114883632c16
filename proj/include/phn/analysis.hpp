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
 * @file analysis.hpp
 * Diagnostics for small ansätze: empirical Fisher information over basis-state
 * outcomes, the normalized Fisher matrix, effective dimension, and Fourier
 * coefficient clouds of the model output as a function of its two inputs.
 */

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "phn/circuits.hpp"
#include "phn/exec.hpp"
#include "phn/matrix.hpp"

namespace phn::analysis {

struct FisherConfig {
    std::size_t n_feature_samples = 1000;
    std::size_t n_weight_realizations = 100;
    /// Rank counts eigenvalues above rank_tol × largest.
    double rank_tol = 1e-10;
    /// Near-zero cutoff on the normalized scale (mean eigenvalue of F̂ is 1).
    double near_zero = 0.5;
    /// Alternative cutoff relative to each realization's largest eigenvalue,
    /// reported alongside.
    double near_zero_relative = 1e-3;
    std::uint64_t seed = 0;
    Exec exec = Exec::parallel;
};

/// ConfigError unless counts ≥ 1 and thresholds > 0.
void validate(const FisherConfig &config);

/// n × n_features matrix of standard-normal draws.
Matrix sample_features(std::size_t n, int n_features, std::uint64_t seed);

/// F(θ) = Σ_x Σ_y ∇P(y|x,θ) ∇P(y|x,θ)ᵀ / P(y|x,θ), y over all basis states,
/// x over the rows of `xs`. Terms with P < 1e-12 are skipped. Per-sample
/// matrices are summed in row order, so the result does not depend on `exec`.
Matrix empirical_fisher(const circuits::AnsatzSpec &spec, std::span<const double> theta,
                        const Matrix &xs, Exec exec = Exec::parallel);

/// F̂_i = d · F_i / mean_j Tr F_j with d the matrix size. NumericError when
/// the mean trace is not positive.
std::vector<Matrix> normalized_fisher(const std::vector<Matrix> &fisher);

/// κ = γ n / (2π log n). ConfigError for γ outside (0, 1] or n ≤ e.
double kappa(double gamma, double n_data);

/// d = 2 log( mean_i √det(I + κ F̂_i) ) / log κ, via eigenvalues and a
/// log-sum-exp over samples. NumericError if κ ≤ 1.
double effective_dimension(const std::vector<Matrix> &fhat, double gamma, double n_data);
double effective_dimension_kappa(const std::vector<Matrix> &fhat, double kappa_value);

struct EffDimConfig {
    double gamma = 1.0;
    double n_data = 4000.0;
};

struct DepthReport {
    int depth = 0;
    int n_params = 0;
    Matrix average;
    int average_rank = 0;
    std::vector<int> realization_ranks;
    /// Eigenvalues of every F̂_i, realization-major, each block descending.
    std::vector<double> eigenvalues;
    double near_zero_fraction = 0.0;
    double near_zero_fraction_relative = 0.0;
    double effective_dimension = 0.0;
    double min_eigenvalue = 0.0;
    double max_asymmetry = 0.0;
};

struct FisherStudy {
    FisherConfig config;
    EffDimConfig effdim;
    double kappa = 0.0;
    std::vector<DepthReport> depths;
    /// Set when fewer than 10 weight realizations were drawn.
    bool low_sample = false;
};

/// Toy-ansatz study. x samples are drawn once and shared by every depth and
/// realization; θ draws for each depth come from their own seeded stream.
/// ConfigError for an empty depth list or a depth < 1.
FisherStudy average_fisher_study(std::span<const int> depths, const FisherConfig &config,
                                 const EffDimConfig &effdim = {});

/// Counts of `values` in n_bins equal bins over [lo, hi]; values outside are
/// clamped into the end bins.
std::vector<std::size_t> histogram(std::span<const double> values, std::size_t n_bins, double lo,
                                   double hi);

// ---------------------------------------------------------------------------
// Fourier accessibility

using Complex = sim::Complex;

/// Coefficients c[l1 + 1][l2 + 1] for l1, l2 ∈ {-1, 0, 1}. One-feature models
/// use only the l2 = 0 column.
struct FourierTable {
    std::array<std::array<Complex, 3>, 3> c{};
    double leakage = 0.0;
    int n_features = 0;

    [[nodiscard]] Complex at(int l1, int l2) const { return c[l1 + 1][l2 + 1]; }
};

/// Samples f(θ, x) on a K-point (or K×K) grid over [0, 2π), takes the DFT
/// scaled by 1/K per axis and maps bins to frequencies in (-K/2, K/2].
/// ConfigError (Nyquist) for K < 3, SpecError unless the ansatz has 1 or 2
/// features.
FourierTable fourier_coefficients(const circuits::AnsatzSpec &spec, std::span<const double> theta,
                                  int grid = 8, Exec exec = Exec::serial);

/// The six clouds reported: half plane l1 ∈ {0, 1}; the other three follow by
/// conjugation.
inline constexpr std::array<std::array<int, 2>, 6> kReportedCoefficients{
    {{0, -1}, {0, 0}, {0, 1}, {1, -1}, {1, 0}, {1, 1}}};

struct CoefficientSummary {
    int l1 = 0;
    int l2 = 0;
    double max_abs = 0.0;
    double min_abs = 0.0;
    /// |c| at the 0, 25, 50, 75 and 100 % quantiles.
    std::array<double, 5> abs_quantiles{};
    /// 1 - |mean of e^{i arg c}|; 0 when every sample has the same phase.
    double phase_spread = 0.0;
    double max_abs_imag = 0.0;
};

struct FourierCloud {
    std::vector<std::vector<double>> thetas;
    std::vector<FourierTable> samples;
    std::vector<CoefficientSummary> summary; // one per kReportedCoefficients
    double max_leakage = 0.0;
    /// max |c_{l1,l2} - conj(c_{-l1,-l2})| over samples and coefficients.
    double max_symmetry_error = 0.0;
    double max_abs = 0.0;
};

/// θ ~ U[0, 2π)^P for each of n_samples draws (sequential stream from `seed`),
/// then one coefficient table per draw.
FourierCloud fourier_cloud(const circuits::AnsatzSpec &spec, std::size_t n_samples,
                           std::uint64_t seed, int grid = 8, Exec exec = Exec::parallel);

} // namespace phn::analysis
