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

#include "phn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "phn/error.hpp"
#include "phn/linalg.hpp"

namespace phn::analysis {

namespace {

constexpr double kProbabilityFloor = 1e-12;
constexpr std::size_t kLowSampleRealizations = 10;

std::vector<double> eigenvalues_of(const Matrix &m) {
    return linalg::jacobi_eigen(m, 1e-12).values;
}

std::vector<double> draw_angles(std::mt19937_64 &rng, int n) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::vector<double> theta(static_cast<std::size_t>(n));
    for (auto &t : theta) {
        t = angle(rng);
    }
    return theta;
}

double quantile(std::vector<double> sorted, double q) {
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

int frequency_of_bin(int j, int k) { return 2 * j <= k ? j : j - k; }

} // namespace

void validate(const FisherConfig &config) {
    if (config.n_feature_samples < 1 || config.n_weight_realizations < 1) {
        throw ConfigError("Fisher sample counts must be >= 1");
    }
    if (!(config.rank_tol > 0.0) || !(config.near_zero > 0.0) ||
        !(config.near_zero_relative > 0.0)) {
        throw ConfigError("Fisher thresholds must be > 0");
    }
}

Matrix sample_features(std::size_t n, int n_features, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix xs(n, static_cast<std::size_t>(n_features));
    for (auto &v : xs.data()) {
        v = gauss(rng);
    }
    return xs;
}

Matrix empirical_fisher(const circuits::AnsatzSpec &spec, std::span<const double> theta,
                        const Matrix &xs, Exec exec) {
    if (xs.cols() != static_cast<std::size_t>(spec.n_features())) {
        throw ShapeError("feature samples have " + std::to_string(xs.cols()) +
                         " columns, ansatz expects " + std::to_string(spec.n_features()));
    }
    const auto p = static_cast<std::size_t>(spec.n_params());
    const std::size_t dim = std::size_t{1} << spec.n_qubits();
    std::vector<Matrix> per_sample(xs.rows());
    for_each_index(exec, xs.rows(), [&](std::size_t i) {
        std::vector<double> probs(dim);
        const Matrix jac = circuits::probability_jacobian(spec, theta, xs.row(i), probs);
        Matrix f(p, p);
        for (std::size_t y = 0; y < dim; ++y) {
            if (probs[y] < kProbabilityFloor) {
                continue;
            }
            const auto g = jac.row(y);
            for (std::size_t a = 0; a < p; ++a) {
                const double ga = g[a] / probs[y];
                for (std::size_t b = a; b < p; ++b) {
                    f(a, b) += ga * g[b];
                }
            }
        }
        for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t b = 0; b < a; ++b) {
                f(a, b) = f(b, a);
            }
        }
        per_sample[i] = std::move(f);
    });
    Matrix total(p, p);
    for (const auto &f : per_sample) {
        for (std::size_t k = 0; k < total.data().size(); ++k) {
            total.data()[k] += f.data()[k];
        }
    }
    return total;
}

std::vector<Matrix> normalized_fisher(const std::vector<Matrix> &fisher) {
    if (fisher.empty()) {
        throw SizeError("normalized Fisher needs at least one matrix");
    }
    const std::size_t d = fisher.front().rows();
    double mean_trace = 0.0;
    for (const auto &f : fisher) {
        if (f.rows() != d || f.cols() != d) {
            throw ShapeError("Fisher matrices differ in size");
        }
        for (std::size_t i = 0; i < d; ++i) {
            mean_trace += f(i, i);
        }
    }
    mean_trace /= static_cast<double>(fisher.size());
    if (!(mean_trace > 0.0) || !std::isfinite(mean_trace)) {
        throw NumericError("degenerate model: mean Fisher trace is " + std::to_string(mean_trace));
    }
    const double scale = static_cast<double>(d) / mean_trace;
    std::vector<Matrix> out;
    out.reserve(fisher.size());
    for (const auto &f : fisher) {
        Matrix g = f;
        for (auto &v : g.data()) {
            v *= scale;
        }
        out.push_back(std::move(g));
    }
    return out;
}

double kappa(double gamma, double n_data) {
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw ConfigError("gamma must lie in (0, 1]");
    }
    if (!(n_data > std::numbers::e)) {
        throw ConfigError("n_data must exceed e");
    }
    return gamma * n_data / (2.0 * std::numbers::pi * std::log(n_data));
}

double effective_dimension(const std::vector<Matrix> &fhat, double gamma, double n_data) {
    return effective_dimension_kappa(fhat, kappa(gamma, n_data));
}

double effective_dimension_kappa(const std::vector<Matrix> &fhat, double kappa_value) {
    if (!(kappa_value > 1.0)) {
        throw NumericError("kappa = " + std::to_string(kappa_value) +
                           " <= 1 makes log(kappa) ill-conditioned");
    }
    if (fhat.empty()) {
        throw SizeError("effective dimension needs at least one matrix");
    }
    std::vector<double> log_sqrt_det(fhat.size());
    for (std::size_t i = 0; i < fhat.size(); ++i) {
        double s = 0.0;
        for (double lambda : eigenvalues_of(fhat[i])) {
            const double term = 1.0 + kappa_value * lambda;
            if (!(term > 0.0)) {
                throw NumericError("I + kappa F is not positive definite");
            }
            s += std::log(term);
        }
        log_sqrt_det[i] = 0.5 * s;
    }
    const double peak = *std::max_element(log_sqrt_det.begin(), log_sqrt_det.end());
    double acc = 0.0;
    for (double v : log_sqrt_det) {
        acc += std::exp(v - peak);
    }
    const double log_mean = peak + std::log(acc / static_cast<double>(fhat.size()));
    return 2.0 * log_mean / std::log(kappa_value);
}

FisherStudy average_fisher_study(std::span<const int> depths, const FisherConfig &config,
                                 const EffDimConfig &effdim) {
    validate(config);
    if (depths.empty()) {
        throw ConfigError("depth list is empty");
    }
    for (int d : depths) {
        if (d < 1) {
            throw ConfigError("depth " + std::to_string(d) + " is not >= 1");
        }
    }
    FisherStudy study;
    study.config = config;
    study.effdim = effdim;
    study.kappa = kappa(effdim.gamma, effdim.n_data);
    study.low_sample = config.n_weight_realizations < kLowSampleRealizations;

    const Matrix xs = sample_features(config.n_feature_samples, 2, config.seed);
    for (int depth : depths) {
        const auto spec = circuits::build_toy_ansatz(depth);
        const auto p = static_cast<std::size_t>(spec.n_params());
        std::seed_seq seq{config.seed, std::uint64_t{0x4649534845ULL},
                          static_cast<std::uint64_t>(depth)};
        std::mt19937_64 rng(seq);

        std::vector<Matrix> fisher;
        fisher.reserve(config.n_weight_realizations);
        for (std::size_t r = 0; r < config.n_weight_realizations; ++r) {
            const auto theta = draw_angles(rng, spec.n_params());
            fisher.push_back(empirical_fisher(spec, theta, xs, config.exec));
        }

        DepthReport rep;
        rep.depth = depth;
        rep.n_params = spec.n_params();
        rep.average = Matrix(p, p);
        for (const auto &f : fisher) {
            for (std::size_t a = 0; a < p; ++a) {
                for (std::size_t b = 0; b < p; ++b) {
                    rep.average(a, b) += f(a, b);
                    rep.max_asymmetry = std::max(rep.max_asymmetry, std::abs(f(a, b) - f(b, a)));
                }
            }
            rep.realization_ranks.push_back(
                linalg::numerical_rank(eigenvalues_of(f), config.rank_tol));
        }
        for (auto &v : rep.average.data()) {
            v /= static_cast<double>(fisher.size());
        }
        rep.average_rank = linalg::numerical_rank(eigenvalues_of(rep.average), config.rank_tol);

        const auto fhat = normalized_fisher(fisher);
        std::size_t near = 0;
        std::size_t near_rel = 0;
        rep.min_eigenvalue = std::numeric_limits<double>::infinity();
        for (const auto &m : fhat) {
            const auto ev = eigenvalues_of(m);
            const double top = ev.front();
            for (double v : ev) {
                near += v < config.near_zero;
                near_rel += v < config.near_zero_relative * top;
                rep.min_eigenvalue = std::min(rep.min_eigenvalue, v);
            }
            rep.eigenvalues.insert(rep.eigenvalues.end(), ev.begin(), ev.end());
        }
        const auto total = static_cast<double>(rep.eigenvalues.size());
        rep.near_zero_fraction = static_cast<double>(near) / total;
        rep.near_zero_fraction_relative = static_cast<double>(near_rel) / total;
        rep.effective_dimension = effective_dimension_kappa(fhat, study.kappa);
        study.depths.push_back(std::move(rep));
    }
    return study;
}

std::vector<std::size_t> histogram(std::span<const double> values, std::size_t n_bins, double lo,
                                   double hi) {
    if (n_bins < 1 || !(hi > lo)) {
        throw ConfigError("histogram needs at least one bin and hi > lo");
    }
    std::vector<std::size_t> counts(n_bins, 0);
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (double v : values) {
        const double pos = std::floor((v - lo) / width);
        const auto bin = static_cast<std::size_t>(
            std::clamp(pos, 0.0, static_cast<double>(n_bins - 1)));
        ++counts[bin];
    }
    return counts;
}

FourierTable fourier_coefficients(const circuits::AnsatzSpec &spec, std::span<const double> theta,
                                  int grid, Exec exec) {
    if (grid < 3) {
        throw ConfigError("Fourier grid K = " + std::to_string(grid) +
                          " is below the Nyquist minimum of 3 for frequencies |l| <= 1");
    }
    const int nf = spec.n_features();
    if (nf != 1 && nf != 2) {
        throw SpecError("Fourier analysis needs an ansatz with 1 or 2 features, got " +
                        std::to_string(nf));
    }
    const auto k = static_cast<std::size_t>(grid);
    const std::size_t k2 = nf == 2 ? k : 1;
    const double step = 2.0 * std::numbers::pi / static_cast<double>(grid);

    std::vector<double> f(k * k2);
    for_each_index(exec, f.size(), [&](std::size_t idx) {
        const std::size_t a = idx / k2;
        const std::size_t b = idx % k2;
        std::array<double, 2> x{step * static_cast<double>(a), step * static_cast<double>(b)};
        f[idx] = circuits::evaluate(spec, theta, std::span(x.data(), static_cast<std::size_t>(nf)));
    });

    FourierTable table;
    table.n_features = nf;
    const double norm = 1.0 / static_cast<double>(f.size());
    for (std::size_t j1 = 0; j1 < k; ++j1) {
        for (std::size_t j2 = 0; j2 < k2; ++j2) {
            Complex sum(0.0, 0.0);
            for (std::size_t a = 0; a < k; ++a) {
                for (std::size_t b = 0; b < k2; ++b) {
                    // Exact integer phase index keeps the twiddles symmetric.
                    const std::size_t m = (j1 * a) % k + (j2 * b) % k;
                    const double phase = -step * static_cast<double>(m % k);
                    sum += f[a * k2 + b] * Complex(std::cos(phase), std::sin(phase));
                }
            }
            sum *= norm;
            const int l1 = frequency_of_bin(static_cast<int>(j1), grid);
            const int l2 = nf == 2 ? frequency_of_bin(static_cast<int>(j2), grid) : 0;
            if (std::abs(l1) <= 1 && std::abs(l2) <= 1) {
                table.c[static_cast<std::size_t>(l1 + 1)][static_cast<std::size_t>(l2 + 1)] = sum;
            } else {
                table.leakage = std::max(table.leakage, std::abs(sum));
            }
        }
    }
    return table;
}

FourierCloud fourier_cloud(const circuits::AnsatzSpec &spec, std::size_t n_samples,
                           std::uint64_t seed, int grid, Exec exec) {
    if (n_samples < 1) {
        throw ConfigError("Fourier cloud needs at least one sample");
    }
    FourierCloud cloud;
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < n_samples; ++s) {
        cloud.thetas.push_back(draw_angles(rng, spec.n_params()));
    }
    cloud.samples.resize(n_samples);
    for_each_index(exec, n_samples, [&](std::size_t s) {
        cloud.samples[s] = fourier_coefficients(spec, cloud.thetas[s], grid, Exec::serial);
    });

    const int l2_max = spec.n_features() == 2 ? 1 : 0;
    for (const auto &t : cloud.samples) {
        cloud.max_leakage = std::max(cloud.max_leakage, t.leakage);
        for (int l1 = -1; l1 <= 1; ++l1) {
            for (int l2 = -l2_max; l2 <= l2_max; ++l2) {
                cloud.max_abs = std::max(cloud.max_abs, std::abs(t.at(l1, l2)));
                cloud.max_symmetry_error = std::max(
                    cloud.max_symmetry_error, std::abs(t.at(l1, l2) - std::conj(t.at(-l1, -l2))));
            }
        }
    }

    for (const auto &[l1, l2] : kReportedCoefficients) {
        if (std::abs(l2) > l2_max) {
            continue;
        }
        CoefficientSummary s;
        s.l1 = l1;
        s.l2 = l2;
        std::vector<double> mags;
        Complex unit_sum(0.0, 0.0);
        for (const auto &t : cloud.samples) {
            const Complex c = t.at(l1, l2);
            mags.push_back(std::abs(c));
            s.max_abs_imag = std::max(s.max_abs_imag, std::abs(c.imag()));
            if (std::abs(c) > 0.0) {
                unit_sum += c / std::abs(c);
            }
        }
        s.max_abs = *std::max_element(mags.begin(), mags.end());
        s.min_abs = *std::min_element(mags.begin(), mags.end());
        for (std::size_t q = 0; q < 5; ++q) {
            s.abs_quantiles[q] = quantile(mags, 0.25 * static_cast<double>(q));
        }
        s.phase_spread = 1.0 - std::abs(unit_sum) / static_cast<double>(n_samples);
        cloud.summary.push_back(s);
    }
    return cloud;
}

} // namespace phn::analysis
