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

#include "phn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phn/error.hpp"

namespace phn::linalg {

namespace {

double off_norm(const Matrix &a) {
    double s = 0.0;
    for (std::size_t p = 0; p < a.rows(); ++p) {
        for (std::size_t q = p + 1; q < a.cols(); ++q) {
            s += 2.0 * a(p, q) * a(p, q);
        }
    }
    return std::sqrt(s);
}

} // namespace

EigenDecomposition jacobi_eigen(const Matrix &symmetric, double tolerance, int max_sweeps) {
    const std::size_t n = symmetric.rows();
    if (symmetric.cols() != n) {
        throw ShapeError("jacobi_eigen needs a square matrix");
    }
    Matrix a(n, n);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p; q < n; ++q) {
            a(p, q) = symmetric(p, q);
            a(q, p) = symmetric(p, q);
        }
    }
    Matrix v = Matrix::identity(n);

    EigenDecomposition out;
    double off = off_norm(a);
    while (off >= tolerance && out.sweeps < max_sweeps) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                // Rotation angle chosen so the updated a(p, q) is zero.
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r != p && r != q) {
                        const double arp = a(r, p);
                        const double arq = a(r, q);
                        a(r, p) = arp - s * (arq + tau * arp);
                        a(p, r) = a(r, p);
                        a(r, q) = arq + s * (arp - tau * arq);
                        a(q, r) = a(r, q);
                    }
                    const double vrp = v(r, p);
                    const double vrq = v(r, q);
                    v(r, p) = vrp - s * (vrq + tau * vrp);
                    v(r, q) = vrq + s * (vrp - tau * vrq);
                }
            }
        }
        ++out.sweeps;
        const double next = off_norm(a);
        // Round-off floor: further sweeps only shuffle the last bits.
        if (next >= off) {
            off = next;
            break;
        }
        off = next;
    }
    out.off_diagonal_norm = off;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&a](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t r = 0; r < n; ++r) {
            out.vectors(r, j) = v(r, order[j]);
        }
    }
    return out;
}

int numerical_rank(const std::vector<double> &eigenvalues, double rel_tolerance) {
    double largest = 0.0;
    for (double e : eigenvalues) {
        largest = std::max(largest, std::abs(e));
    }
    if (largest == 0.0) {
        return 0;
    }
    return static_cast<int>(std::count_if(eigenvalues.begin(), eigenvalues.end(), [&](double e) {
        return std::abs(e) > rel_tolerance * largest;
    }));
}

} // namespace phn::linalg
