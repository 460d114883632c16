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

#include <vector>

#include "phn/matrix.hpp"

namespace phn::linalg {

struct EigenDecomposition {
    /// Nonincreasing.
    std::vector<double> values;
    /// Column j is the unit eigenvector for values[j].
    Matrix vectors;
    int sweeps = 0;
    double off_diagonal_norm = 0.0;
};

/// Cyclic Jacobi eigensolver for a symmetric matrix. Sweeps over all (p, q)
/// pairs until the off-diagonal Frobenius norm drops below `tolerance`, or
/// stops improving at round-off level. Only the upper triangle is read.
EigenDecomposition jacobi_eigen(const Matrix &symmetric, double tolerance = 1e-10,
                                int max_sweeps = 100);

/// Number of eigenvalues greater than rel_tolerance × the largest |eigenvalue|.
/// For a symmetric PSD matrix these are its singular values.
int numerical_rank(const std::vector<double> &eigenvalues, double rel_tolerance);

} // namespace phn::linalg
