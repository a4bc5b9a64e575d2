// SPDX-License-Identifier: Apache-2.0
//
// cardiofocus: cardiac-point focusing, tracking and sparse heartbeat
// recovery for FMCW radar data cubes.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <span>
#include <vector>

#include "cardiofocus/types.hpp"

namespace cardiofocus {

// Small dense row-major matrix, enough for the dictionaries used here.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    std::vector<double> mul(std::span<const double> x) const;         // A x
    std::vector<double> mul_transposed(std::span<const double> y) const;  // A^T y
    void normalize_columns();
};

// h = Phi x + n with unit-norm dictionary columns.
struct SparseProblem {
    std::vector<double> h;
    DenseMatrix phi;
    double lambda_l1 = 1e-3;

    std::size_t code_length() const { return phi.cols; }
};

struct SparseTarget {
    std::vector<double> x;
    bool flagged = false;  // no peaks were available
};

struct SparseCode {
    std::vector<double> x;
    double hoyer = 0.0;  // normalized sparsity, (|x|1/|x|2 - 1)/(sqrt(m) - 1)
    std::vector<double> target;  // optional sparse ground truth, empty if unset
    std::vector<double> objective_trace;
    int iterations = 0;
};

// Sparse ground truth: the envelope value at each peak index, zero elsewhere.
SparseTarget make_sparse_target(const DisplacementSeries& sig,
                                const std::vector<std::size_t>& peaks);

// lambda_s * (|x|1 / |x|2 - 1) / (sqrt(m) - 1); in [0, lambda_s), zero iff
// exactly one nonzero. Throws on an all-zero vector.
double hoyer_penalty(std::span<const double> x, double lambda_s);

// |x - target|2 (unsquared) plus the sparsity penalty; for all-zero x the
// penalty term is lambda_s by convention.
double ssr_loss(std::span<const double> x, std::span<const double> target, double lambda_s);

// Analytic gradient of ssr_loss, valid away from x = 0, the x = target
// point and sign changes.
std::vector<double> ssr_loss_gradient(std::span<const double> x, std::span<const double> target,
                                      double lambda_s);

// Proximal gradient (ISTA) on 1/2 |h - Phi x|^2 + lambda_l1 |x|1 with step
// 1/L, L the largest squared singular value of Phi from power iteration.
// The internal objective is non-increasing across iterations.
SparseCode ssr_solve(const SparseProblem& prob, int max_iter = 2000, double tol = 1e-10);

// Convolutional dictionary: columns are unit-norm time-shifted copies of the
// first-vibration Gaussian pulse, one shift per sample.
DenseMatrix build_pulse_dictionary(std::size_t m, double rate_hz, double pulse_width_s);

}  // namespace cardiofocus
