// SPDX-License-Identifier: Apache-2.0
//
// cardiofocus: cardiac-point focusing, tracking and sparse heartbeat
// recovery for FMCW radar data cubes.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "cardiofocus/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cardiofocus/snr_cost.hpp"

namespace cardiofocus {

std::vector<double> DenseMatrix::mul(std::span<const double> x) const {
    if (x.size() != cols) throw std::invalid_argument("DenseMatrix::mul: size mismatch");
    std::vector<double> y(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = a.data() + r * cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
    return y;
}

std::vector<double> DenseMatrix::mul_transposed(std::span<const double> y) const {
    if (y.size() != rows) throw std::invalid_argument("DenseMatrix::mul_transposed: size mismatch");
    std::vector<double> x(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = a.data() + r * cols;
        const double yr = y[r];
        for (std::size_t c = 0; c < cols; ++c) x[c] += row[c] * yr;
    }
    return x;
}

void DenseMatrix::normalize_columns() {
    for (std::size_t c = 0; c < cols; ++c) {
        double norm = 0.0;
        for (std::size_t r = 0; r < rows; ++r) norm += at(r, c) * at(r, c);
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (std::size_t r = 0; r < rows; ++r) at(r, c) /= norm;
    }
}

SparseTarget make_sparse_target(const DisplacementSeries& sig,
                                const std::vector<std::size_t>& peaks) {
    SparseTarget out;
    out.x.assign(sig.samples.size(), 0.0);
    if (peaks.empty()) {
        out.flagged = true;
        return out;
    }
    DisplacementSeries env;
    try {
        env = envelope(sig);
    } catch (const std::exception&) {
        out.flagged = true;
        return out;
    }
    for (std::size_t p : peaks) {
        if (p >= out.x.size()) throw std::out_of_range("make_sparse_target: peak index out of bounds");
        out.x[p] = env.samples[p];
    }
    return out;
}

namespace {

double norm1(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
}

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

}  // namespace

double hoyer_penalty(std::span<const double> x, double lambda_s) {
    if (lambda_s < 0.0) throw std::invalid_argument("hoyer_penalty: negative lambda_s");
    const double l2 = norm2(x);
    if (l2 == 0.0) throw std::invalid_argument("hoyer_penalty: all-zero vector");
    if (x.size() < 2) return 0.0;  // a single element is one-hot by definition
    const double m_term = std::sqrt(static_cast<double>(x.size())) - 1.0;
    return lambda_s * (norm1(x) / l2 - 1.0) / m_term;
}

double ssr_loss(std::span<const double> x, std::span<const double> target, double lambda_s) {
    if (x.size() != target.size()) throw std::invalid_argument("ssr_loss: size mismatch");
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - target[i];
        d2 += d * d;
    }
    const double l2 = norm2(x);
    const double penalty = l2 == 0.0 ? lambda_s : hoyer_penalty(x, lambda_s);
    return std::sqrt(d2) + penalty;
}

std::vector<double> ssr_loss_gradient(std::span<const double> x, std::span<const double> target,
                                      double lambda_s) {
    if (x.size() != target.size()) throw std::invalid_argument("ssr_loss_gradient: size mismatch");
    const std::size_t m = x.size();
    double d2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double d = x[i] - target[i];
        d2 += d * d;
    }
    const double dist = std::sqrt(d2);
    const double l1 = norm1(x);
    const double l2 = norm2(x);
    if (dist == 0.0 || l2 == 0.0)
        throw std::domain_error("ssr_loss_gradient: not differentiable at this point");

    const double m_term = std::sqrt(static_cast<double>(m)) - 1.0;
    std::vector<double> g(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double sign = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
        const double d_ratio = sign / l2 - l1 * x[i] / (l2 * l2 * l2);
        g[i] = (x[i] - target[i]) / dist + lambda_s * d_ratio / m_term;
    }
    return g;
}

namespace {

double largest_squared_singular_value(const DenseMatrix& phi) {
    std::vector<double> v(phi.cols, 1.0 / std::sqrt(static_cast<double>(phi.cols)));
    double lambda = 0.0;
    for (int it = 0; it < 100; ++it) {
        std::vector<double> w = phi.mul_transposed(phi.mul(v));
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        for (double& x : w) x /= norm;
        const double prev = lambda;
        lambda = norm;
        v.swap(w);
        if (it > 4 && std::abs(lambda - prev) <= 1e-12 * lambda) break;
    }
    return lambda;
}

}  // namespace

SparseCode ssr_solve(const SparseProblem& prob, int max_iter, double tol) {
    if (prob.lambda_l1 <= 0.0) throw std::invalid_argument("ssr_solve: lambda_l1 must be positive");
    if (prob.phi.rows != prob.h.size()) throw std::invalid_argument("ssr_solve: h/Phi size mismatch");
    for (double v : prob.h)
        if (!std::isfinite(v)) throw std::invalid_argument("ssr_solve: non-finite entry in h");
    for (double v : prob.phi.a)
        if (!std::isfinite(v)) throw std::invalid_argument("ssr_solve: non-finite entry in Phi");

    const std::size_t m = prob.code_length();
    const double lip = std::max(largest_squared_singular_value(prob.phi), 1e-12);
    const double step = 1.0 / lip;
    const double thresh = prob.lambda_l1 * step;

    std::vector<double> x(m, 0.0);
    SparseCode out;

    auto objective = [&](const std::vector<double>& z) {
        const std::vector<double> r = prob.phi.mul(z);
        double fit = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double d = r[i] - prob.h[i];
            fit += d * d;
        }
        return 0.5 * fit + prob.lambda_l1 * norm1(z);
    };

    double obj = objective(x);
    out.objective_trace.push_back(obj);
    for (int it = 0; it < max_iter; ++it) {
        const std::vector<double> residual = prob.phi.mul(x);
        std::vector<double> diff(residual.size());
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = residual[i] - prob.h[i];
        const std::vector<double> grad = prob.phi.mul_transposed(diff);

        for (std::size_t i = 0; i < m; ++i) {
            const double z = x[i] - step * grad[i];
            x[i] = z > thresh ? z - thresh : (z < -thresh ? z + thresh : 0.0);
        }

        const double next = objective(x);
        out.objective_trace.push_back(next);
        out.iterations = it + 1;
        if (std::abs(obj - next) <= tol * std::max(1.0, std::abs(obj))) {
            obj = next;
            break;
        }
        obj = next;
    }

    out.x = std::move(x);
    double l2 = 0.0;
    for (double v : out.x) l2 += v * v;
    out.hoyer = l2 == 0.0 ? 1.0 : hoyer_penalty(out.x, 1.0);
    return out;
}

DenseMatrix build_pulse_dictionary(std::size_t m, double rate_hz, double pulse_width_s) {
    if (m == 0 || rate_hz <= 0.0 || pulse_width_s <= 0.0)
        throw std::invalid_argument("build_pulse_dictionary: bad arguments");
    DenseMatrix phi(m, m);
    const double inv_c = 1.0 / pulse_width_s;
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t r = 0; r < m; ++r) {
            const double dt = (static_cast<double>(r) - static_cast<double>(c)) / rate_hz * inv_c;
            const double g = std::exp(-0.5 * dt * dt);
            if (g > 1e-12) phi.at(r, c) = g;
        }
    }
    phi.normalize_columns();
    return phi;
}

}  // namespace cardiofocus
