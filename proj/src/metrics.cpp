// SPDX-License-Identifier: Apache-2.0
//
// cardiofocus: cardiac-point focusing, tracking and sparse heartbeat
// recovery for FMCW radar data cubes.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "cardiofocus/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cardiofocus {

namespace {

// Half-RR window bounds for truth peak i; the first and last cycle reuse
// their single neighbor's interval.
std::pair<double, double> cycle_window(const std::vector<double>& t, std::size_t i) {
    const double inf = std::numeric_limits<double>::infinity();
    double lo = -inf, hi = inf;
    if (i > 0) lo = 0.5 * (t[i - 1] + t[i]);
    else if (t.size() > 1) lo = t[0] - 0.5 * (t[1] - t[0]);
    if (i + 1 < t.size()) hi = 0.5 * (t[i] + t[i + 1]);
    else if (t.size() > 1) hi = t[i] + 0.5 * (t[i] - t[i - 1]);
    return {lo, hi};
}

}  // namespace

MatchResult match_peaks(const PeakSet& pred, const PeakSet& truth) {
    pred.validate();
    truth.validate();

    struct CandidatePair {
        double dist;
        std::size_t p, t;
    };
    std::vector<CandidatePair> candidates;
    for (std::size_t t = 0; t < truth.times_s.size(); ++t) {
        const auto [lo, hi] = cycle_window(truth.times_s, t);
        for (std::size_t p = 0; p < pred.times_s.size(); ++p) {
            const double tp = pred.times_s[p];
            if (tp < lo || tp > hi) continue;
            candidates.push_back({std::abs(tp - truth.times_s[t]), p, t});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const CandidatePair& a, const CandidatePair& b) { return a.dist < b.dist; });

    MatchResult out;
    std::vector<bool> pred_used(pred.times_s.size(), false);
    std::vector<bool> truth_used(truth.times_s.size(), false);
    for (const CandidatePair& c : candidates) {
        if (pred_used[c.p] || truth_used[c.t]) continue;
        pred_used[c.p] = truth_used[c.t] = true;
        out.pairs.emplace_back(c.p, c.t);
    }
    for (std::size_t t = 0; t < truth.times_s.size(); ++t)
        if (!truth_used[t]) out.unmatched_truth.push_back(t);
    return out;
}

PeakErrorStats peak_error_ms(const MatchResult& match, const PeakSet& pred, const PeakSet& truth) {
    PeakErrorStats stats;
    if (match.pairs.empty()) return stats;

    std::vector<double> errors;
    errors.reserve(match.pairs.size());
    double sum = 0.0;
    for (const auto& [p, t] : match.pairs) {
        const double e = std::abs(pred.times_s[p] - truth.times_s[t]) * 1000.0;
        errors.push_back(e);
        sum += e;
    }
    std::sort(errors.begin(), errors.end());
    stats.pairs = errors.size();
    stats.mean_ms = sum / static_cast<double>(errors.size());
    const std::size_t mid = errors.size() / 2;
    stats.median_ms = errors.size() % 2 == 1 ? errors[mid] : 0.5 * (errors[mid - 1] + errors[mid]);
    stats.defined = true;
    return stats;
}

double mdr(const PeakSet& pred, const PeakSet& truth) {
    if (truth.times_s.empty()) throw std::invalid_argument("mdr: empty truth set");
    const MatchResult match = match_peaks(pred, truth);

    std::size_t missed = truth.times_s.size() - match.pairs.size();
    for (const auto& [p, t] : match.pairs) {
        const double err_ms = std::abs(pred.times_s[p] - truth.times_s[t]) * 1000.0;
        if (err_ms > 150.0) ++missed;
    }
    return static_cast<double>(missed) / static_cast<double>(truth.times_s.size());
}

double mse(std::span<const double> x, std::span<const double> x_prime) {
    if (x.size() != x_prime.size() || x.size() < 2)
        throw std::invalid_argument("mse: need equal lengths >= 2");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - x_prime[i];
        acc += d * d;
    }
    return acc / static_cast<double>(x.size());
}

double pcc(std::span<const double> x, std::span<const double> x_prime) {
    if (x.size() != x_prime.size() || x.size() < 2)
        throw std::invalid_argument("pcc: need equal lengths >= 2");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += x_prime[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = x_prime[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw std::domain_error("pcc: zero variance");
    return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

MetricReport evaluate_peaks(const PeakSet& pred, const PeakSet& truth,
                            std::vector<CycleOutcome>* per_cycle) {
    const MatchResult match = match_peaks(pred, truth);
    const PeakErrorStats stats = peak_error_ms(match, pred, truth);

    MetricReport report;
    report.mean_peak_error_ms = stats.mean_ms;
    report.median_peak_error_ms = stats.median_ms;
    report.peak_error_defined = stats.defined;
    report.mdr = mdr(pred, truth);

    if (per_cycle) {
        per_cycle->clear();
        std::vector<double> err(truth.times_s.size(), -1.0);
        for (const auto& [p, t] : match.pairs)
            err[t] = std::abs(pred.times_s[p] - truth.times_s[t]) * 1000.0;
        for (std::size_t t = 0; t < truth.times_s.size(); ++t) {
            const bool missed = err[t] < 0.0 || err[t] > 150.0;
            per_cycle->push_back({truth.times_s[t], err[t], missed});
        }
    }
    return report;
}

}  // namespace cardiofocus
