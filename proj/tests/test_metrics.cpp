// SPDX-License-Identifier: Apache-2.0
//
// cardiofocus: cardiac-point focusing, tracking and sparse heartbeat
// recovery for FMCW radar data cubes.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "cardiofocus/metrics.hpp"
#include "support/oracles.hpp"

using namespace cardiofocus;

TEST_CASE("match_peaks: identity, misses, and nearest-wins") {
    const PeakSet truth{{1.0, 2.0, 3.0}};
    {
        const MatchResult m = match_peaks(truth, truth);
        CHECK(m.pairs.size() == 3);
        CHECK(m.unmatched_truth.empty());
        const PeakErrorStats stats = peak_error_ms(m, truth, truth);
        CHECK(stats.mean_ms == 0.0);
    }
    {
        const PeakSet pred{{1.0, 3.0}};
        const MatchResult m = match_peaks(pred, truth);
        CHECK(m.pairs.size() == 2);
        REQUIRE(m.unmatched_truth.size() == 1);
        CHECK(m.unmatched_truth[0] == 1);
    }
    {
        const PeakSet pred{{1.9, 2.06}};  // both inside cycle 1's window
        const MatchResult m = match_peaks(pred, truth);
        REQUIRE(m.pairs.size() == 1);
        CHECK(m.pairs[0].first == 1);  // the nearer one wins
        CHECK(m.pairs[0].second == 1);
        const auto brute = oracles::brute_force_match(pred.times_s, truth.times_s);
        CHECK(brute.matched == 1);
        CHECK(brute.pairs[0].first == 1);
    }
}

TEST_CASE("match_peaks agrees with the brute-force assignment on random fixtures") {
    std::mt19937_64 rng(61);
    std::uniform_int_distribution<int> n_truth(1, 6);
    std::uniform_int_distribution<int> n_pred(0, 6);
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);

    for (int trial = 0; trial < 300; ++trial) {
        PeakSet truth;
        double t = 1.0;
        const int nt = n_truth(rng);
        for (int i = 0; i < nt; ++i) {
            truth.times_s.push_back(t);
            t += 0.6 + 0.4 * std::abs(jitter(rng));
        }
        PeakSet pred;
        const int np = n_pred(rng);
        for (int i = 0; i < np && i < nt; ++i) pred.times_s.push_back(truth.times_s[i] + jitter(rng));
        std::sort(pred.times_s.begin(), pred.times_s.end());
        pred.times_s.erase(std::unique(pred.times_s.begin(), pred.times_s.end()), pred.times_s.end());

        const MatchResult greedy = match_peaks(pred, truth);
        const auto brute = oracles::brute_force_match(pred.times_s, truth.times_s);
        CHECK(greedy.pairs.size() == brute.matched);
        double greedy_dist = 0.0;
        for (const auto& [p, tr] : greedy.pairs)
            greedy_dist += std::abs(pred.times_s[p] - truth.times_s[tr]);
        CHECK(greedy_dist == doctest::Approx(brute.total_dist).epsilon(1e-12));
    }
}

TEST_CASE("peak_error_ms on the worked examples") {
    const PeakSet truth{{1.0, 2.0}};
    const PeakSet pred{{1.02, 2.0}};
    const MatchResult m = match_peaks(pred, truth);
    const PeakErrorStats stats = peak_error_ms(m, pred, truth);
    REQUIRE(stats.defined);
    CHECK(stats.mean_ms == doctest::Approx(10.0).epsilon(1e-9));

    // Uniform +15 ms shift.
    PeakSet shifted;
    for (double t : truth.times_s) shifted.times_s.push_back(t + 0.015);
    const PeakErrorStats s2 = peak_error_ms(match_peaks(shifted, truth), shifted, truth);
    CHECK(s2.mean_ms == doctest::Approx(15.0).epsilon(1e-9));

    const PeakErrorStats empty = peak_error_ms(MatchResult{}, pred, truth);
    CHECK_FALSE(empty.defined);
}

TEST_CASE("mdr on the worked examples and the 150 ms boundary") {
    CHECK(mdr(PeakSet{{1.0, 2.2, 3.01}}, PeakSet{{1.0, 2.0, 3.0}}) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(mdr(PeakSet{{}}, PeakSet{{1.0, 2.0}}) == 1.0);
    CHECK(mdr(PeakSet{{1.0, 2.0}}, PeakSet{{1.0, 2.0}}) == 0.0);

    // Strictly-greater-than-150ms rule at the boundary.
    CHECK(mdr(PeakSet{{1.149}}, PeakSet{{1.0}}) == 0.0);
    CHECK(mdr(PeakSet{{1.150}}, PeakSet{{1.0}}) == 0.0);
    CHECK(mdr(PeakSet{{1.151}}, PeakSet{{1.0}}) == 1.0);

    CHECK_THROWS_AS(mdr(PeakSet{{1.0}}, PeakSet{{}}), std::invalid_argument);
}

TEST_CASE("mdr never decreases as predicted peaks are deleted") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    for (int trial = 0; trial < 100; ++trial) {
        PeakSet truth;
        for (int i = 0; i < 6; ++i) truth.times_s.push_back(1.0 + 0.8 * i);
        PeakSet pred;
        for (double t : truth.times_s) pred.times_s.push_back(t + jitter(rng));
        std::sort(pred.times_s.begin(), pred.times_s.end());

        double prev = mdr(pred, truth);
        while (!pred.times_s.empty()) {
            std::uniform_int_distribution<std::size_t> pick(0, pred.times_s.size() - 1);
            pred.times_s.erase(pred.times_s.begin() + static_cast<std::ptrdiff_t>(pick(rng)));
            const double cur = mdr(pred, truth);
            CHECK(cur >= prev - 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("mse and pcc identities") {
    std::mt19937_64 rng(81);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> x(64), y(64);
    for (double& v : x) v = g(rng);
    for (double& v : y) v = g(rng);

    CHECK(mse(x, x) == 0.0);
    CHECK(pcc(x, x) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> xm = x;
    double mean = 0.0;
    for (double v : xm) mean += v;
    mean /= static_cast<double>(xm.size());
    for (double& v : xm) v -= mean;
    std::vector<double> neg = xm;
    for (double& v : neg) v = -v;
    CHECK(pcc(xm, neg) == doctest::Approx(-1.0).epsilon(1e-12));

    // Zero-mean orthogonal vectors decorrelate.
    std::vector<double> a(64), b(64);
    for (std::size_t i = 0; i < 64; ++i) {
        a[i] = std::sin(2.0 * M_PI * 4.0 * static_cast<double>(i) / 64.0);
        b[i] = std::cos(2.0 * M_PI * 4.0 * static_cast<double>(i) / 64.0);
    }
    CHECK(std::abs(pcc(a, b)) < 1e-12);

    // Symmetry and affine invariance.
    CHECK(mse(x, y) == doctest::Approx(mse(y, x)).epsilon(1e-15));
    CHECK(mse(x, y) > 0.0);
    std::vector<double> ax = x;
    for (double& v : ax) v = 2.5 * v + 0.7;
    CHECK(pcc(ax, y) == doctest::Approx(pcc(x, y)).epsilon(1e-12));

    std::vector<double> flat(64, 3.0);
    CHECK_THROWS_AS(pcc(x, flat), std::domain_error);
    CHECK_THROWS_AS(mse(x, std::vector<double>(5, 0.0)), std::invalid_argument);
}

TEST_CASE("evaluate_peaks produces per-cycle rows consistent with mdr") {
    const PeakSet truth{{1.0, 2.0, 3.0, 4.0}};
    const PeakSet pred{{1.01, 2.3, 4.02}};
    std::vector<CycleOutcome> cycles;
    const MetricReport report = evaluate_peaks(pred, truth, &cycles);

    REQUIRE(cycles.size() == 4);
    std::size_t missed = 0;
    for (const CycleOutcome& c : cycles)
        if (c.missed) ++missed;
    CHECK(report.mdr == doctest::Approx(static_cast<double>(missed) / 4.0));
    CHECK(report.peak_error_defined);
    CHECK(cycles[0].peak_error_ms == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(cycles[1].missed);  // 300 ms off
    CHECK(cycles[2].missed);  // nothing in the window
}
