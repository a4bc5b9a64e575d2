// SPDX-License-Identifier: Apache-2.0
//
// cardiofocus: cardiac-point focusing, tracking and sparse heartbeat
// recovery for FMCW radar data cubes.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "cardiofocus/cft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cardiofocus/rng.hpp"
#include "cardiofocus/snr_cost.hpp"

namespace cardiofocus {

double halton(std::uint64_t index, unsigned base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

DirectionSet orthonormal_from_seed(const SpatialPoint& seed) {
    const double s[3] = {seed.x, seed.y, seed.z};

    // Householder reflection mapping e1 to the seed; w ~ 0 degenerates to
    // the identity, i.e. the coordinate axes.
    const double w[3] = {1.0 - s[0], -s[1], -s[2]};
    const double w2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    double q[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    if (w2 > 1e-24) {
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) q[r][c] -= 2.0 * w[r] * w[c] / w2;
    }

    DirectionSet out;
    out.vectors.reserve(6);
    for (int c = 0; c < 3; ++c) {
        const SpatialPoint v{q[0][c], q[1][c], q[2][c]};
        out.vectors.push_back(v);
        out.vectors.push_back(v * -1.0);
    }
    return out;
}

DirectionSet generate_directions(int iteration) {
    if (iteration < 0) throw std::invalid_argument("generate_directions: negative iteration");
    const std::uint64_t idx = static_cast<std::uint64_t>(iteration) + 1;
    double s[3] = {2.0 * halton(idx, 2) - 1.0, 2.0 * halton(idx, 3) - 1.0,
                   2.0 * halton(idx, 5) - 1.0};
    const double norm = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
    if (norm < 1e-9) {
        s[0] = 1.0;
        s[1] = s[2] = 0.0;
    } else {
        for (double& v : s) v /= norm;
    }
    return orthonormal_from_seed({s[0], s[1], s[2]});
}

Grid build_grid(const SpatialPoint& e_k, double gamma, const DirectionSet& dirs,
                const SearchSpace& omega, double big_gamma) {
    if (!(big_gamma >= gamma) || gamma <= 0.0)
        throw std::invalid_argument("build_grid: need Gamma >= gamma > 0");

    // Far corner of the box bounds how many multipliers are worth listing.
    const double dx = std::abs(e_k.x - omega.center.x) + omega.half_extent_x;
    const double dy = std::abs(e_k.y - omega.center.y) + omega.half_extent_y;
    const double dz = std::abs(e_k.z - omega.center.z) + omega.half_extent_z;
    const double corner = std::sqrt(dx * dx + dy * dy + dz * dz);

    constexpr int kMaxMultiplier = 4096;
    int m_max = static_cast<int>(std::ceil(std::max(corner, big_gamma) / gamma));
    m_max = std::clamp(m_max, 1, kMaxMultiplier);

    Grid grid;
    grid.max_multiplier = m_max;
    grid.all.reserve(static_cast<std::size_t>(6) * m_max);
    const double region_bound = big_gamma * (1.0 + 1e-12);
    for (int d = 0; d < 6; ++d) {
        for (int m = 1; m <= m_max; ++m) {
            const SpatialPoint p = e_k + dirs.vectors[static_cast<std::size_t>(d)] * (m * gamma);
            const GridPoint gp{p, d, m, omega.contains(p)};
            grid.all.push_back(gp);
            if (p.inf_dist(e_k) <= region_bound) grid.in_region.push_back(gp);
        }
    }
    return grid;
}

namespace {

// Latin-hypercube draw over the (direction, multiplier) index space.
std::vector<GridPoint> lhs_sample(const Grid& grid, int n_samples, std::uint64_t seed) {
    if (grid.all.size() <= static_cast<std::size_t>(n_samples)) return grid.all;

    std::mt19937_64 rng(seed);
    const int n = n_samples;
    std::vector<int> perm_d(static_cast<std::size_t>(n)), perm_m(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm_d[static_cast<std::size_t>(i)] = perm_m[static_cast<std::size_t>(i)] = i;
    std::shuffle(perm_d.begin(), perm_d.end(), rng);
    std::shuffle(perm_m.begin(), perm_m.end(), rng);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    std::vector<GridPoint> picks;
    std::vector<std::uint64_t> seen;
    for (int j = 0; j < n; ++j) {
        const double ud = (perm_d[static_cast<std::size_t>(j)] + u01(rng)) / n;
        const double um = (perm_m[static_cast<std::size_t>(j)] + u01(rng)) / n;
        const int d = std::min(5, static_cast<int>(ud * 6.0));
        const int m = 1 + std::min(grid.max_multiplier - 1,
                                   static_cast<int>(um * grid.max_multiplier));
        const std::uint64_t key = static_cast<std::uint64_t>(d) * 1000003ULL +
                                  static_cast<std::uint64_t>(m);
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(key);
        picks.push_back(grid.all[static_cast<std::size_t>(d) * grid.max_multiplier +
                                 static_cast<std::size_t>(m - 1)]);
    }
    return picks;
}

std::uint64_t point_key(const GridPoint& gp) {
    return static_cast<std::uint64_t>(gp.direction) * 1000003ULL +
           static_cast<std::uint64_t>(gp.multiplier);
}

// Evaluates feasible candidates in parallel; returns the strict-improvement
// argmin with lowest evaluation index on ties, or -1.
struct BatchResult {
    std::ptrdiff_t best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
};

BatchResult evaluate_batch(const std::vector<GridPoint>& pts, const CostFn& cost,
                           double incumbent, int iteration, double big_gamma, double gamma,
                           EvalStage stage, CftState& state) {
    std::vector<double> costs(pts.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(pts.size()); ++i)
        costs[static_cast<std::size_t>(i)] = cost(pts[static_cast<std::size_t>(i)].point);

    BatchResult res;
    res.best_cost = incumbent;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        state.trace.push_back({iteration, pts[i].point, costs[i], big_gamma, gamma, stage});
        if (costs[i] < res.best_cost) {
            res.best_cost = costs[i];
            res.best = static_cast<std::ptrdiff_t>(i);
        }
    }
    state.eval_count += pts.size();
    return res;
}

}  // namespace

CftResult cft_focus(const SpatialPoint& e0, const CostFn& cost, const CftParams& params,
                    const SearchSpace& omega) {
    params.validate();
    if (!omega.contains(e0)) throw std::invalid_argument("cft_focus: e0 outside the search space");

    CftState state;
    state.big_gamma_k = params.big_gamma_init;
    state.gamma_k = params.gamma_init;
    state.e_k = e0;
    state.cost_k = cost(e0);
    state.eval_count = 1;
    state.trace.push_back({0, e0, state.cost_k, state.big_gamma_k, state.gamma_k,
                           EvalStage::Initial});

    int k = 0;
    while (state.cost_k >= params.snr_d && k < params.k_max) {
        const double big_gamma = state.big_gamma_k;
        const double gamma = state.gamma_k;
        const DirectionSet dirs = generate_directions(k);
        const Grid grid = build_grid(state.e_k, gamma, dirs, omega, big_gamma);

        IterationRecord rec{};
        rec.k = k;
        rec.big_gamma_before = big_gamma;
        rec.gamma_before = gamma;
        const std::size_t evals_before = state.eval_count;

        // Searching stage: sampled subset of the full grid.
        std::vector<GridPoint> sampled =
            lhs_sample(grid, params.n_search_samples, hash_combine(params.rng_seed, 0x6c6873ULL,
                                                                   static_cast<std::uint64_t>(k)));
        std::vector<GridPoint> feasible;
        std::vector<std::uint64_t> tried;
        for (const GridPoint& gp : sampled) {
            if (!gp.in_omega) continue;  // flagged: costs +inf without an evaluation
            feasible.push_back(gp);
            tried.push_back(point_key(gp));
        }
        BatchResult search = evaluate_batch(feasible, cost, state.cost_k, k, big_gamma, gamma,
                                            EvalStage::Search, state);

        bool improved = false;
        if (search.best >= 0) {
            state.e_k = feasible[static_cast<std::size_t>(search.best)].point;
            state.cost_k = search.best_cost;
            improved = true;
            rec.improved_in_search = true;
        } else {
            // Poll stage: the whole search region, minus what just ran.
            std::vector<GridPoint> poll;
            for (const GridPoint& gp : grid.in_region) {
                if (!gp.in_omega) continue;
                if (std::find(tried.begin(), tried.end(), point_key(gp)) != tried.end()) continue;
                poll.push_back(gp);
            }
            BatchResult polled = evaluate_batch(poll, cost, state.cost_k, k, big_gamma, gamma,
                                                EvalStage::Poll, state);
            if (polled.best >= 0) {
                state.e_k = poll[static_cast<std::size_t>(polled.best)].point;
                state.cost_k = polled.best_cost;
                improved = true;
            }
        }

        double next_big = improved ? 2.0 * big_gamma : 0.5 * big_gamma;
        next_big = std::max(next_big, params.size_floor);
        // Grid-size rule on the dimensionless ratio: min(G, G^2) with
        // G = Gamma_k / Gamma_init, rescaled back to meters.
        const double ratio = big_gamma / params.big_gamma_init;
        double next_gamma = std::min(ratio, ratio * ratio) * params.big_gamma_init;
        next_gamma = std::clamp(next_gamma, params.size_floor, next_big);

        rec.big_gamma_after = next_big;
        rec.gamma_after = next_gamma;
        rec.improved = improved;
        rec.evals = state.eval_count - evals_before;
        rec.incumbent_cost_after = state.cost_k;
        state.iterations.push_back(rec);

        state.big_gamma_k = next_big;
        state.gamma_k = next_gamma;
        ++k;
        state.iteration = k;
    }
    return {state.e_k, state.cost_k, state};
}

std::vector<SegmentResult> cft_track(const DataCube& cube, const RadarConfig& cfg,
                                     const SpatialPoint& e0, const CftParams& params,
                                     const SearchSpace& omega, double segment_s) {
    const int frames_per_seg = static_cast<int>(std::lround(segment_s * cfg.frame_rate_hz()));
    if (frames_per_seg < 2 || cube.n_frames() < frames_per_seg)
        throw std::invalid_argument("cft_track: cube shorter than one segment");
    const int n_segments = cube.n_frames() / frames_per_seg;

    RadarConfig seg_cfg = cfg;
    seg_cfg.n_frames = frames_per_seg;

    std::vector<SegmentResult> results;
    results.reserve(static_cast<std::size_t>(n_segments));
    SpatialPoint prev = e0;
    for (int s = 0; s < n_segments; ++s) {
        const DataCube seg = cube.slice_frames(s * frames_per_seg, frames_per_seg);
        SearchSpace om = omega;
        om.center = prev;
        CftParams p = params;
        p.rng_seed = hash_combine(params.rng_seed, 0x747261636bULL, static_cast<std::uint64_t>(s));
        const CostFn cost_fn = [&](const SpatialPoint& pt) {
            return point_cost(seg, pt, seg_cfg, om).cost;
        };
        CftResult res = cft_focus(prev, cost_fn, p, om);
        prev = res.best;
        results.push_back({s, res.best, res.best_cost, res.state.eval_count, std::move(res.state)});
    }
    return results;
}

TopPoints top_k_points(const CftState& state, std::size_t k) {
    struct Entry {
        SpatialPoint p;
        double cost;
        std::size_t first_seen;
    };
    std::vector<Entry> distinct;
    for (std::size_t i = 0; i < state.trace.size(); ++i) {
        const TraceEntry& te = state.trace[i];
        auto it = std::find_if(distinct.begin(), distinct.end(),
                               [&](const Entry& e) { return e.p == te.point; });
        if (it == distinct.end())
            distinct.push_back({te.point, te.cost, i});
        else if (te.cost < it->cost)
            it->cost = te.cost;
    }
    std::sort(distinct.begin(), distinct.end(), [](const Entry& a, const Entry& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        return a.first_seen < b.first_seen;
    });

    TopPoints out;
    out.flagged = distinct.size() < k;
    const std::size_t take = std::min(k, distinct.size());
    for (std::size_t i = 0; i < take; ++i) out.points.push_back(distinct[i].p);
    return out;
}

}  // namespace cardiofocus
