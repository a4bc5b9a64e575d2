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

#include <cstdint>
#include <functional>
#include <vector>

#include "cardiofocus/types.hpp"

namespace cardiofocus {

struct CftParams {
    double snr_d = 0.01;         // desired template-fit MSE
    int k_max = 100;             // iteration limit
    double gamma_init = 0.1;     // initial grid size, meters
    double big_gamma_init = 0.1; // initial search-region size, meters
    double size_floor = 0.001;   // lower bound for both sizes
    int n_search_samples = 16;   // Latin-hypercube samples per searching stage
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (!(big_gamma_init >= gamma_init && gamma_init >= size_floor && size_floor > 0.0))
            throw std::invalid_argument("CftParams: need Gamma_init >= gamma_init >= size_floor > 0");
        if (k_max < 0 || n_search_samples < 1)
            throw std::invalid_argument("CftParams: bad iteration or sample count");
    }
};

enum class EvalStage : char { Initial = 'i', Search = 's', Poll = 'p' };

struct TraceEntry {
    int iteration;
    SpatialPoint point;
    double cost;
    double big_gamma;  // region size when the evaluation ran
    double gamma;      // grid size when the evaluation ran
    EvalStage stage;
};

// Per-iteration resizing log; enough to re-derive the doubling/halving and
// grid-size algebra from the outside.
struct IterationRecord {
    int k;
    double big_gamma_before, gamma_before;
    double big_gamma_after, gamma_after;
    bool improved;            // incumbent replaced this iteration
    bool improved_in_search;  // already in the sampled searching stage
    std::size_t evals;
    double incumbent_cost_after;
};

struct CftState {
    SpatialPoint e_k;
    double cost_k = 0.0;
    double big_gamma_k = 0.0;
    double gamma_k = 0.0;
    int iteration = 0;
    std::size_t eval_count = 0;
    std::vector<TraceEntry> trace;
    std::vector<IterationRecord> iterations;
};

struct CftResult {
    SpatialPoint best;
    double best_cost;
    CftState state;
};

// Three +- pairs of orthonormal directions.
struct DirectionSet {
    std::vector<SpatialPoint> vectors;
};

double halton(std::uint64_t index, unsigned base);

// Basis {+-q1, +-q2, +-q3} completed from a unit seed vector by the
// reflection that maps e1 onto it; a seed equal to e1 degenerates to the
// coordinate axes.
DirectionSet orthonormal_from_seed(const SpatialPoint& seed);

// Orthonormal basis whose first axis is the unit vector derived from the
// Halton point (bases 2, 3, 5) at index iteration + 1.
DirectionSet generate_directions(int iteration);

struct GridPoint {
    SpatialPoint point;
    int direction;
    int multiplier;
    bool in_omega;
};

// G_k (all) and S_k (inf-norm within big_gamma of e_k). Points outside the
// search space stay listed but flagged; the cost contract maps them to
// +infinity. e_k itself is excluded.
struct Grid {
    std::vector<GridPoint> all;
    std::vector<GridPoint> in_region;
    int max_multiplier = 0;
};

Grid build_grid(const SpatialPoint& e_k, double gamma, const DirectionSet& dirs,
                const SearchSpace& omega, double big_gamma);

// Cost callback: must be pure and thread-safe; candidate evaluations within
// one stage run in parallel.
using CostFn = std::function<double(const SpatialPoint&)>;

// Coordinate-search focusing with decoupled grid size and search region:
// a Latin-hypercube searching stage over the whole grid, an exhaustive poll
// of the region on failure, doubling on success and halving otherwise.
CftResult cft_focus(const SpatialPoint& e0, const CostFn& cost, const CftParams& params,
                    const SearchSpace& omega);

struct SegmentResult {
    int segment;
    SpatialPoint e_b;
    double cost_b;
    std::size_t eval_count;
    CftState state;
};

// Runs cft_focus per segment, seeding each search with the previous best
// point and re-centering the search space on it. A segment whose first
// evaluation already meets snr_d costs exactly one evaluation.
std::vector<SegmentResult> cft_track(const DataCube& cube, const RadarConfig& cfg,
                                     const SpatialPoint& e0, const CftParams& params,
                                     const SearchSpace& omega, double segment_s = 4.0);

struct TopPoints {
    std::vector<SpatialPoint> points;
    bool flagged = false;  // fewer than k distinct points were available
};

// The k distinct trace points with the lowest cost, ascending.
TopPoints top_k_points(const CftState& state, std::size_t k = 10);

}  // namespace cardiofocus
