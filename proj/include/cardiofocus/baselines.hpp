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

#include <vector>

#include "cardiofocus/cft.hpp"
#include "cardiofocus/types.hpp"

namespace cardiofocus {

// Simplified reconstructions of the accumulation- and clustering-style
// extractors used for head-to-head comparisons. Faithful to the published
// evaluation counts, not to every internal detail of the originals.

// Mean of the displacements extracted at a fixed 10-point lattice around
// `center` (axis neighbors at 0.03 m plus three diagonals).
DisplacementSeries accumulate_extract(const DataCube& cube, const SpatialPoint& center,
                                      const RadarConfig& cfg);

// The 10 lattice offsets, exposed for budget accounting and tests.
std::vector<SpatialPoint> accumulation_lattice(const SpatialPoint& center);

struct ClusterExtractResult {
    DisplacementSeries series;
    SpatialPoint chosen_point;
    bool flagged = false;  // clustering degenerated to singletons
};

struct ClusterSelection {
    std::size_t index = 0;
    bool flagged = false;
};

// Correlation clustering core: groups the band-passed series by pairwise
// correlation (threshold 0.6, single linkage) and picks the member of the
// largest cluster with the highest mean intra-cluster correlation. An
// all-singleton outcome falls back to the lowest template-fit cost, flagged.
ClusterSelection select_cluster_member(const std::vector<DisplacementSeries>& banded,
                                       const std::vector<DisplacementSeries>& raw);

// Extracts displacements on a 6x6x6 lattice (0.3 m span per axis) around
// `center` and applies select_cluster_member to them.
ClusterExtractResult cluster_extract(const DataCube& cube, const SpatialPoint& center,
                                     const RadarConfig& cfg);

enum class ComparisonMethod { Cft, DeVimoAccumulation, MmecgClustering };

// Evaluations per 1-minute trial: 216 x 15 for clustering, 160 x 15 for
// accumulation; CFT reads its count from the recorded traces.
long evaluation_budget(ComparisonMethod method,
                       const std::vector<SegmentResult>* cft_segments = nullptr);

}  // namespace cardiofocus
