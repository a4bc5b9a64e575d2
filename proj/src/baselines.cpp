// SPDX-License-Identifier: Apache-2.0
//
// cardiofocus: cardiac-point focusing, tracking and sparse heartbeat
// recovery for FMCW radar data cubes.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "cardiofocus/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cardiofocus/dsp.hpp"
#include "cardiofocus/metrics.hpp"
#include "cardiofocus/snr_cost.hpp"

namespace cardiofocus {

std::vector<SpatialPoint> accumulation_lattice(const SpatialPoint& center) {
    const double s = 0.03;
    const double d = s / std::sqrt(2.0);
    return {center,
            center + SpatialPoint{s, 0, 0},  center + SpatialPoint{-s, 0, 0},
            center + SpatialPoint{0, s, 0},  center + SpatialPoint{0, -s, 0},
            center + SpatialPoint{0, 0, s},  center + SpatialPoint{0, 0, -s},
            center + SpatialPoint{d, d, 0},  center + SpatialPoint{d, 0, d},
            center + SpatialPoint{0, d, d}};
}

DisplacementSeries accumulate_extract(const DataCube& cube, const SpatialPoint& center,
                                      const RadarConfig& cfg) {
    if (center.norm() > cfg.max_range_m())
        throw std::invalid_argument("accumulate_extract: center beyond max range");

    const std::vector<SpatialPoint> lattice = accumulation_lattice(center);
    std::vector<DisplacementSeries> parts(lattice.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lattice.size()); ++i) {
        const PointSignal sig =
            extract_point_signal_serial(cube, lattice[static_cast<std::size_t>(i)], cfg);
        parts[static_cast<std::size_t>(i)] = unwrap_phase(sig, cfg.wavelength_m);
    }

    DisplacementSeries out;
    out.rate_hz = cfg.frame_rate_hz();
    out.samples.assign(static_cast<std::size_t>(cube.n_frames()), 0.0);
    for (const DisplacementSeries& p : parts)
        for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += p.samples[i];
    for (double& v : out.samples) v /= static_cast<double>(parts.size());
    return out;
}

namespace {

std::vector<SpatialPoint> cluster_lattice(const SpatialPoint& center) {
    // 6 offsets per axis spanning 0.3 m.
    const std::vector<double> offs = {-0.15, -0.09, -0.03, 0.03, 0.09, 0.15};
    std::vector<SpatialPoint> pts;
    pts.reserve(216);
    for (double x : offs)
        for (double y : offs)
            for (double z : offs) pts.push_back(center + SpatialPoint{x, y, z});
    return pts;
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

ClusterSelection select_cluster_member(const std::vector<DisplacementSeries>& banded,
                                       const std::vector<DisplacementSeries>& raw) {
    const std::size_t n = banded.size();
    if (n == 0 || raw.size() != n)
        throw std::invalid_argument("select_cluster_member: bad input sizes");
    if (n == 1) return {0, false};

    std::vector<std::vector<double>> corr(n, std::vector<double>(n, 0.0));
    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double c = 0.0;
            try {
                c = pcc(banded[i].samples, banded[j].samples);
            } catch (const std::exception&) {
                c = 0.0;
            }
            corr[i][j] = corr[j][i] = c;
            if (c >= 0.6) uf.unite(i, j);
        }
    }

    std::vector<std::vector<std::size_t>> clusters;
    {
        std::vector<std::size_t> root_of(n);
        for (std::size_t i = 0; i < n; ++i) root_of[i] = uf.find(i);
        std::vector<std::size_t> roots = root_of;
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
        for (std::size_t r : roots) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < n; ++i)
                if (root_of[i] == r) members.push_back(i);
            clusters.push_back(std::move(members));
        }
    }

    std::size_t largest = 0;
    for (std::size_t c = 1; c < clusters.size(); ++c)
        if (clusters[c].size() > clusters[largest].size()) largest = c;

    if (clusters[largest].size() <= 1) {
        // All singletons: fall back to the lowest template-fit cost.
        ClusterSelection sel{0, true};
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const double c = series_cost(raw[i]).cost;
            if (c < best_cost) {
                best_cost = c;
                sel.index = i;
            }
        }
        return sel;
    }

    const std::vector<std::size_t>& members = clusters[largest];
    ClusterSelection sel{members[0], false};
    double best_score = -2.0;
    for (std::size_t i : members) {
        double acc = 0.0;
        for (std::size_t j : members)
            if (j != i) acc += corr[i][j];
        const double score = acc / static_cast<double>(members.size() - 1);
        if (score > best_score) {
            best_score = score;
            sel.index = i;
        }
    }
    return sel;
}

ClusterExtractResult cluster_extract(const DataCube& cube, const SpatialPoint& center,
                                     const RadarConfig& cfg) {
    if (center.norm() > cfg.max_range_m())
        throw std::invalid_argument("cluster_extract: center beyond max range");

    std::vector<SpatialPoint> lattice = cluster_lattice(center);
    lattice.erase(std::remove_if(lattice.begin(), lattice.end(),
                                 [&](const SpatialPoint& p) {
                                     return p.norm() > cfg.max_range_m() || p.norm() < 0.05;
                                 }),
                  lattice.end());
    if (lattice.empty()) throw std::invalid_argument("cluster_extract: empty usable lattice");

    const std::size_t n = lattice.size();
    std::vector<DisplacementSeries> raw(n);
    std::vector<DisplacementSeries> banded(n);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const std::size_t idx = static_cast<std::size_t>(i);
        const PointSignal sig = extract_point_signal_serial(cube, lattice[idx], cfg);
        raw[idx] = unwrap_phase(sig, cfg.wavelength_m);
        banded[idx] = bandpass_differentiate(raw[idx]);
    }

    // Correlate the cleaned signals; respiration would otherwise tie
    // everything on the chest together.
    const ClusterSelection sel = select_cluster_member(banded, raw);
    return {raw[sel.index], lattice[sel.index], sel.flagged};
}

long evaluation_budget(ComparisonMethod method, const std::vector<SegmentResult>* cft_segments) {
    switch (method) {
        case ComparisonMethod::MmecgClustering:
            return 216L * 15L;
        case ComparisonMethod::DeVimoAccumulation:
            return 160L * 15L;  // 2 chirps x 8 antennas x 10 spatial points
        case ComparisonMethod::Cft: {
            if (!cft_segments)
                throw std::invalid_argument("evaluation_budget: CFT requires recorded segments");
            long total = 0;
            for (const SegmentResult& s : *cft_segments)
                total += static_cast<long>(s.eval_count);
            return total;
        }
    }
    throw std::invalid_argument("evaluation_budget: unknown method");
}

}  // namespace cardiofocus
