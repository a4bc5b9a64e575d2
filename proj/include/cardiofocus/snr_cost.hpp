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

#include <limits>
#include <optional>
#include <vector>

#include "cardiofocus/types.hpp"

namespace cardiofocus {

// Template-fit assessment of one extracted signal. An infinite cost marks a
// hopeless point (no peaks, empty windows, out of range, out of the search
// space); such reports still compare correctly inside the optimizer.
struct CostReport {
    double cost = std::numeric_limits<double>::infinity();
    TemplateParams fitted;            // best-fitting beat's parameters
    std::vector<std::size_t> peaks;   // detected dominant-peak indices
    int windows_used = 0;             // beat windows that entered the fit

    bool feasible() const { return cost < std::numeric_limits<double>::infinity(); }
};

// Analytic-signal magnitude smoothed with a 25 ms moving average, then
// normalized to a maximum of 1. Throws on flat input.
DisplacementSeries envelope(const DisplacementSeries& sig);

// Local maxima of a normalized envelope with prominence >= 0.3 and mutual
// spacing >= 0.33 s, indices ascending.
std::vector<std::size_t> detect_dominant_peaks(const DisplacementSeries& env);

// Per detected beat, fits the double-Gaussian template on the window
// (peak - 0.15 s, peak + 0.55 s): a1/b1 are fixed from the peak, the rest is
// Gauss-Newton with a coarse grid fallback. Cost is the mean windowed MSE.
CostReport fit_template(const DisplacementSeries& env, const std::vector<std::size_t>& peaks);

// band-pass + differentiate -> envelope -> detect -> fit, with every error
// path mapped to an infinite cost.
CostReport series_cost(const DisplacementSeries& displacement);

// Full chain from the cube. Points outside `omega` or beyond the maximum
// range cost +infinity by contract.
CostReport point_cost(const DataCube& cube, const SpatialPoint& point, const RadarConfig& cfg,
                      const std::optional<SearchSpace>& omega = std::nullopt);

// Beat instants of a raw displacement series (band-pass + envelope + peak
// detection), shifted by t_offset. Empty when nothing is detectable.
std::vector<double> beat_times_from_displacement(const DisplacementSeries& displacement,
                                                 double t_offset = 0.0);

}  // namespace cardiofocus
