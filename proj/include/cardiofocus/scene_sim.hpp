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

#include "cardiofocus/types.hpp"

namespace cardiofocus {

// Superposition of one double-Gaussian pulse per scheduled beat.
// Rejects schedules whose beats are closer than 0.33 s.
DisplacementSeries synthesize_cardiac_displacement(const HeartbeatSchedule& schedule,
                                                   const TemplateParams& pulse,
                                                   double duration_s, double rate_hz);

// Zero-mean Gaussian-step random walk, used for clutter micro-motion.
DisplacementSeries random_walk_series(std::size_t n, double rate_hz, double step_std_m,
                                      std::uint64_t seed, std::uint64_t stream);

// Renders the scene into a complex baseband cube. Per scatterer and frame
// the round-trip distance to each virtual channel drives both the beat
// frequency and the carrier phase; complex white Gaussian noise is added
// per sample from a counter-based generator, so the result is a pure
// function of (scene, cfg). Frames are rendered in parallel.
DataCube simulate_data_cube(const Scene& scene, const RadarConfig& cfg);

// Single-threaded reference implementation; bit-identical to the
// parallel kernel.
DataCube simulate_data_cube_serial(const Scene& scene, const RadarConfig& cfg);

}  // namespace cardiofocus
