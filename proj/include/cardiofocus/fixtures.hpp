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

#include <json.hpp>

#include "cardiofocus/types.hpp"

namespace cardiofocus {

// A seeded synthetic trial: a strong torso reflection that the rough
// localization finds, a cardiac point offset from it, and clutter.
struct Fixture {
    nlohmann::json scene_recipe;
    RadarConfig cfg;
    SpatialPoint body_point;     // strongest scatterer
    SpatialPoint cardiac_point;  // ground truth
};

struct FixtureOptions {
    double offset_min_m = 0.10;  // cardiac offset from the torso point
    double offset_max_m = 0.26;
    double duration_s = 4.0;
    int adc_samples = 256;
    double phase_noise_std_rad = 0.012;
    double body_reflectivity = 2.2;
    int extra_clutter = 6;
};

Fixture make_focus_fixture(std::uint64_t seed, const FixtureOptions& opt = {});

// Long quasi-static trial for tracking-economy runs: small cardiac offset,
// reduced ADC samples to keep the cube manageable.
Fixture make_static_fixture(std::uint64_t seed, double duration_s = 60.0);

}  // namespace cardiofocus
