// SPDX-License-Identifier: Apache-2.0
//
// cardiofocus: cardiac-point focusing, tracking and sparse heartbeat
// recovery for FMCW radar data cubes.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "cardiofocus/fixtures.hpp"

#include <cmath>
#include <random>

#include "cardiofocus/dsp.hpp"
#include "cardiofocus/rng.hpp"
#include "cardiofocus/scene_sim.hpp"

namespace cardiofocus {

namespace {

// Cardiac offsets must leave room inside the search box once the rough
// localization quantizes the torso point to map bins.
constexpr double kMaxOffsetX = 0.17;
constexpr double kMaxOffsetY = 0.075;
constexpr double kMaxOffsetZ = 0.17;

// Steered response at `target` of a unit scatterer at `source`: one frame
// through the real render/extract path. This is the array's actual
// point-spread function, taper and all.
double coupling(const SpatialPoint& target, const SpatialPoint& source, const RadarConfig& cfg) {
    RadarConfig one = cfg;
    one.n_frames = 1;
    Scene s;
    s.cardiac_reflectivity = 0.0;
    s.cardiac_point = {100.0, 100.0, 100.0};
    s.phase_noise_std_rad = 0.0;
    Scatterer sc;
    sc.position = source;
    s.clutter.push_back(sc);
    const DataCube cube = simulate_data_cube_serial(s, one);
    return std::abs(extract_point_signal_serial(cube, target, one).samples[0]);
}

// The map only resolves range and azimuth; used to keep reflectors from
// piling into one cell and outshining the torso.
double map_separation(const SpatialPoint& a, const SpatialPoint& b) {
    const double dr = (a.norm() - b.norm()) / 0.05;
    const double ds = (a.x / a.norm() - b.x / b.norm()) / 0.09;
    return dr * dr + ds * ds;
}

SpatialPoint sample_offset(std::mt19937_64& rng, const SpatialPoint& body, double norm_min,
                           double norm_max, const RadarConfig& cfg) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int tries = 0; tries < 20000; ++tries) {
        const SpatialPoint off{u(rng) * kMaxOffsetX, u(rng) * kMaxOffsetY, u(rng) * kMaxOffsetZ};
        const double n = off.norm();
        if (n < norm_min || n > norm_max) continue;
        // Keep the torso's static glare out of the cardiac point's beam.
        if (coupling(body + off, body, cfg) > 0.02) continue;
        return off;
    }
    throw std::runtime_error("sample_offset: offset range unreachable within the box");
}

}  // namespace

Fixture make_focus_fixture(std::uint64_t seed, const FixtureOptions& opt) {
    Fixture fx;
    fx.cfg = RadarConfig{};
    fx.cfg.adc_samples = opt.adc_samples;
    fx.cfg.n_frames = static_cast<int>(std::lround(opt.duration_s * fx.cfg.frame_rate_hz()));

    std::mt19937_64 rng(hash_combine(seed, 0x66697874ULL, 0));
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    const double range = 0.65 + 0.30 * u01(rng);
    const double theta = -0.20 + 0.40 * u01(rng);
    fx.body_point = {range * std::sin(theta), range * std::cos(theta), 0.0};

    nlohmann::json clutter = nlohmann::json::array();
    const bool with_body = opt.body_reflectivity > 0.0;
    if (with_body) {
        fx.cardiac_point = fx.body_point + sample_offset(rng, fx.body_point, opt.offset_min_m,
                                                         opt.offset_max_m, fx.cfg);
        // The torso itself is quasi-static; room clutter carries the larger
        // micro-motion.
        clutter.push_back({{"point", {fx.body_point.x, fx.body_point.y, fx.body_point.z}},
                           {"reflectivity", opt.body_reflectivity},
                           {"walk_std_m", 4.0e-6}});
    } else {
        // Quasi-static subject facing the radar: the chest is the dominant
        // reflector and the rough localization lands on it directly.
        fx.cardiac_point = fx.body_point;
    }

    // Moving reflectors fill the space around the subject. Placement keeps
    // their motion out of the cardiac point's beam (measured through the
    // actual point-spread function) and keeps reflectors out of each
    // other's map cells so none of them outshines the torso.
    std::vector<SpatialPoint> placed;
    placed.push_back(fx.body_point);
    std::uniform_real_distribution<double> ur(0.4, 1.0);
    std::uniform_real_distribution<double> ux(-0.35, 0.35);
    std::uniform_real_distribution<double> uy(-0.15, 0.15);
    for (int i = 0; i < opt.extra_clutter; ++i) {
        SpatialPoint p;
        for (int tries = 0; tries < 2000; ++tries) {
            p = fx.body_point + SpatialPoint{ux(rng), uy(rng), ux(rng)};
            if (p.y <= 0.2) continue;
            if (coupling(fx.cardiac_point, p, fx.cfg) > 0.02) continue;
            bool crowded = false;
            for (const SpatialPoint& q : placed)
                if (map_separation(p, q) < 1.0) crowded = true;
            if (!crowded) break;
        }
        placed.push_back(p);
        clutter.push_back({{"point", {p.x, p.y, p.z}}, {"reflectivity", ur(rng)}});
    }

    fx.scene_recipe = {
        {"rng_seed", seed},
        {"cardiac_point", {fx.cardiac_point.x, fx.cardiac_point.y, fx.cardiac_point.z}},
        {"cardiac_reflectivity", with_body ? 1.0 : 2.0},
        {"cardiac_radius_m", 0.05},
        {"pulse",
         {{"a1", 3.0e-4}, {"a2", 1.5e-4}, {"b1_offset_s", 0.0}, {"b2_offset_s", 0.25},
          {"c1_s", 0.03}, {"c2_s", 0.05}}},
        {"beat_generator", {{"start_s", 0.5}, {"mean_rr_s", 0.8}, {"jitter_std_s", 0.02}}},
        {"respiration_amp_m", 1.0e-3},
        {"respiration_freq_hz", 0.25},
        {"clutter", clutter},
        {"clutter_walk_std_m", 1.5e-5},
        {"phase_noise_std_rad", opt.phase_noise_std_rad},
    };
    return fx;
}

Fixture make_static_fixture(std::uint64_t seed, double duration_s) {
    FixtureOptions opt;
    opt.duration_s = duration_s;
    opt.adc_samples = 64;
    opt.extra_clutter = 2;
    opt.body_reflectivity = 0.0;  // the chest is the dominant reflector
    return make_focus_fixture(seed, opt);
}

}  // namespace cardiofocus
