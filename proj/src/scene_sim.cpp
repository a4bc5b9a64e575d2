// SPDX-License-Identifier: Apache-2.0
//
// cardiofocus: cardiac-point focusing, tracking and sparse heartbeat
// recovery for FMCW radar data cubes.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "cardiofocus/scene_sim.hpp"

#include <cmath>
#include <sstream>

#include "cardiofocus/rng.hpp"

namespace cardiofocus {

namespace {

constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;  // "noise"

// Everything the per-frame kernel needs, resolved up front.
struct RenderScatterer {
    SpatialPoint position;
    SpatialPoint radial;  // unit vector from the radar to the scatterer
    double reflectivity;
    std::vector<double> displacement;  // per frame, meters, along `radial`
};

struct RenderPlan {
    std::vector<RenderScatterer> scatterers;
    std::vector<double> channel_x;  // virtual element positions
    double noise_std = 0.0;         // per real/imag component, per sample
};

std::vector<double> total_displacement(const Scene& scene, const Scatterer& s, int n_frames,
                                       bool cardiac_member) {
    if (!s.walk.samples.empty() && s.walk.samples.size() < static_cast<std::size_t>(n_frames))
        throw std::invalid_argument("Scene: clutter walk shorter than the cube");
    if (cardiac_member && !scene.cardiac_motion.samples.empty() &&
        scene.cardiac_motion.samples.size() < static_cast<std::size_t>(n_frames))
        throw std::invalid_argument("Scene: cardiac motion shorter than the cube");

    std::vector<double> d(static_cast<std::size_t>(n_frames), 0.0);
    for (int f = 0; f < n_frames; ++f) {
        double v = 0.0;
        if (!s.walk.samples.empty()) v += s.walk.samples[static_cast<std::size_t>(f)];
        if (cardiac_member && !scene.cardiac_motion.samples.empty())
            v += scene.cardiac_motion.samples[static_cast<std::size_t>(f)];
        d[static_cast<std::size_t>(f)] = v;
    }
    return d;
}

RenderPlan build_plan(const Scene& scene, const RadarConfig& cfg) {
    cfg.validate();
    RenderPlan plan;
    plan.channel_x.resize(static_cast<std::size_t>(cfg.virtual_channels));
    for (int v = 0; v < cfg.virtual_channels; ++v)
        plan.channel_x[static_cast<std::size_t>(v)] = cfg.channel_x_m(v);

    auto add = [&](const SpatialPoint& p, double refl, std::vector<double> disp) {
        const double r = p.norm();
        if (r < 1e-6) throw std::invalid_argument("Scene: scatterer at the radar origin");
        if (r > cfg.max_range_m()) {
            std::ostringstream os;
            os << "Scene: scatterer (" << p.x << ", " << p.y << ", " << p.z
               << ") beyond max range " << cfg.max_range_m() << " m";
            throw std::invalid_argument(os.str());
        }
        plan.scatterers.push_back({p, p * (1.0 / r), refl, std::move(disp)});
    };

    if (scene.cardiac_reflectivity > 0.0 && !scene.cardiac_motion.samples.empty()) {
        const Scatterer heart{scene.cardiac_point, scene.cardiac_reflectivity, {}};
        add(heart.position, heart.reflectivity, total_displacement(scene, heart, cfg.n_frames, true));
    }
    for (const Scatterer& s : scene.clutter) {
        if (s.reflectivity < 0.0) throw std::invalid_argument("Scene: negative reflectivity");
        const bool member = s.position.dist(scene.cardiac_point) <= scene.cardiac_radius_m;
        add(s.position, s.reflectivity, total_displacement(scene, s, cfg.n_frames, member));
    }

    // Scale chosen so the unwrapped phase jitter of a unit-reflectivity
    // point is roughly phase_noise_std_rad after coherent accumulation.
    const double cvn = static_cast<double>(cfg.chirps_per_frame) * cfg.virtual_channels *
                       cfg.adc_samples;
    plan.noise_std = scene.phase_noise_std_rad * std::sqrt(cvn);
    return plan;
}

void render_frame(const Scene& scene, const RadarConfig& cfg, const RenderPlan& plan, int f,
                  DataCube& cube) {
    const int c_count = cfg.chirps_per_frame;
    const int v_count = cfg.virtual_channels;
    const int n_count = cfg.adc_samples;

    std::vector<std::complex<double>> acc(static_cast<std::size_t>(v_count) * n_count,
                                          {0.0, 0.0});
    for (const RenderScatterer& s : plan.scatterers) {
        const SpatialPoint p = s.position + s.radial * s.displacement[static_cast<std::size_t>(f)];
        const double r_tx = p.norm();
        for (int v = 0; v < v_count; ++v) {
            const double dx = p.x - plan.channel_x[static_cast<std::size_t>(v)];
            const double round_trip = r_tx + std::sqrt(dx * dx + p.y * p.y + p.z * p.z);
            const double beat_hz = cfg.slope_hz_per_s * round_trip / cfg.light_speed_m_s;
            const double carrier = 2.0 * M_PI * round_trip / cfg.wavelength_m;
            const double step = 2.0 * M_PI * beat_hz * cfg.adc_period_s();
            std::complex<double> z(std::cos(carrier), std::sin(carrier));
            const std::complex<double> w(std::cos(step), std::sin(step));
            std::complex<double>* row = acc.data() + static_cast<std::size_t>(v) * n_count;
            for (int n = 0; n < n_count; ++n) {
                row[n] += s.reflectivity * z;
                z *= w;
            }
        }
    }

    for (int c = 0; c < c_count; ++c) {
        for (int v = 0; v < v_count; ++v) {
            for (int n = 0; n < n_count; ++n) {
                std::complex<double> val = acc[static_cast<std::size_t>(v) * n_count + n];
                if (plan.noise_std > 0.0) {
                    const auto [g_re, g_im] =
                        hash_gaussian2(scene.rng_seed, kNoiseStream, cube.index(f, c, v, n));
                    val += std::complex<double>(plan.noise_std * g_re, plan.noise_std * g_im);
                }
                cube.at(f, c, v, n) = std::complex<float>(static_cast<float>(val.real()),
                                                          static_cast<float>(val.imag()));
            }
        }
    }
}

}  // namespace

DisplacementSeries synthesize_cardiac_displacement(const HeartbeatSchedule& schedule,
                                                   const TemplateParams& pulse,
                                                   double duration_s, double rate_hz) {
    if (schedule.beat_times_s.empty())
        throw std::invalid_argument("synthesize_cardiac_displacement: empty schedule");
    if (rate_hz <= 0.0) throw std::invalid_argument("synthesize_cardiac_displacement: rate_hz <= 0");
    if (pulse.a1 > 1e-3 || pulse.a2 > 1e-3)
        throw std::invalid_argument("synthesize_cardiac_displacement: pulse amplitude not in meters");
    schedule.validate();

    DisplacementSeries out;
    out.rate_hz = rate_hz;
    out.samples.assign(static_cast<std::size_t>(std::llround(duration_s * rate_hz)), 0.0);
    for (double beat : schedule.beat_times_s) {
        TemplateParams shifted = pulse;
        shifted.b1 = beat + pulse.b1;
        shifted.b2 = beat + pulse.b2;
        for (std::size_t i = 0; i < out.samples.size(); ++i)
            out.samples[i] += shifted.eval(static_cast<double>(i) / rate_hz);
    }
    return out;
}

DisplacementSeries random_walk_series(std::size_t n, double rate_hz, double step_std_m,
                                      std::uint64_t seed, std::uint64_t stream) {
    DisplacementSeries out;
    out.rate_hz = rate_hz;
    out.samples.resize(n);
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [g, _] = hash_gaussian2(seed, stream, i);
        v += step_std_m * g;
        out.samples[i] = v;
    }
    return out;
}

DataCube simulate_data_cube(const Scene& scene, const RadarConfig& cfg) {
    const RenderPlan plan = build_plan(scene, cfg);
    DataCube cube(cfg.n_frames, cfg.chirps_per_frame, cfg.virtual_channels, cfg.adc_samples);
#pragma omp parallel for schedule(static)
    for (int f = 0; f < cfg.n_frames; ++f) render_frame(scene, cfg, plan, f, cube);
    return cube;
}

DataCube simulate_data_cube_serial(const Scene& scene, const RadarConfig& cfg) {
    const RenderPlan plan = build_plan(scene, cfg);
    DataCube cube(cfg.n_frames, cfg.chirps_per_frame, cfg.virtual_channels, cfg.adc_samples);
    for (int f = 0; f < cfg.n_frames; ++f) render_frame(scene, cfg, plan, f, cube);
    return cube;
}

}  // namespace cardiofocus
