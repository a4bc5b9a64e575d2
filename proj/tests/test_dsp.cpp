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

#include "cardiofocus/dsp.hpp"
#include "cardiofocus/metrics.hpp"
#include "cardiofocus/scene_sim.hpp"

using namespace cardiofocus;

namespace {

Scene static_scene(const SpatialPoint& p, double refl = 1.0) {
    Scene s;
    s.cardiac_reflectivity = 0.0;
    s.cardiac_point = {10.0, 10.0, 10.0};
    s.phase_noise_std_rad = 0.0;
    Scatterer sc;
    sc.position = p;
    sc.reflectivity = refl;
    s.clutter.push_back(sc);
    return s;
}

Scene cardiac_scene(const SpatialPoint& p, const RadarConfig& cfg) {
    Scene s;
    s.cardiac_point = p;
    s.cardiac_reflectivity = 1.0;
    s.phase_noise_std_rad = 0.0;
    TemplateParams pulse;
    pulse.a1 = 1.2e-4;
    pulse.a2 = 0.6e-4;
    pulse.b2 = 0.25;
    pulse.c1 = 0.03;
    pulse.c2 = 0.05;
    const double duration = cfg.n_frames * cfg.frame_period_s;
    s.schedule = {{0.9, 1.7, 2.5, 3.3}, 0.0};
    s.cardiac_pulses =
        synthesize_cardiac_displacement(s.schedule, pulse, duration, cfg.frame_rate_hz());
    s.cardiac_motion = s.cardiac_pulses;
    s.respiration_amp_m = 1.0e-3;
    s.respiration_freq_hz = 0.25;
    for (std::size_t i = 0; i < s.cardiac_motion.samples.size(); ++i)
        s.cardiac_motion.samples[i] +=
            s.respiration_amp_m *
            std::sin(2.0 * M_PI * s.respiration_freq_hz * static_cast<double>(i) / cfg.frame_rate_hz());
    return s;
}

}  // namespace

TEST_CASE("range_fft: all-zero cube gives all-zero profiles") {
    RadarConfig cfg;
    cfg.n_frames = 2;
    DataCube cube(2, cfg.chirps_per_frame, cfg.virtual_channels, cfg.adc_samples);
    const RangeProfiles prof = range_fft(cube, cfg);
    for (const auto& v : prof.data) CHECK(std::abs(v) == 0.0f);
}

TEST_CASE("range_fft: two scatterers two bins apart give two local maxima") {
    RadarConfig cfg;
    cfg.n_frames = 1;
    const double bin = cfg.range_bin_m(256);
    const double d1 = 16.0 * bin;
    const double d2 = 21.0 * bin;
    Scene s = static_scene({0.0, d1, 0.0});
    Scatterer other;
    other.position = {0.0, d2, 0.0};
    other.reflectivity = 1.0;
    s.clutter.push_back(other);

    const RangeProfiles prof = range_fft(simulate_data_cube(s, cfg), cfg);
    auto mag = [&](int b) { return std::abs(prof.at(0, 0, 0, b)); };
    for (int b : {16, 21}) {
        CHECK(mag(b) > mag(b - 2));
        CHECK(mag(b) > mag(b + 2));
        CHECK(mag(b) > 0.1);
    }
}

TEST_CASE("range_fft satisfies Parseval per chirp") {
    RadarConfig cfg;
    cfg.n_frames = 1;
    Scene s = static_scene({0.07, 0.83, 0.0});
    s.phase_noise_std_rad = 0.02;
    s.rng_seed = 5;
    const DataCube cube = simulate_data_cube(s, cfg);
    const RangeProfiles prof = range_fft(cube, cfg);

    double time_e = 0.0, freq_e = 0.0;
    for (int n = 0; n < cfg.adc_samples; ++n) time_e += std::norm(std::complex<double>(cube.at(0, 1, 2, n)));
    for (int b = 0; b < prof.fft_size; ++b) freq_e += std::norm(std::complex<double>(prof.at(0, 1, 2, b)));
    freq_e /= prof.fft_size;
    CHECK(freq_e == doctest::Approx(time_e).epsilon(1e-6));
}

TEST_CASE("angle_fft: boresight scatterer lands on the zero-angle bin") {
    RadarConfig cfg;
    cfg.n_frames = 1;
    const DataCube cube = simulate_data_cube(static_scene({0.0, 0.81, 0.0}), cfg);
    const RaMap map = angle_fft(range_fft(cube, cfg), cfg);

    const SpatialPoint loc = rough_localize(map);
    CHECK(std::abs(loc.x) < 0.81 * 0.04);
    CHECK(loc.y == doctest::Approx(0.81).epsilon(0.04));
}

TEST_CASE("angle_fft: off-axis scatterer lands on the predicted angle bin") {
    RadarConfig cfg;
    cfg.n_frames = 1;
    const double sin_theta = 0.375;  // exactly bin 6 of the 32-point transform with l = lambda/2
    const double r = 0.9;
    const DataCube cube = simulate_data_cube(
        static_scene({r * sin_theta, r * std::sqrt(1.0 - sin_theta * sin_theta), 0.0}), cfg);
    const RaMap map = angle_fft(range_fft(cube, cfg), cfg);

    std::size_t best_r = 0, best_a = 0;
    double best = -1.0;
    for (std::size_t rb = 0; rb < map.range_bins(); ++rb)
        for (std::size_t ab = 0; ab < map.angle_bins(); ++ab)
            if (map.at(rb, ab) > best) {
                best = map.at(rb, ab);
                best_r = rb;
                best_a = ab;
            }
    // Expected shifted bin: A/2 + A * l * sin(theta) / lambda = 16 + 6.
    CHECK(best_a == 22);
    CHECK(map.range_axis_m[best_r] == doctest::Approx(r).epsilon(0.05));
    CHECK(std::sin(map.angle_axis_rad[best_a]) == doctest::Approx(sin_theta).epsilon(1e-9));
}

TEST_CASE("angle_fft: identical signal on all channels is an impulse at zero angle") {
    RangeProfiles prof;
    prof.n_frames = 1;
    prof.chirps = 1;
    prof.channels = 8;
    prof.fft_size = 8;
    prof.bin_spacing_m = 0.045;
    prof.data.assign(static_cast<std::size_t>(prof.channels) * prof.fft_size, {0.0f, 0.0f});
    for (int v = 0; v < prof.channels; ++v) prof.data[prof.index(0, 0, v, 2)] = {1.0f, 0.5f};

    RadarConfig cfg;
    const RaMap map = angle_fft(prof, cfg);
    const std::size_t zero_bin = map.angle_bins() / 2;  // asin(0)
    CHECK(map.angle_axis_rad[zero_bin] == 0.0);

    // Zero-padding turns the constant's DFT into a Dirichlet mainlobe; the
    // exact nulls sit on the unpadded 8-point grid, stride 32 / 8 = 4.
    std::size_t argmax = 0;
    for (std::size_t a = 1; a < map.angle_bins(); ++a)
        if (map.at(2, a) > map.at(2, argmax)) argmax = a;
    CHECK(argmax == zero_bin);
    const std::size_t stride = map.angle_bins() / 8;
    for (std::size_t a = 0; a < map.angle_bins(); a += stride) {
        if (a == zero_bin) continue;
        CHECK(map.at(2, a) < map.at(2, zero_bin) * 1e-5);
    }
    CHECK(map.at(2, zero_bin) > 1.0);
}

TEST_CASE("angle_fft requires at least two channels") {
    RangeProfiles prof;
    prof.n_frames = 1;
    prof.chirps = 1;
    prof.channels = 1;
    prof.fft_size = 4;
    prof.data.assign(4, {1.0f, 0.0f});
    RadarConfig cfg;
    CHECK_THROWS_AS(angle_fft(prof, cfg), std::invalid_argument);
}

TEST_CASE("rough_localize: single nonzero cell maps to (r sin, r cos, 0)") {
    RaMap map;
    map.range_axis_m = {0.0, 0.4, 0.8};
    map.angle_axis_rad = {-0.5, 0.0, 0.5};
    map.magnitudes.assign(9, 0.0);
    map.magnitudes[2 * 3 + 1] = 3.0;  // r = 0.8, theta = 0
    const SpatialPoint p = rough_localize(map);
    CHECK(p.x == 0.0);
    CHECK(p.y == doctest::Approx(0.8));
    CHECK(p.z == 0.0);

    map.magnitudes.assign(9, 0.0);
    CHECK_THROWS(rough_localize(map));
}

TEST_CASE("rough_localize picks the stronger of two targets") {
    RadarConfig cfg;
    cfg.n_frames = 1;
    Scene s = static_scene({0.1, 0.7, 0.0}, 1.0);
    Scatterer weak;
    weak.position = {-0.2, 1.1, 0.0};
    weak.reflectivity = 0.5;  // 6 dB weaker
    s.clutter.push_back(weak);
    const SpatialPoint loc = rough_localize(angle_fft(range_fft(simulate_data_cube(s, cfg), cfg), cfg));
    CHECK(loc.y == doctest::Approx(0.7).epsilon(0.05));
    CHECK(loc.x > 0.0);
}

TEST_CASE("rough_localize: seeded single-target scenes stay within one bin") {
    RadarConfig cfg;
    cfg.n_frames = 1;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ur(0.5, 1.2);
    std::uniform_real_distribution<double> ut(-0.45, 0.45);
    for (int trial = 0; trial < 10; ++trial) {
        const double r = ur(rng);
        const double theta = ut(rng);
        const SpatialPoint truth{r * std::sin(theta), r * std::cos(theta), 0.0};
        const DataCube cube = simulate_data_cube(static_scene(truth), cfg);
        const RangeProfiles prof = range_fft(cube, cfg);
        const RaMap map = angle_fft(prof, cfg);
        const SpatialPoint loc = rough_localize(map);

        CHECK(std::abs(loc.norm() - r) <= prof.bin_spacing_m);
        const double sin_step = cfg.wavelength_m / (cfg.channel_spacing_m * 32.0);
        CHECK(std::abs(std::sin(std::atan2(loc.x, loc.y)) - std::sin(theta)) <= sin_step);
    }
}

TEST_CASE("extract: static scatterer has constant phase at its own location") {
    RadarConfig cfg;
    cfg.n_frames = 16;
    const SpatialPoint p{0.05, 0.75, 0.0};
    const DataCube cube = simulate_data_cube(static_scene(p), cfg);
    const PointSignal sig = extract_point_signal(cube, p, cfg);

    const double ref = std::arg(sig.samples[0]);
    for (const auto& v : sig.samples) CHECK(std::abs(std::arg(v) - ref) < 1e-6);
    CHECK(std::abs(sig.samples[0]) > 0.5);
}

TEST_CASE("extract: moving three range bins away collapses the magnitude") {
    RadarConfig cfg;
    cfg.n_frames = 4;
    const double bin = cfg.range_bin_m(256);
    const SpatialPoint truth{0.0, 20.0 * bin, 0.0};
    const DataCube cube = simulate_data_cube(static_scene(truth), cfg);

    const PointSignal on = extract_point_signal(cube, truth, cfg);
    const PointSignal off = extract_point_signal(cube, {0.0, 23.0 * bin, 0.0}, cfg);
    CHECK(std::abs(on.samples[0]) >= 10.0 * std::abs(off.samples[0]));
}

TEST_CASE("round trip: extraction at the true point recovers the injected motion") {
    RadarConfig cfg;
    cfg.n_frames = 800;
    const SpatialPoint p{0.12, 0.78, 0.0};
    const Scene s = cardiac_scene(p, cfg);
    const DataCube cube = simulate_data_cube(s, cfg);
    const DisplacementSeries rec = unwrap_phase(extract_point_signal(cube, p, cfg), cfg.wavelength_m);

    std::vector<double> injected = s.cardiac_motion.samples;
    double mean = 0.0;
    for (double v : injected) mean += v;
    mean /= static_cast<double>(injected.size());
    for (double& v : injected) v -= mean;

    CHECK(pcc(rec.samples, injected) > 0.99);

    double rms_rec = 0.0, rms_inj = 0.0;
    for (std::size_t i = 0; i < injected.size(); ++i) {
        rms_rec += rec.samples[i] * rec.samples[i];
        rms_inj += injected[i] * injected[i];
    }
    rms_rec = std::sqrt(rms_rec / injected.size());
    rms_inj = std::sqrt(rms_inj / injected.size());
    CHECK(std::abs(rms_rec - rms_inj) / rms_inj < 0.05);
}

TEST_CASE("unwrap: constant phase gives zero displacement") {
    PointSignal sig;
    sig.rate_hz = 200.0;
    sig.samples.assign(32, std::polar(1.0, 0.7));
    const DisplacementSeries d = unwrap_phase(sig, 0.0039);
    for (double v : d.samples) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("unwrap: a 0 to pi ramp ends lambda/4 above its start") {
    PointSignal sig;
    sig.rate_hz = 200.0;
    const std::size_t n = 100;
    for (std::size_t i = 0; i < n; ++i)
        sig.samples.push_back(std::polar(1.0, M_PI * static_cast<double>(i) / (n - 1)));
    const DisplacementSeries d = unwrap_phase(sig, 0.0039);
    CHECK(d.samples.back() - d.samples.front() == doctest::Approx(0.0039 / 4.0).epsilon(1e-9));
}

TEST_CASE("unwrap: crossing the +-pi seam leaves no jump artifact") {
    PointSignal sig;
    sig.rate_hz = 200.0;
    const std::size_t n = 200;
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = 2.0 * M_PI * static_cast<double>(i) / (n - 1);  // displacement lambda/2
        sig.samples.push_back(std::polar(1.0, phase));  // arg() wraps this to (-pi, pi]
    }
    const DisplacementSeries d = unwrap_phase(sig, 0.0039);
    CHECK(d.samples.back() - d.samples.front() == doctest::Approx(0.0039 / 2.0).epsilon(1e-9));
    for (std::size_t i = 1; i < n; ++i)
        CHECK(std::abs(d.samples[i] - d.samples[i - 1]) < 0.0039 / 64.0);
}

TEST_CASE("bandpass_differentiate: respiration-band input is crushed") {
    DisplacementSeries in;
    in.rate_hz = 200.0;
    for (std::size_t i = 0; i < 1600; ++i)
        in.samples.push_back(1e-3 * std::sin(2.0 * M_PI * 0.2 * static_cast<double>(i) / 200.0));
    const DisplacementSeries out = bandpass_differentiate(in);

    double rms_in = 0.0, rms_out = 0.0;
    for (std::size_t i = 0; i < in.samples.size(); ++i) {
        rms_in += in.samples[i] * in.samples[i];
        rms_out += out.samples[i] * out.samples[i];
    }
    CHECK(std::sqrt(rms_out) <= 0.1 * std::sqrt(rms_in));
}

TEST_CASE("bandpass_differentiate: filter alone attenuates 0.25 Hz by 20 dB") {
    DisplacementSeries in;
    in.rate_hz = 200.0;
    const double f = 0.25;
    for (std::size_t i = 0; i < 1600; ++i)
        in.samples.push_back(std::sin(2.0 * M_PI * f * static_cast<double>(i) / 200.0));
    const DisplacementSeries out = bandpass_differentiate(in);

    // Compare against the differentiated unfiltered component, amplitude 2 pi f.
    double rms_out = 0.0;
    for (double v : out.samples) rms_out += v * v;
    rms_out = std::sqrt(rms_out / out.samples.size());
    const double rms_diff_in = 2.0 * M_PI * f / std::sqrt(2.0);
    CHECK(rms_out <= 0.1 * rms_diff_in);
}

TEST_CASE("bandpass_differentiate: 10 Hz passes within 3 dB of the plain derivative") {
    DisplacementSeries in;
    in.rate_hz = 200.0;
    for (std::size_t i = 0; i < 1600; ++i)
        in.samples.push_back(std::sin(2.0 * M_PI * 10.0 * static_cast<double>(i) / 200.0));
    const DisplacementSeries out = bandpass_differentiate(in);

    double rms_out = 0.0;
    for (std::size_t i = 100; i + 100 < out.samples.size(); ++i) rms_out += out.samples[i] * out.samples[i];
    rms_out = std::sqrt(rms_out / (out.samples.size() - 200));
    const double expected = 2.0 * M_PI * 10.0 / std::sqrt(2.0);
    CHECK(rms_out > expected / std::sqrt(2.0));
    CHECK(rms_out < expected * std::sqrt(2.0));
}

TEST_CASE("bandpass_differentiate: zero input, zero output, exact linearity") {
    DisplacementSeries zero;
    zero.rate_hz = 200.0;
    zero.samples.assign(800, 0.0);
    for (double v : bandpass_differentiate(zero).samples) CHECK(v == 0.0);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1e-4);
    DisplacementSeries a = zero, b = zero, ab = zero;
    for (std::size_t i = 0; i < 800; ++i) {
        a.samples[i] = g(rng);
        b.samples[i] = g(rng);
        ab.samples[i] = a.samples[i] + b.samples[i];
    }
    const auto fa = bandpass_differentiate(a);
    const auto fb = bandpass_differentiate(b);
    const auto fab = bandpass_differentiate(ab);
    for (std::size_t i = 0; i < 800; ++i)
        CHECK(fab.samples[i] == doctest::Approx(fa.samples[i] + fb.samples[i]).epsilon(1e-9));
}

TEST_CASE("bandpass_differentiate rejects low sample rates") {
    DisplacementSeries in;
    in.rate_hz = 50.0;
    in.samples.assign(400, 0.0);
    CHECK_THROWS_AS(bandpass_differentiate(in), std::invalid_argument);
}

TEST_CASE("parallel kernels match their serial references bit for bit") {
    RadarConfig cfg;
    cfg.n_frames = 64;
    Scene s = cardiac_scene({0.1, 0.8, 0.05}, cfg);
    s.phase_noise_std_rad = 0.02;
    s.rng_seed = 77;

    const DataCube par = simulate_data_cube(s, cfg);
    const DataCube ser = simulate_data_cube_serial(s, cfg);
    REQUIRE(par.data().size() == ser.data().size());
    for (std::size_t i = 0; i < par.data().size(); ++i) CHECK(par.data()[i] == ser.data()[i]);

    const SpatialPoint probe{0.11, 0.79, 0.04};
    const PointSignal sp = extract_point_signal(par, probe, cfg);
    const PointSignal ss = extract_point_signal_serial(par, probe, cfg);
    REQUIRE(sp.samples.size() == ss.samples.size());
    for (std::size_t i = 0; i < sp.samples.size(); ++i) CHECK(sp.samples[i] == ss.samples[i]);
}
