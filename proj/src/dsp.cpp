// SPDX-License-Identifier: Apache-2.0
//
// cardiofocus: cardiac-point focusing, tracking and sparse heartbeat
// recovery for FMCW radar data cubes.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "cardiofocus/dsp.hpp"

#include <algorithm>
#include <cmath>

#include "cardiofocus/fft.hpp"

namespace cardiofocus {

RangeProfiles range_fft(const DataCube& cube, const RadarConfig& cfg) {
    if (cube.samples() < 2) throw std::invalid_argument("range_fft: need at least 2 ADC samples");

    RangeProfiles out;
    out.n_frames = cube.n_frames();
    out.chirps = cube.chirps();
    out.channels = cube.channels();
    out.fft_size = static_cast<int>(next_pow2(static_cast<std::size_t>(cube.samples())));
    out.bin_spacing_m = cfg.range_bin_m(out.fft_size);
    out.data.resize(static_cast<std::size_t>(out.n_frames) * out.chirps * out.channels *
                    out.fft_size);

#pragma omp parallel for schedule(static)
    for (int f = 0; f < out.n_frames; ++f) {
        std::vector<std::complex<double>> buf(static_cast<std::size_t>(out.fft_size));
        for (int c = 0; c < out.chirps; ++c) {
            for (int v = 0; v < out.channels; ++v) {
                std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
                for (int n = 0; n < cube.samples(); ++n)
                    buf[static_cast<std::size_t>(n)] = cube.at(f, c, v, n);
                fft_inplace(buf, false);
                for (int b = 0; b < out.fft_size; ++b)
                    out.data[out.index(f, c, v, b)] = std::complex<float>(
                        static_cast<float>(buf[static_cast<std::size_t>(b)].real()),
                        static_cast<float>(buf[static_cast<std::size_t>(b)].imag()));
            }
        }
    }
    return out;
}

RaMap angle_fft(const RangeProfiles& profiles, const RadarConfig& cfg) {
    if (profiles.channels < 2) throw std::invalid_argument("angle_fft: need >= 2 channels for AoA");
    if (profiles.n_frames < 1) throw std::invalid_argument("angle_fft: empty profiles");

    const int a_fft = static_cast<int>(next_pow2(static_cast<std::size_t>(4 * profiles.channels)));
    const int range_bins = profiles.fft_size / 2;  // positive beat frequencies only

    RaMap map;
    map.range_axis_m.resize(static_cast<std::size_t>(range_bins));
    for (int b = 0; b < range_bins; ++b)
        map.range_axis_m[static_cast<std::size_t>(b)] = b * profiles.bin_spacing_m;

    map.angle_axis_rad.resize(static_cast<std::size_t>(a_fft));
    for (int m = 0; m < a_fft; ++m) {
        const double s = (m - a_fft / 2) * cfg.wavelength_m / (cfg.channel_spacing_m * a_fft);
        map.angle_axis_rad[static_cast<std::size_t>(m)] = std::asin(std::clamp(s, -1.0, 1.0));
    }

    map.magnitudes.assign(static_cast<std::size_t>(range_bins) * a_fft, 0.0);
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(a_fft));
    for (int b = 0; b < range_bins; ++b) {
        for (int c = 0; c < profiles.chirps; ++c) {
            std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
            // Conjugating flips the transform direction so that a positive
            // incidence angle lands on a positive shifted bin.
            for (int v = 0; v < profiles.channels; ++v)
                buf[static_cast<std::size_t>(v)] = std::conj(std::complex<double>(
                    profiles.at(0, c, v, b)));
            fft_inplace(buf, false);
            for (int q = 0; q < a_fft; ++q) {
                const int m = (q + a_fft / 2) % a_fft;  // fftshift
                map.magnitudes[static_cast<std::size_t>(b) * a_fft + m] +=
                    std::abs(buf[static_cast<std::size_t>(q)]) / profiles.chirps;
            }
        }
    }
    return map;
}

SpatialPoint rough_localize(const RaMap& map) {
    if (map.magnitudes.empty()) throw std::invalid_argument("rough_localize: empty map");
    std::size_t best = 0;
    for (std::size_t i = 1; i < map.magnitudes.size(); ++i)
        if (map.magnitudes[i] > map.magnitudes[best]) best = i;
    if (map.magnitudes[best] <= 0.0) throw std::runtime_error("rough_localize: no target");

    const std::size_t r = best / map.angle_bins();
    const std::size_t a = best % map.angle_bins();
    const double range = map.range_axis_m[r];
    const double theta = map.angle_axis_rad[a];
    return {range * std::sin(theta), range * std::cos(theta), 0.0};
}

namespace {

// Conjugate model phase per (channel, sample) for one steering point. Both
// dimensions are tapered for sidelobe control (Hann along fast time,
// Hamming across the short channel axis); the overall scale makes an
// on-point unit scatterer come out at amplitude 1.
std::vector<std::complex<float>> steering_table(const SpatialPoint& point, const RadarConfig& cfg,
                                                int chirps) {
    const int n_count = cfg.adc_samples;
    const int v_count = cfg.virtual_channels;

    std::vector<double> fast_taper(static_cast<std::size_t>(n_count));
    double fast_sum = 0.0;
    for (int n = 0; n < n_count; ++n) {
        fast_taper[static_cast<std::size_t>(n)] =
            0.5 - 0.5 * std::cos(2.0 * M_PI * n / (n_count - 1));
        fast_sum += fast_taper[static_cast<std::size_t>(n)];
    }
    std::vector<double> chan_taper(static_cast<std::size_t>(v_count), 1.0);
    double chan_sum = static_cast<double>(v_count);
    if (v_count > 1) {
        chan_sum = 0.0;
        for (int v = 0; v < v_count; ++v) {
            chan_taper[static_cast<std::size_t>(v)] =
                0.54 - 0.46 * std::cos(2.0 * M_PI * v / (v_count - 1));
            chan_sum += chan_taper[static_cast<std::size_t>(v)];
        }
    }
    const double scale = 1.0 / (static_cast<double>(chirps) * chan_sum * fast_sum);

    std::vector<std::complex<float>> w(static_cast<std::size_t>(v_count) * n_count);
    const double r_tx = point.norm();
    for (int v = 0; v < v_count; ++v) {
        const double dx = point.x - cfg.channel_x_m(v);
        const double round_trip = r_tx + std::sqrt(dx * dx + point.y * point.y + point.z * point.z);
        const double beat_hz = cfg.slope_hz_per_s * round_trip / cfg.light_speed_m_s;
        const double carrier = 2.0 * M_PI * round_trip / cfg.wavelength_m;
        const double step = -2.0 * M_PI * beat_hz * cfg.adc_period_s();
        std::complex<double> z(std::cos(carrier), -std::sin(carrier));
        const std::complex<double> rot(std::cos(step), std::sin(step));
        const double vw = chan_taper[static_cast<std::size_t>(v)] * scale;
        for (int n = 0; n < n_count; ++n) {
            const std::complex<double> tap = z * (fast_taper[static_cast<std::size_t>(n)] * vw);
            w[static_cast<std::size_t>(v) * n_count + n] = std::complex<float>(
                static_cast<float>(tap.real()), static_cast<float>(tap.imag()));
            z *= rot;
        }
    }
    return w;
}

std::complex<double> steer_frame(const DataCube& cube, int f,
                                 const std::vector<std::complex<float>>& w) {
    const int c_count = cube.chirps();
    const int v_count = cube.channels();
    const int n_count = cube.samples();
    std::complex<double> acc(0.0, 0.0);
    for (int c = 0; c < c_count; ++c) {
        for (int v = 0; v < v_count; ++v) {
            const std::complex<float>* row = &cube.at(f, c, v, 0);
            const std::complex<float>* wv = w.data() + static_cast<std::size_t>(v) * n_count;
            std::complex<double> row_acc(0.0, 0.0);
            for (int n = 0; n < n_count; ++n) row_acc += std::complex<double>(row[n] * wv[n]);
            acc += row_acc;
        }
    }
    return acc;
}

}  // namespace

PointSignal extract_point_signal(const DataCube& cube, const SpatialPoint& point,
                                 const RadarConfig& cfg) {
    if (point.norm() > cfg.max_range_m())
        throw std::invalid_argument("extract_point_signal: point beyond max range");
    const auto w = steering_table(point, cfg, cube.chirps());
    PointSignal out;
    out.point = point;
    out.rate_hz = cfg.frame_rate_hz();
    out.samples.resize(static_cast<std::size_t>(cube.n_frames()));
#pragma omp parallel for schedule(static)
    for (int f = 0; f < cube.n_frames(); ++f)
        out.samples[static_cast<std::size_t>(f)] = steer_frame(cube, f, w);
    return out;
}

PointSignal extract_point_signal_serial(const DataCube& cube, const SpatialPoint& point,
                                        const RadarConfig& cfg) {
    if (point.norm() > cfg.max_range_m())
        throw std::invalid_argument("extract_point_signal: point beyond max range");
    const auto w = steering_table(point, cfg, cube.chirps());
    PointSignal out;
    out.point = point;
    out.rate_hz = cfg.frame_rate_hz();
    out.samples.resize(static_cast<std::size_t>(cube.n_frames()));
    for (int f = 0; f < cube.n_frames(); ++f)
        out.samples[static_cast<std::size_t>(f)] = steer_frame(cube, f, w);
    return out;
}

DisplacementSeries unwrap_phase(const PointSignal& sig, double wavelength_m) {
    if (sig.samples.size() < 2) throw std::invalid_argument("unwrap_phase: need >= 2 frames");

    const std::size_t n = sig.samples.size();
    std::vector<double> phase(n);
    phase[0] = std::arg(sig.samples[0]);
    for (std::size_t i = 1; i < n; ++i) {
        double d = std::arg(sig.samples[i]) - std::arg(sig.samples[i - 1]);
        d -= 2.0 * M_PI * std::round(d / (2.0 * M_PI));
        phase[i] = phase[i - 1] + d;
    }

    DisplacementSeries out;
    out.rate_hz = sig.rate_hz;
    out.samples.resize(n);
    const double scale = wavelength_m / (4.0 * M_PI);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.samples[i] = scale * phase[i];
        mean += out.samples[i];
    }
    mean /= static_cast<double>(n);
    for (double& s : out.samples) s -= mean;
    return out;
}

namespace {

struct Biquad {
    double b0, b1, b2, a1, a2;  // a0 normalized to 1

    void apply(std::vector<double>& x) const {
        double z1 = 0.0, z2 = 0.0;
        for (double& v : x) {
            const double in = v;
            const double out = b0 * in + z1;
            z1 = b1 * in - a1 * out + z2;
            z2 = b2 * in - a2 * out;
            v = out;
        }
    }
};

Biquad butterworth_highpass(double fc, double rate) {
    const double w = std::tan(M_PI * fc / rate);
    const double q = 1.0 / std::sqrt(2.0);
    const double norm = 1.0 / (1.0 + w / q + w * w);
    return {norm, -2.0 * norm, norm, 2.0 * (w * w - 1.0) * norm, (1.0 - w / q + w * w) * norm};
}

Biquad butterworth_lowpass(double fc, double rate) {
    const double w = std::tan(M_PI * fc / rate);
    const double q = 1.0 / std::sqrt(2.0);
    const double norm = 1.0 / (1.0 + w / q + w * w);
    return {w * w * norm, 2.0 * w * w * norm, w * w * norm, 2.0 * (w * w - 1.0) * norm,
            (1.0 - w / q + w * w) * norm};
}

// Forward-backward run of both sections with odd-reflection padding long
// enough for the 0.5 Hz transient to settle.
std::vector<double> filtfilt_bandpass(const std::vector<double>& x, double rate) {
    const Biquad hp = butterworth_highpass(0.5, rate);
    const Biquad lp = butterworth_lowpass(50.0, rate);

    const std::size_t n = x.size();
    const std::size_t pad = std::min(n - 1, static_cast<std::size_t>(std::lround(2.0 * rate)));

    std::vector<double> buf(n + 2 * pad);
    for (std::size_t i = 0; i < pad; ++i) buf[i] = 2.0 * x[0] - x[pad - i];
    for (std::size_t i = 0; i < n; ++i) buf[pad + i] = x[i];
    for (std::size_t i = 0; i < pad; ++i) buf[pad + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];

    hp.apply(buf);
    lp.apply(buf);
    std::reverse(buf.begin(), buf.end());
    hp.apply(buf);
    lp.apply(buf);
    std::reverse(buf.begin(), buf.end());

    return {buf.begin() + static_cast<std::ptrdiff_t>(pad),
            buf.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace

DisplacementSeries bandpass_differentiate(const DisplacementSeries& disp) {
    if (disp.rate_hz < 100.0)
        throw std::invalid_argument("bandpass_differentiate: rate below 100 Hz, passband infeasible");
    if (disp.samples.size() < 8)
        throw std::invalid_argument("bandpass_differentiate: series too short");

    const std::vector<double> filtered = filtfilt_bandpass(disp.samples, disp.rate_hz);

    DisplacementSeries out;
    out.rate_hz = disp.rate_hz;
    const std::size_t n = filtered.size();
    out.samples.resize(n);
    out.samples[0] = (filtered[1] - filtered[0]) * disp.rate_hz;
    for (std::size_t i = 1; i + 1 < n; ++i)
        out.samples[i] = (filtered[i + 1] - filtered[i - 1]) * disp.rate_hz * 0.5;
    out.samples[n - 1] = (filtered[n - 1] - filtered[n - 2]) * disp.rate_hz;
    return out;
}

}  // namespace cardiofocus
