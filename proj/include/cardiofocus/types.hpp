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

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cardiofocus {

// 3D point in meters. Axes: x horizontal (cross-range), y radial
// (boresight), z vertical. The radar array sits at the origin along x.
struct SpatialPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double inf_dist(const SpatialPoint& o) const {
        return std::max({std::abs(x - o.x), std::abs(y - o.y), std::abs(z - o.z)});
    }
    double dist(const SpatialPoint& o) const {
        const double dx = x - o.x, dy = y - o.y, dz = z - o.z;
        return std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    SpatialPoint operator+(const SpatialPoint& o) const { return {x + o.x, y + o.y, z + o.z}; }
    SpatialPoint operator-(const SpatialPoint& o) const { return {x - o.x, y - o.y, z - o.z}; }
    SpatialPoint operator*(double s) const { return {x * s, y * s, z * s}; }
    bool operator==(const SpatialPoint& o) const { return x == o.x && y == o.y && z == o.z; }
};

// Waveform and array geometry. Defaults match a 77 GHz TDM-MIMO front end
// with 2x4 antennas read out as 8 virtual channels at a 200 Hz frame rate.
struct RadarConfig {
    double wavelength_m = 0.0039;           // lambda
    double slope_hz_per_s = 65e6 / 1e-6;    // chirp slope k
    int adc_samples = 256;                  // N, per chirp
    double adc_rate_hz = 5e6;
    int chirps_per_frame = 2;               // C
    int virtual_channels = 8;               // V
    double channel_spacing_m = 0.0039 / 2;  // l
    double frame_period_s = 0.005;
    int n_frames = 800;
    double light_speed_m_s = 2.998e8;

    double frame_rate_hz() const { return 1.0 / frame_period_s; }
    double adc_period_s() const { return 1.0 / adc_rate_hz; }

    // Nyquist bound on the beat frequency caps the usable range.
    double max_range_m() const {
        return light_speed_m_s * adc_rate_hz / (2.0 * slope_hz_per_s) / 2.0;
    }
    // Range-bin spacing of an fft_size-point range FFT.
    double range_bin_m(int fft_size) const {
        return light_speed_m_s * adc_rate_hz / (2.0 * slope_hz_per_s * fft_size);
    }
    // Horizontal position of virtual channel v, array centered on the origin.
    double channel_x_m(int v) const {
        return (v - 0.5 * (virtual_channels - 1)) * channel_spacing_m;
    }

    void validate() const {
        if (wavelength_m <= 0 || slope_hz_per_s <= 0 || adc_rate_hz <= 0 ||
            channel_spacing_m <= 0 || frame_period_s <= 0 || light_speed_m_s <= 0)
            throw std::invalid_argument("RadarConfig: all rates and lengths must be positive");
        if (adc_samples < 2 || chirps_per_frame < 1 || virtual_channels < 1 || n_frames < 1)
            throw std::invalid_argument("RadarConfig: all counts must be positive");
    }
};

// Real-valued series sampled at a fixed rate. Used for chest displacement
// (meters) and for every derived 1D signal in the processing chain.
struct DisplacementSeries {
    std::vector<double> samples;
    double rate_hz = 200.0;

    std::size_t size() const { return samples.size(); }
    double duration_s() const { return samples.size() / rate_hz; }

    // Physical chest motion stays well under 5 cm; series violating the
    // bound indicate a corrupted scene or a unit mistake upstream.
    void validate_physical() const {
        for (double s : samples) {
            if (!std::isfinite(s)) throw std::invalid_argument("DisplacementSeries: non-finite sample");
            if (std::abs(s) >= 0.05) throw std::invalid_argument("DisplacementSeries: |sample| >= 0.05 m");
        }
    }
};

// Complex per-frame signal extracted at one spatial point.
struct PointSignal {
    std::vector<std::complex<double>> samples;
    SpatialPoint point;
    double rate_hz = 200.0;
};

// Ground-truth heartbeat instants. Gaps are bounded to the 30-180 bpm band.
struct HeartbeatSchedule {
    std::vector<double> beat_times_s;
    double rr_jitter_std_s = 0.0;

    void validate() const {
        for (std::size_t i = 1; i < beat_times_s.size(); ++i) {
            const double gap = beat_times_s[i] - beat_times_s[i - 1];
            if (gap <= 0.0) throw std::invalid_argument("HeartbeatSchedule: beat times must be strictly increasing");
            if (gap < 0.33 || gap > 2.0)
                throw std::invalid_argument("HeartbeatSchedule: RR interval outside [0.33, 2.0] s");
        }
    }
};

// Double-Gaussian pulse parameters. In a synthesis context b1/b2 are
// offsets from the beat instant; in a fitting context they are absolute
// times within the segment.
struct TemplateParams {
    double a1 = 0.0;  // amplitude, first vibration (dominant)
    double a2 = 0.0;  // amplitude, second vibration
    double b1 = 0.0;  // center, seconds
    double b2 = 0.0;
    double c1 = 0.03;  // width, seconds
    double c2 = 0.05;

    double eval(double t) const {
        const double d1 = (t - b1) / c1;
        const double d2 = (t - b2) / c2;
        return a1 * std::exp(-0.5 * d1 * d1) + a2 * std::exp(-0.5 * d2 * d2);
    }
};

// Axis-aligned search box for the focusing optimizer.
struct SearchSpace {
    SpatialPoint center;
    double half_extent_x = 0.2;
    double half_extent_y = 0.1;
    double half_extent_z = 0.2;

    bool contains(const SpatialPoint& p) const {
        return std::abs(p.x - center.x) <= half_extent_x &&
               std::abs(p.y - center.y) <= half_extent_y &&
               std::abs(p.z - center.z) <= half_extent_z;
    }
    // Largest per-axis distance from p to the far face of the box.
    double reach_from(const SpatialPoint& p) const {
        return std::max({std::abs(p.x - center.x) + half_extent_x,
                         std::abs(p.y - center.y) + half_extent_y,
                         std::abs(p.z - center.z) + half_extent_z});
    }
};

// One point scatterer. Displacement is applied along the line of sight
// from the radar origin. Scatterers inside the cardiac radius additionally
// carry the cardiac motion (the chest patch moves as a whole).
struct Scatterer {
    SpatialPoint position;
    double reflectivity = 1.0;
    DisplacementSeries walk;  // per-frame micro-displacement; empty = static
};

struct Scene {
    SpatialPoint cardiac_point;
    double cardiac_reflectivity = 1.0;
    DisplacementSeries cardiac_motion;  // pulses + respiration, frame rate
    DisplacementSeries cardiac_pulses;  // pulses only, kept as ground truth
    HeartbeatSchedule schedule;
    double cardiac_radius_m = 0.05;
    std::vector<Scatterer> clutter;
    double respiration_amp_m = 0.0;
    double respiration_freq_hz = 0.25;
    double phase_noise_std_rad = 0.0;
    std::uint64_t rng_seed = 0;
};

// Complex baseband samples indexed (frame, chirp, channel, sample),
// row-major, immutable once rendered.
class DataCube {
  public:
    DataCube() = default;
    DataCube(int n_frames, int chirps, int channels, int samples)
        : n_frames_(n_frames), chirps_(chirps), channels_(channels), samples_(samples),
          data_(static_cast<std::size_t>(n_frames) * chirps * channels * samples) {
        if (n_frames < 1 || chirps < 1 || channels < 1 || samples < 1)
            throw std::invalid_argument("DataCube: dimensions must be positive");
    }

    int n_frames() const { return n_frames_; }
    int chirps() const { return chirps_; }
    int channels() const { return channels_; }
    int samples() const { return samples_; }

    std::size_t index(int f, int c, int v, int n) const {
        return ((static_cast<std::size_t>(f) * chirps_ + c) * channels_ + v) * samples_ + n;
    }
    std::complex<float>& at(int f, int c, int v, int n) { return data_[index(f, c, v, n)]; }
    const std::complex<float>& at(int f, int c, int v, int n) const { return data_[index(f, c, v, n)]; }

    const std::complex<float>* frame_data(int f) const {
        return data_.data() + index(f, 0, 0, 0);
    }
    std::size_t frame_stride() const {
        return static_cast<std::size_t>(chirps_) * channels_ * samples_;
    }

    std::vector<std::complex<float>>& data() { return data_; }
    const std::vector<std::complex<float>>& data() const { return data_; }

    DataCube slice_frames(int first, int count) const {
        if (first < 0 || count < 1 || first + count > n_frames_)
            throw std::out_of_range("DataCube::slice_frames: frame range out of bounds");
        DataCube out(count, chirps_, channels_, samples_);
        const std::size_t stride = frame_stride();
        std::copy(data_.begin() + first * stride, data_.begin() + (first + count) * stride,
                  out.data_.begin());
        return out;
    }

  private:
    int n_frames_ = 0;
    int chirps_ = 0;
    int channels_ = 0;
    int samples_ = 0;
    std::vector<std::complex<float>> data_;
};

}  // namespace cardiofocus
