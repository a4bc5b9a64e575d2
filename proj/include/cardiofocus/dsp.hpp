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

#include <complex>
#include <vector>

#include "cardiofocus/types.hpp"

namespace cardiofocus {

// Range FFT output, (frame, chirp, channel, bin) row-major.
struct RangeProfiles {
    int n_frames = 0;
    int chirps = 0;
    int channels = 0;
    int fft_size = 0;
    double bin_spacing_m = 0.0;
    std::vector<std::complex<float>> data;

    std::size_t index(int f, int c, int v, int b) const {
        return ((static_cast<std::size_t>(f) * chirps + c) * channels + v) * fft_size + b;
    }
    const std::complex<float>& at(int f, int c, int v, int b) const { return data[index(f, c, v, b)]; }
};

// Range-angle magnitude map with physical axes.
struct RaMap {
    std::vector<double> magnitudes;  // (range bin, angle bin) row-major
    std::vector<double> range_axis_m;
    std::vector<double> angle_axis_rad;

    std::size_t range_bins() const { return range_axis_m.size(); }
    std::size_t angle_bins() const { return angle_axis_rad.size(); }
    double at(std::size_t r, std::size_t a) const { return magnitudes[r * angle_bins() + a]; }
};

// FFT along fast time for every (frame, chirp, channel). The transform is
// zero-padded to the next power of two; bin spacing follows from cfg.
RangeProfiles range_fft(const DataCube& cube, const RadarConfig& cfg);

// FFT along the channel axis of the first frame, magnitudes averaged over
// its chirps. The angle axis is asin(bin * lambda / (l * fft_size)).
RaMap angle_fft(const RangeProfiles& profiles, const RadarConfig& cfg);

// Global magnitude maximum of the map as a 3D point (x, y, 0).
SpatialPoint rough_localize(const RaMap& map);

// Steers the cube to an arbitrary point: every (chirp, channel, sample) is
// multiplied by the conjugate of the model phase for the point's per-channel
// round-trip distance, then summed. One complex value per frame, normalized
// by the number of accumulated samples. Frames run in parallel.
PointSignal extract_point_signal(const DataCube& cube, const SpatialPoint& point,
                                 const RadarConfig& cfg);

// Single-threaded reference, bit-identical to the parallel kernel.
PointSignal extract_point_signal_serial(const DataCube& cube, const SpatialPoint& point,
                                        const RadarConfig& cfg);

// Itemwise +-pi phase unwrapping, then h = lambda * dphi / (4 pi),
// mean removed.
DisplacementSeries unwrap_phase(const PointSignal& sig, double wavelength_m);

// Zero-phase band-pass (0.5-50 Hz, two Butterworth biquads run
// forward-backward) followed by a central-difference differentiator.
DisplacementSeries bandpass_differentiate(const DisplacementSeries& disp);

}  // namespace cardiofocus
