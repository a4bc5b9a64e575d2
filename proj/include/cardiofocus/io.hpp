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

#include <string>

#include <json.hpp>

#include "cardiofocus/cft.hpp"
#include "cardiofocus/dsp.hpp"
#include "cardiofocus/metrics.hpp"
#include "cardiofocus/snr_cost.hpp"
#include "cardiofocus/sparse.hpp"
#include "cardiofocus/types.hpp"

namespace cardiofocus {

// --- CFCUBE01 binary cube format ------------------------------------------
//
// 64-byte little-endian header:
//   magic "CFCUBE01" | u32 frames, chirps, channels, samples |
//   f64 adc_rate_hz, frame_rate_hz, wavelength_m, slope_hz_per_s,
//   channel_spacing_m
// followed by interleaved f32 (real, imag) pairs in
// (frame, chirp, channel, sample) row-major order.

void write_cube(const std::string& path, const DataCube& cube, const RadarConfig& cfg);

struct CubeFile {
    DataCube cube;
    RadarConfig cfg;  // reconstructed from the header; light speed is the default
};

CubeFile read_cube(const std::string& path);

// --- CSV -------------------------------------------------------------------

void write_series_csv(const std::string& path, const DisplacementSeries& series);
DisplacementSeries read_series_csv(const std::string& path);

void write_point_signal_csv(const std::string& path, const PointSignal& sig);
void write_ra_map_csv(const std::string& path, const RaMap& map);
void write_matrix_csv(const std::string& path, const DenseMatrix& m);
void write_trace_csv(const std::string& path, const CftState& state);
void write_segments_csv(const std::string& path, const std::vector<SegmentResult>& segments);
void write_cycles_csv(const std::string& path, const std::vector<CycleOutcome>& cycles);

// --- JSON ------------------------------------------------------------------

nlohmann::json config_to_json(const RadarConfig& cfg);
RadarConfig config_from_json(const nlohmann::json& j);

nlohmann::json cost_report_to_json(const CostReport& report);
nlohmann::json metric_report_to_json(const MetricReport& report);

nlohmann::json sparse_problem_to_json(const SparseProblem& prob);
SparseProblem sparse_problem_from_json(const nlohmann::json& j);
nlohmann::json sparse_code_to_json(const SparseCode& code);

// Scene recipes hold generators (beat schedule, clutter placement) rather
// than sampled series; materialization is deterministic in rng_seed.
Scene build_scene(const nlohmann::json& recipe, const RadarConfig& cfg);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace cardiofocus
