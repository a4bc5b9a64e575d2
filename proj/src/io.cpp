// SPDX-License-Identifier: Apache-2.0
//
// cardiofocus: cardiac-point focusing, tracking and sparse heartbeat
// recovery for FMCW radar data cubes.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "cardiofocus/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "cardiofocus/rng.hpp"
#include "cardiofocus/scene_sim.hpp"

namespace cardiofocus {

namespace {

constexpr char kMagic[8] = {'C', 'F', 'C', 'U', 'B', 'E', '0', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& os, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

void put_f32(std::ostream& os, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

float get_f32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
}

}  // namespace

void write_cube(const std::string& path, const DataCube& cube, const RadarConfig& cfg) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_cube: cannot open " + path);

    os.write(kMagic, 8);
    put_u32(os, static_cast<std::uint32_t>(cube.n_frames()));
    put_u32(os, static_cast<std::uint32_t>(cube.chirps()));
    put_u32(os, static_cast<std::uint32_t>(cube.channels()));
    put_u32(os, static_cast<std::uint32_t>(cube.samples()));
    put_f64(os, cfg.adc_rate_hz);
    put_f64(os, cfg.frame_rate_hz());
    put_f64(os, cfg.wavelength_m);
    put_f64(os, cfg.slope_hz_per_s);
    put_f64(os, cfg.channel_spacing_m);

    for (const std::complex<float>& v : cube.data()) {
        put_f32(os, v.real());
        put_f32(os, v.imag());
    }
    if (!os) throw std::runtime_error("write_cube: write failed for " + path);
}

CubeFile read_cube(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_cube: cannot open " + path);

    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("read_cube: bad magic in " + path);

    const int frames = static_cast<int>(get_u32(is));
    const int chirps = static_cast<int>(get_u32(is));
    const int channels = static_cast<int>(get_u32(is));
    const int samples = static_cast<int>(get_u32(is));

    CubeFile out;
    out.cfg.adc_rate_hz = get_f64(is);
    const double frame_rate = get_f64(is);
    out.cfg.wavelength_m = get_f64(is);
    out.cfg.slope_hz_per_s = get_f64(is);
    out.cfg.channel_spacing_m = get_f64(is);
    out.cfg.frame_period_s = 1.0 / frame_rate;
    out.cfg.n_frames = frames;
    out.cfg.chirps_per_frame = chirps;
    out.cfg.virtual_channels = channels;
    out.cfg.adc_samples = samples;
    out.cfg.validate();

    out.cube = DataCube(frames, chirps, channels, samples);
    for (std::complex<float>& v : out.cube.data()) {
        const float re = get_f32(is);
        const float im = get_f32(is);
        v = {re, im};
    }
    if (!is) throw std::runtime_error("read_cube: truncated file " + path);
    return out;
}

void write_series_csv(const std::string& path, const DisplacementSeries& series) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_series_csv: cannot open " + path);
    os << "time_s,value\n";
    os.precision(12);
    for (std::size_t i = 0; i < series.samples.size(); ++i)
        os << static_cast<double>(i) / series.rate_hz << ',' << series.samples[i] << '\n';
}

DisplacementSeries read_series_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_series_csv: cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_series_csv: empty file " + path);

    DisplacementSeries out;
    std::vector<double> times;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("read_series_csv: malformed row in " + path);
        times.push_back(std::stod(line.substr(0, comma)));
        out.samples.push_back(std::stod(line.substr(comma + 1)));
    }
    if (times.size() < 2) throw std::runtime_error("read_series_csv: need >= 2 rows in " + path);
    out.rate_hz = 1.0 / (times[1] - times[0]);
    return out;
}

void write_point_signal_csv(const std::string& path, const PointSignal& sig) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_point_signal_csv: cannot open " + path);
    os << "time_s,real,imag\n";
    os.precision(12);
    for (std::size_t i = 0; i < sig.samples.size(); ++i)
        os << static_cast<double>(i) / sig.rate_hz << ',' << sig.samples[i].real() << ','
           << sig.samples[i].imag() << '\n';
}

void write_ra_map_csv(const std::string& path, const RaMap& map) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_ra_map_csv: cannot open " + path);
    os.precision(9);
    os << "range_m\\angle_rad";
    for (double a : map.angle_axis_rad) os << ',' << a;
    os << '\n';
    for (std::size_t r = 0; r < map.range_bins(); ++r) {
        os << map.range_axis_m[r];
        for (std::size_t a = 0; a < map.angle_bins(); ++a) os << ',' << map.at(r, a);
        os << '\n';
    }
}

void write_trace_csv(const std::string& path, const CftState& state) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_trace_csv: cannot open " + path);
    os << "iteration,x,y,z,cost,Gamma,gamma,stage\n";
    os.precision(12);
    for (const TraceEntry& te : state.trace)
        os << te.iteration << ',' << te.point.x << ',' << te.point.y << ',' << te.point.z << ','
           << te.cost << ',' << te.big_gamma << ',' << te.gamma << ','
           << static_cast<char>(te.stage) << '\n';
}

void write_segments_csv(const std::string& path, const std::vector<SegmentResult>& segments) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_segments_csv: cannot open " + path);
    os << "segment,x,y,z,cost,evals\n";
    os.precision(12);
    for (const SegmentResult& s : segments)
        os << s.segment << ',' << s.e_b.x << ',' << s.e_b.y << ',' << s.e_b.z << ',' << s.cost_b
           << ',' << s.eval_count << '\n';
}

void write_matrix_csv(const std::string& path, const DenseMatrix& m) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_matrix_csv: cannot open " + path);
    os.precision(12);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (c) os << ',';
            os << m.at(r, c);
        }
        os << '\n';
    }
}

void write_cycles_csv(const std::string& path, const std::vector<CycleOutcome>& cycles) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_cycles_csv: cannot open " + path);
    os << "time,peak_error_ms,mdr_flag\n";
    os.precision(9);
    for (const CycleOutcome& c : cycles)
        os << c.truth_time_s << ',' << c.peak_error_ms << ',' << (c.missed ? 1 : 0) << '\n';
}

nlohmann::json config_to_json(const RadarConfig& cfg) {
    return nlohmann::json{{"wavelength_m", cfg.wavelength_m},
                          {"slope_hz_per_s", cfg.slope_hz_per_s},
                          {"adc_samples", cfg.adc_samples},
                          {"adc_rate_hz", cfg.adc_rate_hz},
                          {"chirps_per_frame", cfg.chirps_per_frame},
                          {"virtual_channels", cfg.virtual_channels},
                          {"channel_spacing_m", cfg.channel_spacing_m},
                          {"frame_period_s", cfg.frame_period_s},
                          {"n_frames", cfg.n_frames},
                          {"light_speed_m_s", cfg.light_speed_m_s}};
}

RadarConfig config_from_json(const nlohmann::json& j) {
    RadarConfig cfg;
    cfg.wavelength_m = j.value("wavelength_m", cfg.wavelength_m);
    cfg.slope_hz_per_s = j.value("slope_hz_per_s", cfg.slope_hz_per_s);
    cfg.adc_samples = j.value("adc_samples", cfg.adc_samples);
    cfg.adc_rate_hz = j.value("adc_rate_hz", cfg.adc_rate_hz);
    cfg.chirps_per_frame = j.value("chirps_per_frame", cfg.chirps_per_frame);
    cfg.virtual_channels = j.value("virtual_channels", cfg.virtual_channels);
    cfg.channel_spacing_m = j.value("channel_spacing_m", cfg.channel_spacing_m);
    cfg.frame_period_s = j.value("frame_period_s", cfg.frame_period_s);
    cfg.n_frames = j.value("n_frames", cfg.n_frames);
    cfg.light_speed_m_s = j.value("light_speed_m_s", cfg.light_speed_m_s);
    cfg.validate();
    return cfg;
}

nlohmann::json cost_report_to_json(const CostReport& report) {
    nlohmann::json j;
    if (report.feasible()) {
        j["cost"] = report.cost;
        j["infinite_cost"] = false;
    } else {
        j["cost"] = nullptr;
        j["infinite_cost"] = true;
    }
    j["fitted"] = {{"a1", report.fitted.a1}, {"a2", report.fitted.a2}, {"b1", report.fitted.b1},
                   {"b2", report.fitted.b2}, {"c1", report.fitted.c1}, {"c2", report.fitted.c2}};
    j["peaks"] = report.peaks;
    return j;
}

nlohmann::json sparse_problem_to_json(const SparseProblem& prob) {
    nlohmann::json j;
    j["h"] = prob.h;
    j["lambda_l1"] = prob.lambda_l1;
    j["phi_rows"] = prob.phi.rows;
    j["phi_cols"] = prob.phi.cols;
    j["phi"] = prob.phi.a;
    return j;
}

SparseProblem sparse_problem_from_json(const nlohmann::json& j) {
    SparseProblem prob;
    prob.h = j.at("h").get<std::vector<double>>();
    prob.lambda_l1 = j.at("lambda_l1").get<double>();
    prob.phi = DenseMatrix(j.at("phi_rows").get<std::size_t>(), j.at("phi_cols").get<std::size_t>());
    prob.phi.a = j.at("phi").get<std::vector<double>>();
    if (prob.phi.a.size() != prob.phi.rows * prob.phi.cols)
        throw std::runtime_error("sparse problem: phi size does not match its dimensions");
    return prob;
}

nlohmann::json sparse_code_to_json(const SparseCode& code) {
    nlohmann::json j;
    j["x"] = code.x;
    j["sparsity"] = code.hoyer;
    j["iterations"] = code.iterations;
    if (!code.target.empty()) j["target"] = code.target;
    return j;
}

nlohmann::json metric_report_to_json(const MetricReport& report) {
    nlohmann::json j;
    j["mean_peak_error_ms"] = report.mean_peak_error_ms;
    j["median_peak_error_ms"] = report.median_peak_error_ms;
    j["peak_error_defined"] = report.peak_error_defined;
    j["mdr"] = report.mdr;
    if (report.mse) j["mse"] = *report.mse; else j["mse"] = nullptr;
    if (report.pcc) j["pcc"] = *report.pcc; else j["pcc"] = nullptr;
    return j;
}

namespace {

SpatialPoint point_from_json(const nlohmann::json& j, const char* field) {
    if (!j.is_array() || j.size() != 3)
        throw std::runtime_error(std::string("scene: field '") + field +
                                 "' must be a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

TemplateParams pulse_from_json(const nlohmann::json& j) {
    TemplateParams p;
    p.a1 = j.value("a1", 1.2e-4);
    p.a2 = j.value("a2", 0.6e-4);
    p.b1 = j.value("b1_offset_s", 0.0);
    p.b2 = j.value("b2_offset_s", 0.25);
    p.c1 = j.value("c1_s", 0.03);
    p.c2 = j.value("c2_s", 0.05);
    return p;
}

}  // namespace

Scene build_scene(const nlohmann::json& recipe, const RadarConfig& cfg) {
    Scene scene;
    scene.rng_seed = recipe.value("rng_seed", 0ULL);
    if (!recipe.contains("cardiac_point"))
        throw std::runtime_error("scene: missing field 'cardiac_point'");
    scene.cardiac_point = point_from_json(recipe.at("cardiac_point"), "cardiac_point");
    scene.cardiac_reflectivity = recipe.value("cardiac_reflectivity", 1.0);
    scene.cardiac_radius_m = recipe.value("cardiac_radius_m", 0.05);
    if (scene.cardiac_radius_m <= 0.0)
        throw std::runtime_error("scene: cardiac_radius_m must be positive");
    scene.respiration_amp_m = recipe.value("respiration_amp_m", 0.0);
    scene.respiration_freq_hz = recipe.value("respiration_freq_hz", 0.25);
    if (scene.respiration_amp_m != 0.0 &&
        (scene.respiration_freq_hz < 0.1 || scene.respiration_freq_hz > 0.5))
        throw std::runtime_error("scene: respiration_freq_hz outside [0.1, 0.5]");
    scene.phase_noise_std_rad = recipe.value("phase_noise_std_rad", 0.0);

    const double rate = cfg.frame_rate_hz();
    const double duration = cfg.n_frames * cfg.frame_period_s;
    const TemplateParams pulse = pulse_from_json(recipe.value("pulse", nlohmann::json::object()));

    if (recipe.contains("beats_s")) {
        scene.schedule.beat_times_s = recipe.at("beats_s").get<std::vector<double>>();
    } else {
        const nlohmann::json gen = recipe.value("beat_generator", nlohmann::json::object());
        const double start = gen.value("start_s", 0.5);
        const double mean_rr = gen.value("mean_rr_s", 0.8);
        const double jitter = gen.value("jitter_std_s", 0.02);
        scene.schedule.rr_jitter_std_s = jitter;
        std::mt19937_64 rng(hash_combine(scene.rng_seed, 0x6265617473ULL, 0));
        std::normal_distribution<double> gauss(0.0, 1.0);
        double t = start;
        while (t < duration - 0.2) {
            scene.schedule.beat_times_s.push_back(t);
            t += std::clamp(mean_rr + jitter * gauss(rng), 0.4, 1.8);
        }
    }
    scene.schedule.validate();
    if (scene.schedule.beat_times_s.empty()) throw std::runtime_error("scene: no beats in range");

    scene.cardiac_pulses = synthesize_cardiac_displacement(scene.schedule, pulse, duration, rate);
    scene.cardiac_motion = scene.cardiac_pulses;
    if (scene.respiration_amp_m != 0.0) {
        for (std::size_t i = 0; i < scene.cardiac_motion.samples.size(); ++i)
            scene.cardiac_motion.samples[i] +=
                scene.respiration_amp_m *
                std::sin(2.0 * M_PI * scene.respiration_freq_hz * static_cast<double>(i) / rate);
    }
    scene.cardiac_motion.validate_physical();

    const double walk_std = recipe.value("clutter_walk_std_m", 1e-5);
    std::size_t walk_stream = 1000;
    auto add_clutter = [&](const SpatialPoint& p, double refl, double own_walk) {
        Scatterer s;
        s.position = p;
        s.reflectivity = refl;
        if (refl < 0.0) throw std::runtime_error("scene: negative clutter reflectivity");
        if (own_walk > 0.0)
            s.walk = random_walk_series(static_cast<std::size_t>(cfg.n_frames), rate, own_walk,
                                        scene.rng_seed, walk_stream);
        ++walk_stream;
        scene.clutter.push_back(std::move(s));
    };

    if (recipe.contains("clutter")) {
        for (const nlohmann::json& c : recipe.at("clutter"))
            add_clutter(point_from_json(c.at("point"), "clutter.point"), c.value("reflectivity", 1.0),
                        c.value("walk_std_m", walk_std));
    }
    if (recipe.contains("clutter_generator")) {
        const nlohmann::json& gen = recipe.at("clutter_generator");
        const int count = gen.value("count", 5);
        const SpatialPoint center = gen.contains("center")
                                        ? point_from_json(gen.at("center"), "clutter_generator.center")
                                        : scene.cardiac_point;
        std::vector<double> spread = gen.value("spread_m", std::vector<double>{0.3, 0.15, 0.3});
        if (spread.size() != 3) throw std::runtime_error("scene: spread_m must have 3 entries");
        const double rmin = gen.value("reflectivity_min", 0.3);
        const double rmax = gen.value("reflectivity_max", 1.2);
        std::mt19937_64 rng(hash_combine(scene.rng_seed, 0x636c7574ULL, 0));
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::uniform_real_distribution<double> ur(rmin, rmax);
        for (int i = 0; i < count; ++i) {
            const SpatialPoint p = center + SpatialPoint{u(rng) * spread[0], u(rng) * spread[1],
                                                         u(rng) * spread[2]};
            add_clutter(p, ur(rng), walk_std);
        }
    }
    return scene;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << j.dump(2) << '\n';
}

}  // namespace cardiofocus
