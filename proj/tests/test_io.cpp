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

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cardiofocus/fixtures.hpp"
#include "cardiofocus/io.hpp"
#include "cardiofocus/scene_sim.hpp"

using namespace cardiofocus;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("cardiofocus_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("cube files round-trip bit for bit") {
    TempDir tmp;
    RadarConfig cfg;
    cfg.adc_samples = 32;
    cfg.n_frames = 8;
    Scene s;
    s.cardiac_reflectivity = 0.0;
    s.cardiac_point = {10, 10, 10};
    s.phase_noise_std_rad = 0.03;
    s.rng_seed = 7;
    Scatterer sc;
    sc.position = {0.1, 0.9, 0.0};
    s.clutter.push_back(sc);
    const DataCube cube = simulate_data_cube(s, cfg);

    const std::string path = tmp.file("cube.bin");
    write_cube(path, cube, cfg);

    // 64-byte header + 8 bytes per complex sample.
    CHECK(std::filesystem::file_size(path) == 64 + cube.data().size() * 8);

    const CubeFile back = read_cube(path);
    CHECK(back.cube.n_frames() == cube.n_frames());
    CHECK(back.cube.data() == cube.data());
    CHECK(back.cfg.wavelength_m == cfg.wavelength_m);
    CHECK(back.cfg.adc_rate_hz == cfg.adc_rate_hz);
    CHECK(back.cfg.slope_hz_per_s == cfg.slope_hz_per_s);
    CHECK(back.cfg.frame_period_s == doctest::Approx(cfg.frame_period_s).epsilon(1e-15));
}

TEST_CASE("read_cube rejects foreign files") {
    TempDir tmp;
    const std::string path = tmp.file("not_a_cube.bin");
    std::ofstream(path) << "definitely not radar data";
    CHECK_THROWS_WITH_AS(read_cube(path), doctest::Contains("bad magic"), std::runtime_error);
    CHECK_THROWS(read_cube(tmp.file("missing.bin")));
}

TEST_CASE("series CSV round-trips") {
    TempDir tmp;
    DisplacementSeries s;
    s.rate_hz = 200.0;
    for (int i = 0; i < 50; ++i) s.samples.push_back(1e-4 * std::sin(0.1 * i));

    const std::string path = tmp.file("series.csv");
    write_series_csv(path, s);
    const DisplacementSeries back = read_series_csv(path);
    CHECK(back.rate_hz == doctest::Approx(200.0).epsilon(1e-9));
    REQUIRE(back.samples.size() == s.samples.size());
    for (std::size_t i = 0; i < s.samples.size(); ++i)
        CHECK(back.samples[i] == doctest::Approx(s.samples[i]).epsilon(1e-10));
}

TEST_CASE("radar config JSON round-trips and validates") {
    RadarConfig cfg;
    cfg.adc_samples = 128;
    cfg.n_frames = 123;
    const RadarConfig back = config_from_json(config_to_json(cfg));
    CHECK(back.adc_samples == 128);
    CHECK(back.n_frames == 123);
    CHECK(back.wavelength_m == cfg.wavelength_m);

    nlohmann::json bad = config_to_json(cfg);
    bad["adc_samples"] = 0;
    CHECK_THROWS_AS(config_from_json(bad), std::invalid_argument);
}

TEST_CASE("scene recipes build deterministically and reject bad fields") {
    RadarConfig cfg;
    cfg.adc_samples = 32;
    cfg.n_frames = 800;
    const Fixture fx = make_focus_fixture(5);

    const Scene a = build_scene(fx.scene_recipe, cfg);
    const Scene b = build_scene(fx.scene_recipe, cfg);
    CHECK(a.cardiac_motion.samples == b.cardiac_motion.samples);
    REQUIRE(a.clutter.size() == b.clutter.size());
    for (std::size_t i = 0; i < a.clutter.size(); ++i)
        CHECK(a.clutter[i].walk.samples == b.clutter[i].walk.samples);

    nlohmann::json no_point = fx.scene_recipe;
    no_point.erase("cardiac_point");
    CHECK_THROWS_WITH_AS(build_scene(no_point, cfg), doctest::Contains("cardiac_point"),
                         std::runtime_error);

    nlohmann::json bad_resp = fx.scene_recipe;
    bad_resp["respiration_freq_hz"] = 0.9;
    CHECK_THROWS_WITH_AS(build_scene(bad_resp, cfg), doctest::Contains("respiration"),
                         std::runtime_error);

    nlohmann::json bad_radius = fx.scene_recipe;
    bad_radius["cardiac_radius_m"] = -0.1;
    CHECK_THROWS(build_scene(bad_radius, cfg));
}

TEST_CASE("point signal, RA map, and matrix CSV exports are well formed") {
    TempDir tmp;

    PointSignal sig;
    sig.rate_hz = 200.0;
    for (int i = 0; i < 10; ++i) sig.samples.push_back({0.1 * i, -0.2 * i});
    write_point_signal_csv(tmp.file("sig.csv"), sig);
    std::ifstream ss(tmp.file("sig.csv"));
    std::string line;
    std::getline(ss, line);
    CHECK(line == "time_s,real,imag");
    std::size_t rows = 0;
    while (std::getline(ss, line))
        if (!line.empty()) ++rows;
    CHECK(rows == sig.samples.size());

    RaMap map;
    map.range_axis_m = {0.0, 0.1};
    map.angle_axis_rad = {-0.5, 0.0, 0.5};
    map.magnitudes = {1, 2, 3, 4, 5, 6};
    write_ra_map_csv(tmp.file("map.csv"), map);
    std::ifstream ms(tmp.file("map.csv"));
    std::getline(ms, line);
    CHECK(line.find("range_m\\angle_rad") == 0);
    rows = 0;
    while (std::getline(ms, line))
        if (!line.empty()) ++rows;
    CHECK(rows == map.range_bins());

    DenseMatrix m(2, 3);
    m.at(0, 0) = 1.5;
    m.at(1, 2) = -2.0;
    write_matrix_csv(tmp.file("m.csv"), m);
    std::ifstream mm(tmp.file("m.csv"));
    std::getline(mm, line);
    CHECK(line == "1.5,0,0");
    std::getline(mm, line);
    CHECK(line == "0,0,-2");
}

TEST_CASE("trace CSV has one row per evaluation") {
    TempDir tmp;
    CftState st;
    st.trace.push_back({0, {1, 2, 3}, 0.5, 0.1, 0.1, EvalStage::Initial});
    st.trace.push_back({1, {4, 5, 6}, 0.25, 0.2, 0.1, EvalStage::Search});
    st.eval_count = 2;

    const std::string path = tmp.file("trace.csv");
    write_trace_csv(path, st);

    std::ifstream is(path);
    std::string line;
    std::getline(is, line);
    CHECK(line == "iteration,x,y,z,cost,Gamma,gamma,stage");
    std::size_t rows = 0;
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == st.eval_count);
}

TEST_CASE("malformed JSON reports the file and position") {
    TempDir tmp;
    const std::string path = tmp.file("broken.json");
    std::ofstream(path) << "{ \"cardiac_point\": [0.1, ";
    try {
        load_json_file(path);
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("broken.json") != std::string::npos);
    }
}

TEST_CASE("sparse problems and codes round-trip through JSON") {
    SparseProblem prob;
    prob.phi = DenseMatrix(3, 4);
    prob.phi.at(0, 1) = 1.0;
    prob.phi.at(2, 3) = -0.5;
    prob.h = {0.1, 0.2, 0.3};
    prob.lambda_l1 = 0.007;

    const SparseProblem back = sparse_problem_from_json(sparse_problem_to_json(prob));
    CHECK(back.h == prob.h);
    CHECK(back.lambda_l1 == prob.lambda_l1);
    CHECK(back.phi.a == prob.phi.a);
    CHECK(back.phi.rows == 3);
    CHECK(back.phi.cols == 4);

    nlohmann::json bad = sparse_problem_to_json(prob);
    bad["phi_cols"] = 7;
    CHECK_THROWS(sparse_problem_from_json(bad));

    SparseCode code;
    code.x = {0.0, 0.4};
    code.hoyer = 0.12;
    code.iterations = 42;
    const nlohmann::json cj = sparse_code_to_json(code);
    CHECK(cj["x"].size() == 2);
    CHECK(cj["sparsity"] == doctest::Approx(0.12));
    CHECK_FALSE(cj.contains("target"));
}

TEST_CASE("cost report JSON encodes infinite costs explicitly") {
    CostReport inf_report;
    const nlohmann::json j = cost_report_to_json(inf_report);
    CHECK(j["infinite_cost"] == true);
    CHECK(j["cost"].is_null());

    CostReport ok;
    ok.cost = 0.004;
    ok.peaks = {10, 170};
    const nlohmann::json k = cost_report_to_json(ok);
    CHECK(k["infinite_cost"] == false);
    CHECK(k["cost"] == doctest::Approx(0.004));
    CHECK(k["peaks"].size() == 2);
}
