// SPDX-License-Identifier: Apache-2.0
//
// cardiofocus: cardiac-point focusing, tracking and sparse heartbeat
// recovery for FMCW radar data cubes.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "cardiofocus/baselines.hpp"
#include "cardiofocus/cft.hpp"
#include "cardiofocus/dsp.hpp"
#include "cardiofocus/fixtures.hpp"
#include "cardiofocus/io.hpp"
#include "cardiofocus/metrics.hpp"
#include "cardiofocus/scene_sim.hpp"
#include "cardiofocus/snr_cost.hpp"
#include "cardiofocus/sparse.hpp"

using namespace cardiofocus;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

nlohmann::json point_json(const SpatialPoint& p) { return {p.x, p.y, p.z}; }

struct FocusOutput {
    SpatialPoint e0;
    CftResult result;
};

// The map only needs the first frame; avoid transforming the whole cube.
SpatialPoint localize_first_frame(const DataCube& cube, const RadarConfig& cfg) {
    return rough_localize(angle_fft(range_fft(cube.slice_frames(0, 1), cfg), cfg));
}

FocusOutput run_focus(const CubeFile& in, const CftParams& params, const SearchSpace& extents) {
    const SpatialPoint e0 = localize_first_frame(in.cube, in.cfg);
    SearchSpace omega = extents;
    omega.center = e0;
    const CostFn cost = [&](const SpatialPoint& p) {
        return point_cost(in.cube, p, in.cfg, omega).cost;
    };
    return {e0, cft_focus(e0, cost, params, omega)};
}

nlohmann::json focus_results_json(const FocusOutput& out, const CftParams& params) {
    nlohmann::json top = nlohmann::json::array();
    const TopPoints best = top_k_points(out.result.state, 10);
    for (const SpatialPoint& p : best.points) top.push_back(point_json(p));
    return nlohmann::json{{"e0", point_json(out.e0)},
                          {"e_b", point_json(out.result.best)},
                          {"cost_b", out.result.best_cost},
                          {"converged", out.result.best_cost < params.snr_d},
                          {"iterations", out.result.state.iteration},
                          {"eval_count", out.result.state.eval_count},
                          {"snr_d", params.snr_d},
                          {"k_max", params.k_max},
                          {"top_points", top},
                          {"top_points_flagged", best.flagged}};
}

// Shared bench logic: per-segment beat extraction for one method.
std::vector<double> beats_over_segments(const DataCube& cube, const RadarConfig& cfg,
                                        double segment_s,
                                        const std::function<DisplacementSeries(const DataCube&,
                                                                               const RadarConfig&,
                                                                               int)>& extractor) {
    const int fps = static_cast<int>(std::lround(segment_s * cfg.frame_rate_hz()));
    const int n_segments = cube.n_frames() / fps;
    RadarConfig seg_cfg = cfg;
    seg_cfg.n_frames = fps;
    std::vector<double> beats;
    for (int s = 0; s < n_segments; ++s) {
        const DataCube seg = cube.slice_frames(s * fps, fps);
        const DisplacementSeries disp = extractor(seg, seg_cfg, s);
        const std::vector<double> seg_beats =
            beat_times_from_displacement(disp, s * segment_s);
        beats.insert(beats.end(), seg_beats.begin(), seg_beats.end());
    }
    return beats;
}

struct BenchRow {
    std::string method;
    std::string trial;
    double range_m;
    double move_m;
    double peak_err_ms;
    double mdr;
    long evals;
    double wall_s;
};

void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "method,trial,range_m,move_m,peak_err_ms,mdr,evals,wall_s\n";
    os.precision(9);
    for (const BenchRow& r : rows)
        os << r.method << ',' << r.trial << ',' << r.range_m << ',' << r.move_m << ','
           << r.peak_err_ms << ',' << r.mdr << ',' << r.evals << ',' << r.wall_s << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* cap = std::getenv("CARDIOFOCUS_THREADS")) {
#ifdef _OPENMP
        const int n = std::atoi(cap);
        if (n > 0) omp_set_num_threads(n);
#endif
    }

    CLI::App app{"cardiofocus: FMCW radar cardiac focusing, tracking and evaluation"};
    app.require_subcommand(1);

    // --- simulate ----------------------------------------------------------
    std::string scene_path, config_path, cube_out = "cube.bin";
    std::optional<std::uint64_t> seed_override;
    auto* sim = app.add_subcommand("simulate", "Render a scene recipe into a data cube");
    sim->add_option("scene", scene_path, "scene recipe JSON")->required();
    sim->add_option("config", config_path, "radar config JSON")->required();
    std::uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    sim->add_option("--seed", sim_seed, "override the recipe rng_seed")
        ->each([&](const std::string&) { sim_seed_set = true; });
    sim->add_option("--out", cube_out, "output cube path");

    // --- focus --------------------------------------------------------------
    std::string focus_cube, focus_results = "results.json", focus_trace;
    CftParams focus_params;
    std::vector<double> omega_extents = {0.2, 0.1, 0.2};
    auto* focus = app.add_subcommand("focus", "Search the cardio-focused point in a cube");
    focus->add_option("cube", focus_cube, "input cube (CFCUBE01)")->required();
    focus->add_option("--snr-d", focus_params.snr_d, "target template-fit MSE");
    focus->add_option("--k-max", focus_params.k_max, "iteration limit");
    focus->add_option("--seed", focus_params.rng_seed, "sampling seed");
    focus->add_option("--omega", omega_extents, "search half-extents x y z (m)")->expected(3);
    focus->add_option("--out", focus_results, "results JSON path");
    focus->add_option("--out-trace", focus_trace, "evaluation trace CSV path");

    // --- track ---------------------------------------------------------------
    std::string track_cube, track_out = "segments.csv";
    double segment_s = 4.0;
    CftParams track_params;
    std::vector<double> track_extents = {0.2, 0.1, 0.2};
    auto* track = app.add_subcommand("track", "Track the cardio-focused point per segment");
    track->add_option("cube", track_cube, "input cube (CFCUBE01)")->required();
    track->add_option("--segment", segment_s, "segment length, seconds");
    track->add_option("--snr-d", track_params.snr_d, "target template-fit MSE");
    track->add_option("--k-max", track_params.k_max, "iteration limit");
    track->add_option("--seed", track_params.rng_seed, "sampling seed");
    track->add_option("--omega", track_extents, "search half-extents x y z (m)")->expected(3);
    track->add_option("--out", track_out, "per-segment CSV path");

    // --- recover --------------------------------------------------------------
    std::string rec_signal, rec_out = "code.json", rec_dict;
    double lambda_l1 = 1e-3, lambda_s = 0.01, pulse_width = 0.03;
    int rec_iter = 5000;
    double rec_tol = 1e-12;
    auto* recover = app.add_subcommand("recover", "Sparse heartbeat recovery from a signal CSV");
    recover->add_option("signal", rec_signal, "displacement CSV (time_s,value)")->required();
    recover->add_option("--lambda-l1", lambda_l1, "solver l1 weight");
    recover->add_option("--lambda-s", lambda_s, "sparsity penalty weight");
    recover->add_option("--pulse-width", pulse_width, "dictionary pulse width, seconds");
    recover->add_option("--max-iter", rec_iter, "solver iteration cap");
    recover->add_option("--tol", rec_tol, "relative objective tolerance");
    recover->add_option("--out", rec_out, "output JSON path");
    recover->add_option("--out-dict", rec_dict, "export the dictionary as a CSV matrix");

    // --- evaluate ---------------------------------------------------------------
    std::string eval_signal, eval_truth, eval_out = "metrics.json", eval_cycles;
    auto* evaluate = app.add_subcommand("evaluate", "Peak metrics against a truth schedule");
    evaluate->add_option("signal", eval_signal, "predicted displacement CSV")->required();
    evaluate->add_option("truth", eval_truth, "truth schedule JSON with beats_s")->required();
    evaluate->add_option("--out", eval_out, "metrics JSON path");
    evaluate->add_option("--per-segment", eval_cycles, "per-cycle CSV path");

    // --- bench ---------------------------------------------------------------
    std::string bench_suite, bench_out = "bench.csv";
    std::uint64_t bench_seed = 0;
    auto* bench = app.add_subcommand("bench", "Compare CFT and baselines on a trial suite");
    bench->add_option("suite", bench_suite, "scene-suite JSON")->required();
    bench->add_option("--out", bench_out, "comparison table CSV");
    bench->add_option("--seed", bench_seed, "extra seed folded into each trial");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            nlohmann::json recipe = load_json_file(scene_path);
            const RadarConfig cfg = config_from_json(load_json_file(config_path));
            if (sim_seed_set) recipe["rng_seed"] = sim_seed;
            const Scene scene = build_scene(recipe, cfg);
            const DataCube cube = simulate_data_cube(scene, cfg);
            write_cube(cube_out, cube, cfg);
            std::cout << "wrote " << cube_out << " (" << cube.n_frames() << " frames)\n";
        } else if (focus->parsed()) {
            const CubeFile in = read_cube(focus_cube);
            SearchSpace extents;
            extents.half_extent_x = omega_extents[0];
            extents.half_extent_y = omega_extents[1];
            extents.half_extent_z = omega_extents[2];
            const FocusOutput out = run_focus(in, focus_params, extents);
            save_json_file(focus_results, focus_results_json(out, focus_params));
            if (!focus_trace.empty()) write_trace_csv(focus_trace, out.result.state);
            std::cout << "e_b = (" << out.result.best.x << ", " << out.result.best.y << ", "
                      << out.result.best.z << "), cost " << out.result.best_cost << ", "
                      << out.result.state.eval_count << " evaluations\n";
        } else if (track->parsed()) {
            const CubeFile in = read_cube(track_cube);
            const RaMap map = angle_fft(range_fft(in.cube.slice_frames(0, 1), in.cfg), in.cfg);
            const SpatialPoint e0 = rough_localize(map);
            SearchSpace omega;
            omega.center = e0;
            omega.half_extent_x = track_extents[0];
            omega.half_extent_y = track_extents[1];
            omega.half_extent_z = track_extents[2];
            const std::vector<SegmentResult> segs =
                cft_track(in.cube, in.cfg, e0, track_params, omega, segment_s);
            write_segments_csv(track_out, segs);
            long total = 0;
            for (const SegmentResult& s : segs) total += static_cast<long>(s.eval_count);
            std::cout << segs.size() << " segments, " << total << " evaluations total\n";
        } else if (recover->parsed()) {
            const DisplacementSeries raw = read_series_csv(rec_signal);
            const DisplacementSeries clean = bandpass_differentiate(raw);
            const DisplacementSeries env = envelope(clean);
            const std::vector<std::size_t> peaks = detect_dominant_peaks(env);
            const SparseTarget target = make_sparse_target(clean, peaks);

            SparseProblem prob;
            prob.h = env.samples;
            prob.phi = build_pulse_dictionary(env.samples.size(), env.rate_hz, pulse_width);
            prob.lambda_l1 = lambda_l1;
            SparseCode code = ssr_solve(prob, rec_iter, rec_tol);
            code.target = target.x;
            if (!rec_dict.empty()) write_matrix_csv(rec_dict, prob.phi);

            nlohmann::json j;
            j["x"] = code.x;
            j["sparsity"] = code.hoyer;
            j["iterations"] = code.iterations;
            j["target"] = code.target;
            j["target_flagged"] = target.flagged;
            j["peaks"] = peaks;
            j["loss"] = ssr_loss(code.x, target.x, lambda_s);
            j["lambda_s"] = lambda_s;
            j["lambda_l1"] = lambda_l1;
            save_json_file(rec_out, j);
            std::cout << "recovered " << peaks.size() << " beats, sparsity " << code.hoyer << "\n";
        } else if (evaluate->parsed()) {
            const DisplacementSeries pred = read_series_csv(eval_signal);
            const nlohmann::json truth = load_json_file(eval_truth);
            if (!truth.contains("beats_s"))
                throw std::runtime_error(eval_truth + ": missing field 'beats_s'");
            PeakSet truth_peaks{truth.at("beats_s").get<std::vector<double>>()};
            PeakSet pred_peaks{beat_times_from_displacement(pred)};

            std::vector<CycleOutcome> cycles;
            MetricReport report = evaluate_peaks(pred_peaks, truth_peaks, &cycles);
            if (truth.contains("pulse")) {
                // A reference displacement series makes Eq-style mse/pcc
                // meaningful; both sides pass through the same cleanup.
                TemplateParams pulse;
                pulse.a1 = truth["pulse"].value("a1", 1.2e-4);
                pulse.a2 = truth["pulse"].value("a2", 0.6e-4);
                pulse.b1 = truth["pulse"].value("b1_offset_s", 0.0);
                pulse.b2 = truth["pulse"].value("b2_offset_s", 0.25);
                pulse.c1 = truth["pulse"].value("c1_s", 0.03);
                pulse.c2 = truth["pulse"].value("c2_s", 0.05);
                const DisplacementSeries ref = synthesize_cardiac_displacement(
                    {truth_peaks.times_s, 0.0}, pulse, pred.duration_s(), pred.rate_hz);
                if (ref.samples.size() == pred.samples.size()) {
                    const DisplacementSeries ref_clean = bandpass_differentiate(ref);
                    const DisplacementSeries pred_clean = bandpass_differentiate(pred);
                    report.mse = mse(pred_clean.samples, ref_clean.samples);
                    report.pcc = pcc(pred_clean.samples, ref_clean.samples);
                }
            }
            save_json_file(eval_out, metric_report_to_json(report));
            if (!eval_cycles.empty()) write_cycles_csv(eval_cycles, cycles);
            std::cout << "mdr " << report.mdr << ", mean peak error " << report.mean_peak_error_ms
                      << " ms\n";
        } else if (bench->parsed()) {
            const nlohmann::json suite = load_json_file(bench_suite);
            if (!suite.contains("trials"))
                throw std::runtime_error(bench_suite + ": missing field 'trials'");
            std::vector<BenchRow> rows;
            for (const nlohmann::json& trial : suite.at("trials")) {
                const std::string name = trial.value("name", std::string("trial"));
                const std::uint64_t seed = trial.value("seed", 0ULL) ^ bench_seed;
                FixtureOptions opt;
                opt.duration_s = trial.value("duration_s", 8.0);
                const std::string kind = trial.value("kind", std::string("default"));
                if (kind == "far_offset") {
                    opt.offset_min_m = 0.20;
                    opt.offset_max_m = 0.249;
                } else if (kind == "static") {
                    opt.body_reflectivity = 0.0;
                    opt.adc_samples = 64;
                    opt.extra_clutter = 3;
                }
                opt.offset_min_m = trial.value("offset_min_m", opt.offset_min_m);
                opt.offset_max_m = trial.value("offset_max_m", opt.offset_max_m);

                const Fixture fx = make_focus_fixture(seed, opt);
                const Scene scene = build_scene(fx.scene_recipe, fx.cfg);
                const DataCube cube = simulate_data_cube(scene, fx.cfg);
                const PeakSet truth{scene.schedule.beat_times_s};
                const double segment = 4.0;
                const int n_segments =
                    cube.n_frames() / static_cast<int>(std::lround(segment * fx.cfg.frame_rate_hz()));
                const SpatialPoint e0 =
                    localize_first_frame(cube, fx.cfg);

                // CFT: tracked extraction at the per-segment best point.
                {
                    const double t0 = now_s();
                    SearchSpace omega;
                    omega.center = e0;
                    CftParams params;
                    params.rng_seed = seed;
                    const std::vector<SegmentResult> segs =
                        cft_track(cube, fx.cfg, e0, params, omega, segment);
                    std::vector<double> beats = beats_over_segments(
                        cube, fx.cfg, segment,
                        [&](const DataCube& seg, const RadarConfig& scfg, int s) {
                            const PointSignal sig = extract_point_signal(
                                seg, segs[static_cast<std::size_t>(s)].e_b, scfg);
                            return unwrap_phase(sig, scfg.wavelength_m);
                        });
                    const double wall = now_s() - t0;
                    const MetricReport rep = evaluate_peaks(PeakSet{beats}, truth);
                    rows.push_back({"cft", name, fx.body_point.norm(), 0.0,
                                    rep.mean_peak_error_ms, rep.mdr,
                                    evaluation_budget(ComparisonMethod::Cft, &segs), wall});
                }
                // Accumulation baseline at the rough location.
                {
                    const double t0 = now_s();
                    std::vector<double> beats = beats_over_segments(
                        cube, fx.cfg, segment,
                        [&](const DataCube& seg, const RadarConfig& scfg, int) {
                            return accumulate_extract(seg, e0, scfg);
                        });
                    const double wall = now_s() - t0;
                    const MetricReport rep = evaluate_peaks(PeakSet{beats}, truth);
                    rows.push_back({"accumulate", name, fx.body_point.norm(), 0.0,
                                    rep.mean_peak_error_ms, rep.mdr, 160L * n_segments, wall});
                }
                // Clustering baseline at the rough location.
                {
                    const double t0 = now_s();
                    std::vector<double> beats = beats_over_segments(
                        cube, fx.cfg, segment,
                        [&](const DataCube& seg, const RadarConfig& scfg, int) {
                            return cluster_extract(seg, e0, scfg).series;
                        });
                    const double wall = now_s() - t0;
                    const MetricReport rep = evaluate_peaks(PeakSet{beats}, truth);
                    rows.push_back({"cluster", name, fx.body_point.norm(), 0.0,
                                    rep.mean_peak_error_ms, rep.mdr, 216L * n_segments, wall});
                }
            }
            write_bench_csv(bench_out, rows);
            std::cout << "wrote " << bench_out << " (" << rows.size() << " rows)\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
