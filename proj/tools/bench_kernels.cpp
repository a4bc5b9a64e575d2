// SPDX-License-Identifier: Apache-2.0
//
// cardiofocus: cardiac-point focusing, tracking and sparse heartbeat
// recovery for FMCW radar data cubes.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Times the OpenMP kernels against their serial references: cube rendering,
// point extraction, and the batched cost evaluations the optimizer issues.

#include <chrono>
#include <cstdio>
#include <vector>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "cardiofocus/dsp.hpp"
#include "cardiofocus/fixtures.hpp"
#include "cardiofocus/io.hpp"
#include "cardiofocus/scene_sim.hpp"
#include "cardiofocus/snr_cost.hpp"

using namespace cardiofocus;

namespace {

template <typename F>
double time_best_of(int repeat, F&& fn) {
    double best = 1e300;
    for (int i = 0; i < repeat; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP kernel benchmark"};
    int frames = 800;
    int repeat = 3;
    int batch = 16;
    app.add_option("--frames", frames, "cube length in frames");
    app.add_option("--repeat", repeat, "repetitions, best-of");
    app.add_option("--batch", batch, "candidate points per cost batch");
    CLI11_PARSE(app, argc, argv);

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("threads: %d, frames: %d\n\n", threads, frames);

    FixtureOptions opt;
    opt.duration_s = frames / 200.0;
    const Fixture fx = make_focus_fixture(1, opt);
    const Scene scene = build_scene(fx.scene_recipe, fx.cfg);

    const double sim_serial = time_best_of(repeat, [&] { simulate_data_cube_serial(scene, fx.cfg); });
    const double sim_par = time_best_of(repeat, [&] { simulate_data_cube(scene, fx.cfg); });
    std::printf("%-28s %8.3f ms  serial %8.3f ms  speedup %.2fx\n", "simulate_data_cube",
                sim_par * 1e3, sim_serial * 1e3, sim_serial / sim_par);

    const DataCube cube = simulate_data_cube(scene, fx.cfg);
    const SpatialPoint probe = fx.cardiac_point;
    const double ext_serial =
        time_best_of(repeat, [&] { extract_point_signal_serial(cube, probe, fx.cfg); });
    const double ext_par = time_best_of(repeat, [&] { extract_point_signal(cube, probe, fx.cfg); });
    std::printf("%-28s %8.3f ms  serial %8.3f ms  speedup %.2fx\n", "extract_point_signal",
                ext_par * 1e3, ext_serial * 1e3, ext_serial / ext_par);

    // Candidate batches the way the optimizer issues them: outer parallelism
    // over points, serial extraction inside.
    std::vector<SpatialPoint> candidates;
    for (int i = 0; i < batch; ++i)
        candidates.push_back(fx.cardiac_point +
                             SpatialPoint{0.01 * (i % 5), 0.005 * (i % 3), 0.01 * (i % 7)});
    std::vector<double> costs(candidates.size());

#ifdef _OPENMP
    omp_set_num_threads(1);
#endif
    const double batch_serial = time_best_of(repeat, [&] {
        for (std::size_t i = 0; i < candidates.size(); ++i)
            costs[i] = point_cost(cube, candidates[i], fx.cfg).cost;
    });
#ifdef _OPENMP
    omp_set_num_threads(threads);
#endif
    const double batch_par = time_best_of(repeat, [&] {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(candidates.size()); ++i)
            costs[static_cast<std::size_t>(i)] =
                point_cost(cube, candidates[static_cast<std::size_t>(i)], fx.cfg).cost;
    });
    std::printf("%-28s %8.3f ms  serial %8.3f ms  speedup %.2fx  (%d points)\n",
                "point_cost batch", batch_par * 1e3, batch_serial * 1e3, batch_serial / batch_par,
                batch);
    return 0;
}
