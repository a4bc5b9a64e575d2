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

#include <random>

#include "cardiofocus/fft.hpp"
#include "support/oracles.hpp"

using namespace cardiofocus;

TEST_CASE("fft matches the naive DFT") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::size_t n : {8UL, 64UL, 256UL}) {
        std::vector<std::complex<double>> x(n);
        for (auto& v : x) v = {g(rng), g(rng)};

        auto fast = x;
        fft_inplace(fast, false);
        const auto slow = oracles::naive_dft(x, false);
        for (std::size_t k = 0; k < n; ++k)
            CHECK(std::abs(fast[k] - slow[k]) < 1e-9 * static_cast<double>(n));

        auto inv = fast;
        fft_inplace(inv, true);
        for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(inv[k] - x[k]) < 1e-10);
    }
}

TEST_CASE("fft satisfies Parseval's identity") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::complex<double>> x(128);
    for (auto& v : x) v = {g(rng), g(rng)};

    double time_energy = 0.0;
    for (const auto& v : x) time_energy += std::norm(v);

    auto freq_domain = x;
    fft_inplace(freq_domain, false);
    double freq_energy = 0.0;
    for (const auto& v : freq_domain) freq_energy += std::norm(v);
    freq_energy /= static_cast<double>(x.size());

    CHECK(freq_energy == doctest::Approx(time_energy).epsilon(1e-12));
}

TEST_CASE("fft rejects non power-of-two lengths") {
    std::vector<std::complex<double>> x(12, {1.0, 0.0});
    CHECK_THROWS_AS(fft_inplace(x, false), std::invalid_argument);
}

TEST_CASE("dft handles arbitrary lengths via Bluestein") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::size_t n : {12UL, 100UL, 800UL}) {
        std::vector<std::complex<double>> x(n);
        for (auto& v : x) v = {g(rng), g(rng)};

        auto fast = x;
        dft(fast, false);
        const auto slow = oracles::naive_dft(x, false);
        for (std::size_t k = 0; k < n; ++k)
            CHECK(std::abs(fast[k] - slow[k]) < 1e-8 * static_cast<double>(n));

        auto inv = fast;
        dft(inv, true);
        for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(inv[k] - x[k]) < 1e-9);
    }
}

TEST_CASE("analytic magnitude of a sinusoid is its amplitude") {
    const double rate = 200.0;
    std::vector<double> x(800);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = 1.7 * std::sin(2.0 * M_PI * 8.0 * static_cast<double>(i) / rate);

    const std::vector<double> mag = analytic_magnitude(x);
    for (std::size_t i = 40; i + 40 < mag.size(); ++i)
        CHECK(mag[i] == doctest::Approx(1.7).epsilon(0.03));
}
