// SPDX-License-Identifier: Apache-2.0
//
// cardiofocus: cardiac-point focusing, tracking and sparse heartbeat
// recovery for FMCW radar data cubes.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "cardiofocus/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace cardiofocus {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_inplace: length must be a nonzero power of two");

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv_n;
    }
}

namespace {

// Bluestein's chirp-z trick: an n-point DFT as a circular convolution of
// chirp-premultiplied sequences, computed with power-of-two FFTs.
void bluestein(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    const double sign = inverse ? 1.0 : -1.0;

    std::vector<std::complex<double>> chirp(n);
    for (std::size_t j = 0; j < n; ++j) {
        // j^2 mod 2n keeps the angle argument small for large n.
        const std::size_t j2 = (j * j) % (2 * n);
        const double ang = sign * M_PI * static_cast<double>(j2) / static_cast<double>(n);
        chirp[j] = {std::cos(ang), std::sin(ang)};
    }

    const std::size_t m = next_pow2(2 * n - 1);
    std::vector<std::complex<double>> fa(m, {0.0, 0.0}), fb(m, {0.0, 0.0});
    for (std::size_t j = 0; j < n; ++j) fa[j] = a[j] * chirp[j];
    for (std::size_t j = 0; j < n; ++j) {
        fb[j] = std::conj(chirp[j]);
        if (j > 0) fb[m - j] = std::conj(chirp[j]);
    }

    fft_inplace(fa, false);
    fft_inplace(fb, false);
    for (std::size_t j = 0; j < m; ++j) fa[j] *= fb[j];
    fft_inplace(fa, true);

    for (std::size_t k = 0; k < n; ++k) a[k] = fa[k] * chirp[k];
    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& v : a) v *= inv_n;
    }
}

}  // namespace

void dft(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0) throw std::invalid_argument("dft: empty input");
    if ((n & (n - 1)) == 0)
        fft_inplace(a, inverse);
    else
        bluestein(a, inverse);
}

std::vector<double> analytic_magnitude(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("analytic_magnitude: series too short");

    std::vector<std::complex<double>> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = x[i];
    dft(buf, false);

    // Analytic-signal weights: keep DC (and Nyquist for even n), double the
    // positive frequencies, zero the negative ones.
    const std::size_t half = n / 2;
    for (std::size_t k = 1; k < half; ++k) buf[k] *= 2.0;
    if (n % 2 == 1) buf[half] *= 2.0;
    for (std::size_t k = half + 1; k < n; ++k) buf[k] = 0.0;
    dft(buf, true);

    std::vector<double> mag(n);
    for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(buf[i]);
    return mag;
}

}  // namespace cardiofocus
