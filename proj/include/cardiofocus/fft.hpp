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
#include <cstddef>
#include <vector>

namespace cardiofocus {

std::size_t next_pow2(std::size_t n);

// In-place radix-2 transform, unnormalized forward; the inverse applies
// the 1/N factor. Length must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse = false);

// Arbitrary-length DFT; power-of-two sizes use the radix-2 path directly,
// everything else goes through Bluestein's chirp-z reformulation.
void dft(std::vector<std::complex<double>>& a, bool inverse = false);

// Magnitude of the analytic signal (exact-length FFT Hilbert transform).
std::vector<double> analytic_magnitude(const std::vector<double>& x);

}  // namespace cardiofocus
