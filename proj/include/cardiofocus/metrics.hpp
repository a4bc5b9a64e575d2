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

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cardiofocus/types.hpp"

namespace cardiofocus {

struct PeakSet {
    std::vector<double> times_s;  // strictly increasing

    void validate() const {
        for (std::size_t i = 1; i < times_s.size(); ++i)
            if (times_s[i] <= times_s[i - 1])
                throw std::invalid_argument("PeakSet: times must be strictly increasing");
    }
};

// Pairing of predicted peaks to ground-truth peaks. Each truth peak owns a
// half-RR window around itself; windows tile the time axis, so a predicted
// peak can serve at most one truth peak.
struct MatchResult {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (pred index, truth index)
    std::vector<std::size_t> unmatched_truth;
};

MatchResult match_peaks(const PeakSet& pred, const PeakSet& truth);

struct PeakErrorStats {
    double mean_ms = 0.0;
    double median_ms = 0.0;
    std::size_t pairs = 0;
    bool defined = false;  // false when nothing matched
};

PeakErrorStats peak_error_ms(const MatchResult& match, const PeakSet& pred, const PeakSet& truth);

// Fraction of truth cycles with no matched peak or an absolute peak error
// strictly larger than 150 ms.
double mdr(const PeakSet& pred, const PeakSet& truth);

double mse(std::span<const double> x, std::span<const double> x_prime);
double pcc(std::span<const double> x, std::span<const double> x_prime);

struct MetricReport {
    double mean_peak_error_ms = 0.0;
    double median_peak_error_ms = 0.0;
    double mdr = 1.0;
    std::optional<double> mse;  // only when reference series are available
    std::optional<double> pcc;
    bool peak_error_defined = false;
};

// One row per truth cycle, for CDF-style exports.
struct CycleOutcome {
    double truth_time_s;
    double peak_error_ms;  // negative when unmatched
    bool missed;
};

MetricReport evaluate_peaks(const PeakSet& pred, const PeakSet& truth,
                            std::vector<CycleOutcome>* per_cycle = nullptr);

}  // namespace cardiofocus
