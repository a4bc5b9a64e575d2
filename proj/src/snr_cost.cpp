// SPDX-License-Identifier: Apache-2.0
//
// cardiofocus: cardiac-point focusing, tracking and sparse heartbeat
// recovery for FMCW radar data cubes.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "cardiofocus/snr_cost.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cardiofocus/dsp.hpp"
#include "cardiofocus/fft.hpp"

namespace cardiofocus {

DisplacementSeries envelope(const DisplacementSeries& sig) {
    if (sig.samples.size() < 16) throw std::invalid_argument("envelope: series too short");

    bool all_zero = true;
    for (double s : sig.samples)
        if (s != 0.0) { all_zero = false; break; }
    if (all_zero) throw std::runtime_error("envelope: flat signal");

    std::vector<double> mag = analytic_magnitude(sig.samples);

    // 25 ms centered moving average.
    const std::size_t n = mag.size();
    const std::size_t half = std::max<std::size_t>(1, static_cast<std::size_t>(
                                 std::lround(0.025 * sig.rate_hz))) / 2;
    DisplacementSeries out;
    out.rate_hz = sig.rate_hz;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n - 1, i + half);
        double acc = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) acc += mag[j];
        out.samples[i] = acc / static_cast<double>(hi - lo + 1);
    }

    const double peak = *std::max_element(out.samples.begin(), out.samples.end());
    if (peak <= 0.0) throw std::runtime_error("envelope: flat signal");
    for (double& s : out.samples) s /= peak;
    return out;
}

namespace {

double peak_prominence(const std::vector<double>& x, std::size_t i) {
    double left_min = x[i], right_min = x[i];
    for (std::size_t j = i; j-- > 0;) {
        if (x[j] > x[i]) break;
        left_min = std::min(left_min, x[j]);
    }
    for (std::size_t j = i + 1; j < x.size(); ++j) {
        if (x[j] > x[i]) break;
        right_min = std::min(right_min, x[j]);
    }
    return x[i] - std::max(left_min, right_min);
}

}  // namespace

std::vector<std::size_t> detect_dominant_peaks(const DisplacementSeries& env) {
    const std::vector<double>& x = env.samples;
    const std::size_t min_gap =
        static_cast<std::size_t>(std::lround(0.33 * env.rate_hz));

    std::vector<std::size_t> candidates;
    for (std::size_t i = 1; i + 1 < x.size(); ++i)
        if (x[i] > x[i - 1] && x[i] >= x[i + 1] && peak_prominence(x, i) >= 0.3)
            candidates.push_back(i);

    // Keep the tallest peaks first, enforcing the 0.33 s exclusion zone.
    std::vector<std::size_t> order(candidates);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
    std::vector<std::size_t> kept;
    for (std::size_t i : order) {
        bool ok = true;
        for (std::size_t j : kept)
            if ((i > j ? i - j : j - i) < min_gap) { ok = false; break; }
        if (ok) kept.push_back(i);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

namespace {

// Gaussian elimination with partial pivoting for the tiny normal equations.
bool solve_linear(std::array<std::array<double, 4>, 4>& a, std::array<double, 4>& b, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-14) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        for (int c = r + 1; c < n; ++c) b[r] -= a[r][c] * b[c];
        b[r] /= a[r][r];
    }
    return true;
}

struct BeatFit {
    TemplateParams params;
    double mse = std::numeric_limits<double>::infinity();
};

double window_sse(const std::vector<double>& t, const std::vector<double>& y,
                  const TemplateParams& p) {
    double sse = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = y[i] - p.eval(t[i]);
        sse += r * r;
    }
    return sse;
}

TemplateParams apply_theta(const TemplateParams& base, const std::array<double, 4>& theta) {
    TemplateParams p = base;
    p.a2 = std::clamp(theta[0], 0.0, base.a1);
    p.b2 = std::clamp(theta[1], base.b1 + 0.05, base.b1 + 0.5);
    p.c1 = std::clamp(theta[2], 0.005, 0.5);
    p.c2 = std::clamp(theta[3], 0.005, 0.5);
    return p;
}

// Least-squares refinement of (a2, b2, c1, c2) with a1, b1 pinned to the
// detected peak. Numerical Jacobian, damped steps.
BeatFit gauss_newton_fit(const std::vector<double>& t, const std::vector<double>& y,
                         double a1, double b1) {
    TemplateParams base;
    base.a1 = a1;
    base.b1 = b1;
    std::array<double, 4> theta = {0.5 * a1, b1 + 0.25, 0.05, 0.05};

    TemplateParams cur = apply_theta(base, theta);
    double sse = window_sse(t, y, cur);
    const std::size_t n = t.size();

    for (int iter = 0; iter < 50; ++iter) {
        std::vector<std::array<double, 4>> jac(n);
        std::vector<double> res(n);
        for (std::size_t i = 0; i < n; ++i) res[i] = y[i] - cur.eval(t[i]);
        for (int p = 0; p < 4; ++p) {
            std::array<double, 4> bumped = theta;
            const double eps = std::max(1e-7, 1e-6 * std::abs(theta[static_cast<std::size_t>(p)]));
            bumped[static_cast<std::size_t>(p)] += eps;
            const TemplateParams pb = apply_theta(base, bumped);
            for (std::size_t i = 0; i < n; ++i)
                jac[i][static_cast<std::size_t>(p)] = (pb.eval(t[i]) - cur.eval(t[i])) / eps;
        }

        std::array<std::array<double, 4>, 4> jtj{};
        std::array<double, 4> jtr{};
        for (std::size_t i = 0; i < n; ++i)
            for (int r = 0; r < 4; ++r) {
                jtr[static_cast<std::size_t>(r)] += jac[i][static_cast<std::size_t>(r)] * res[i];
                for (int c = 0; c < 4; ++c)
                    jtj[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] +=
                        jac[i][static_cast<std::size_t>(r)] * jac[i][static_cast<std::size_t>(c)];
            }
        std::array<double, 4> step = jtr;
        if (!solve_linear(jtj, step, 4)) break;

        // Halve the step until it stops hurting.
        double scale = 1.0;
        bool accepted = false;
        for (int bh = 0; bh < 8; ++bh) {
            std::array<double, 4> trial = theta;
            for (int p = 0; p < 4; ++p)
                trial[static_cast<std::size_t>(p)] += scale * step[static_cast<std::size_t>(p)];
            const TemplateParams tp = apply_theta(base, trial);
            const double tsse = window_sse(t, y, tp);
            if (tsse <= sse) {
                const double gain = sse - tsse;
                theta = trial;
                cur = tp;
                sse = tsse;
                accepted = true;
                if (gain < 1e-10) return {cur, sse / static_cast<double>(n)};
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) break;
    }
    return {cur, sse / static_cast<double>(n)};
}

BeatFit grid_fit(const std::vector<double>& t, const std::vector<double>& y, double a1, double b1) {
    BeatFit best;
    for (double c1 = 0.02; c1 <= 0.10 + 1e-12; c1 += 0.01) {
        for (double c2 = 0.02; c2 <= 0.10 + 1e-12; c2 += 0.01) {
            for (double db = 0.15; db <= 0.40 + 1e-12; db += 0.05) {
                TemplateParams p;
                p.a1 = a1;
                p.b1 = b1;
                p.b2 = b1 + db;
                p.c1 = c1;
                p.c2 = c2;
                // Optimal a2 for this shape, clamped to the dominance order.
                double num = 0.0, den = 0.0;
                for (std::size_t i = 0; i < t.size(); ++i) {
                    const double d1 = (t[i] - p.b1) / c1;
                    const double d2 = (t[i] - p.b2) / c2;
                    const double g1 = std::exp(-0.5 * d1 * d1);
                    const double g2 = std::exp(-0.5 * d2 * d2);
                    num += (y[i] - a1 * g1) * g2;
                    den += g2 * g2;
                }
                p.a2 = den > 0.0 ? std::clamp(num / den, 0.0, a1) : 0.0;
                const double mse = window_sse(t, y, p) / static_cast<double>(t.size());
                if (mse < best.mse) best = {p, mse};
            }
        }
    }
    return best;
}

}  // namespace

CostReport fit_template(const DisplacementSeries& env, const std::vector<std::size_t>& peaks) {
    CostReport report;
    report.peaks = peaks;
    if (peaks.empty()) return report;  // cost stays +inf

    const double rate = env.rate_hz;
    const std::ptrdiff_t pre = static_cast<std::ptrdiff_t>(std::lround(0.15 * rate));
    const std::ptrdiff_t post = static_cast<std::ptrdiff_t>(std::lround(0.55 * rate));

    double total = 0.0;
    int used = 0;
    BeatFit best_beat;
    for (std::size_t peak : peaks) {
        const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(peak) - pre;
        const std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(peak) + post;
        if (lo < 0 || hi >= static_cast<std::ptrdiff_t>(env.samples.size())) continue;

        std::vector<double> t, y;
        t.reserve(static_cast<std::size_t>(hi - lo + 1));
        y.reserve(static_cast<std::size_t>(hi - lo + 1));
        for (std::ptrdiff_t i = lo; i <= hi; ++i) {
            t.push_back(static_cast<double>(i) / rate);
            y.push_back(env.samples[static_cast<std::size_t>(i)]);
        }
        const double a1 = env.samples[peak];
        const double b1 = static_cast<double>(peak) / rate;

        BeatFit fit = gauss_newton_fit(t, y, a1, b1);
        if (!std::isfinite(fit.mse)) fit = grid_fit(t, y, a1, b1);

        total += fit.mse;
        ++used;
        if (fit.mse < best_beat.mse) best_beat = fit;
    }
    if (used == 0) return report;  // all windows clipped the segment edge

    report.cost = total / used;
    report.fitted = best_beat.params;
    report.windows_used = used;
    return report;
}

CostReport series_cost(const DisplacementSeries& displacement) {
    try {
        const DisplacementSeries clean = bandpass_differentiate(displacement);
        const DisplacementSeries env = envelope(clean);
        CostReport report = fit_template(env, detect_dominant_peaks(env));
        // A cardiac segment of several seconds must show at least two beats
        // (RR <= 2 s); a lone well-shaped bump is a noise excursion, not a
        // heartbeat, and marks the point as hopeless.
        if (report.windows_used < 2) {
            report.cost = std::numeric_limits<double>::infinity();
        }
        return report;
    } catch (const std::exception&) {
        return CostReport{};
    }
}

std::vector<double> beat_times_from_displacement(const DisplacementSeries& displacement,
                                                 double t_offset) {
    try {
        const DisplacementSeries clean = bandpass_differentiate(displacement);
        const DisplacementSeries env = envelope(clean);
        std::vector<double> times;
        for (std::size_t idx : detect_dominant_peaks(env))
            times.push_back(t_offset + static_cast<double>(idx) / env.rate_hz);
        return times;
    } catch (const std::exception&) {
        return {};
    }
}

CostReport point_cost(const DataCube& cube, const SpatialPoint& point, const RadarConfig& cfg,
                      const std::optional<SearchSpace>& omega) {
    if (omega && !omega->contains(point)) return CostReport{};
    if (point.norm() > cfg.max_range_m()) return CostReport{};
    try {
        const PointSignal sig = extract_point_signal(cube, point, cfg);
        const DisplacementSeries disp = unwrap_phase(sig, cfg.wavelength_m);
        return series_cost(disp);
    } catch (const std::exception&) {
        return CostReport{};
    }
}

}  // namespace cardiofocus
