#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "surprise/error.hpp"

namespace surprise::stats {

struct SmoothedPoint {
    double x = 0.0;
    double y = 0.0;
};

/// Single-pass LOWESS (no robustness iterations, no interpolation shortcut).
///
/// Each point is fitted by a tricube-weighted local line over the
/// floor(frac * n) nearest points; the window slides right while its centre
/// lies left of the target. Where the local x spread vanishes, the weighted
/// mean is used instead. Output is sorted by x.
inline std::vector<SmoothedPoint> lowess(std::span<const double> x, std::span<const double> y, double frac) {
    require(x.size() == y.size(), "lowess needs equal-length inputs");
    require(x.size() >= 5, "lowess needs at least 5 points");
    require(frac > 0.0 && frac <= 1.0, "lowess frac must lie in (0, 1]");
    const std::size_t n = x.size();
    const auto k = static_cast<std::size_t>(frac * static_cast<double>(n) + 1e-10);
    require(k >= 2, "lowess window frac * n must be at least 2");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x[order[i]];
        ys[i] = y[order[i]];
    }

    std::vector<SmoothedPoint> out(n);
    std::vector<double> w(n, 0.0);
    std::size_t left = 0;
    std::size_t right = k;  // window is [left, right)
    for (std::size_t i = 0; i < n; ++i) {
        while (right < n && xs[i] > 0.5 * (xs[left] + xs[right])) {
            ++left;
            ++right;
        }
        const double radius = std::max(xs[i] - xs[left], xs[right - 1] - xs[i]);
        double total = 0.0;
        for (std::size_t j = left; j < right; ++j) {
            double wj = 1.0;
            if (radius > 0.0) {
                const double d = std::fabs(xs[j] - xs[i]) / radius;
                wj = d < 1.0 ? std::pow(1.0 - d * d * d, 3) : 0.0;
            }
            w[j] = wj;
            total += wj;
        }
        out[i].x = xs[i];
        if (total <= 0.0) {
            out[i].y = ys[i];
            continue;
        }
        double xbar = 0.0;
        for (std::size_t j = left; j < right; ++j) {
            w[j] /= total;
            xbar += w[j] * xs[j];
        }
        double sxx = 0.0;
        for (std::size_t j = left; j < right; ++j) sxx += w[j] * (xs[j] - xbar) * (xs[j] - xbar);
        const double range = xs[n - 1] - xs[0];
        double fitted = 0.0;
        if (std::sqrt(sxx) > 1e-12 * std::max(range, 1e-300)) {
            for (std::size_t j = left; j < right; ++j) {
                fitted += w[j] * (1.0 + (xs[i] - xbar) * (xs[j] - xbar) / sxx) * ys[j];
            }
        } else {
            for (std::size_t j = left; j < right; ++j) fitted += w[j] * ys[j];
        }
        out[i].y = fitted;
    }
    return out;
}

} // namespace surprise::stats
