#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "surprise/error.hpp"

namespace surprise::stats {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return lo <= v && v <= hi; }
    double width() const { return hi - lo; }
};

inline double mean(std::span<const double> x) {
    require(!x.empty(), "mean of an empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Sample variance (n - 1 denominator), two-pass.
inline double variance(std::span<const double> x) {
    require(x.size() >= 2, "variance needs at least two values");
    const double m = mean(x);
    double ss = 0.0;
    for (const double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

inline double sd(std::span<const double> x) { return std::sqrt(variance(x)); }

/// Quantile with linear interpolation between order statistics (Hyndman-Fan type 7).
inline double quantile_sorted(std::span<const double> sorted, double q) {
    require(!sorted.empty(), "quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::span<const double> x, double q) {
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    return quantile_sorted(sorted, q);
}

inline double median(std::span<const double> x) { return quantile(x, 0.5); }

/// 1-based ranks with ties given their average rank.
inline std::vector<double> average_ranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

} // namespace surprise::stats
