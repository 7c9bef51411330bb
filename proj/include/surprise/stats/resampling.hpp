#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "surprise/error.hpp"
#include "surprise/rng.hpp"
#include "surprise/stats/descriptive.hpp"

namespace surprise::stats {

enum class Statistic { mean, median, sd, variance };

inline Statistic parse_statistic(std::string_view name) {
    if (name == "mean") return Statistic::mean;
    if (name == "median") return Statistic::median;
    if (name == "sd") return Statistic::sd;
    if (name == "variance") return Statistic::variance;
    throw InvalidInput("unknown statistic: " + std::string(name));
}

inline double evaluate(Statistic s, std::span<const double> x) {
    switch (s) {
    case Statistic::mean:
        return mean(x);
    case Statistic::median:
        return median(x);
    case Statistic::sd:
        return x.size() < 2 ? 0.0 : sd(x);
    case Statistic::variance:
        return x.size() < 2 ? 0.0 : variance(x);
    }
    return 0.0;
}

/// Percentile 95% bootstrap interval. Resample b draws from its own substream
/// derive_seed(seed, b), so the result does not depend on evaluation order.
inline Interval bootstrap_ci(std::span<const double> sample, Statistic statistic, std::size_t resamples,
                             std::uint64_t seed) {
    require(!sample.empty(), "bootstrap of an empty sample");
    require(resamples >= 100, "bootstrap needs at least 100 resamples");
    std::vector<double> stats(resamples);
    std::vector<double> draw(sample.size());
    for (std::size_t b = 0; b < resamples; ++b) {
        Rng rng(derive_seed(seed, b));
        for (auto& v : draw) v = sample[rng.below(sample.size())];
        stats[b] = evaluate(statistic, draw);
    }
    std::sort(stats.begin(), stats.end());
    return Interval{quantile_sorted(stats, 0.025), quantile_sorted(stats, 0.975)};
}

} // namespace surprise::stats
