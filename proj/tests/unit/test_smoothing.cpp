#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "surprise/rng.hpp"
#include "surprise/stats/resampling.hpp"
#include "surprise/stats/smoothing.hpp"

namespace {

using namespace surprise::stats;

#include "unit/lowess_reference.inc"

TEST(Lowess, MatchesReferenceImplementation) {
    const auto fit = lowess(lowess_x, lowess_y, 0.3);
    ASSERT_EQ(fit.size(), lowess_expected.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < fit.size(); ++i) {
        EXPECT_EQ(fit[i].x, lowess_x[i]);
        worst = std::max(worst, std::fabs(fit[i].y - lowess_expected[i]));
    }
    EXPECT_LT(worst, 1e-6);
}

TEST(Lowess, ReproducesLinesAndConstants) {
    std::vector<double> x{3.0, 0.5, 2.0, 9.0, 4.5, 7.0, 1.0, 6.0};
    std::vector<double> line, flat(x.size(), 4.25);
    for (const double v : x) line.push_back(-0.5 + 1.75 * v);
    for (const double frac : {0.3, 0.6, 1.0}) {
        const auto l = lowess(x, line, frac);
        for (std::size_t i = 1; i < l.size(); ++i) EXPECT_LE(l[i - 1].x, l[i].x);
        for (const auto& p : l) EXPECT_NEAR(p.y, -0.5 + 1.75 * p.x, 1e-8);
        for (const auto& p : lowess(x, flat, frac)) EXPECT_NEAR(p.y, 4.25, 1e-12);
    }
    EXPECT_THROW(lowess(x, line, 0.2), surprise::InvalidInput);
    EXPECT_THROW(lowess(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}, 1.0), surprise::InvalidInput);
}

TEST(Bootstrap, ConstantSampleAndDeterminism) {
    const std::vector<double> c(30, 2.5);
    const auto ci = bootstrap_ci(c, Statistic::mean, 200, 1);
    EXPECT_EQ(ci.lo, 2.5);
    EXPECT_EQ(ci.hi, 2.5);

    const std::vector<double> s{1, 4, 2, 8, 5, 7, 3, 3, 9, 0};
    const auto a = bootstrap_ci(s, Statistic::median, 500, 42);
    const auto b = bootstrap_ci(s, Statistic::median, 500, 42);
    EXPECT_EQ(a.lo, b.lo);
    EXPECT_EQ(a.hi, b.hi);
    EXPECT_THROW(bootstrap_ci(s, Statistic::mean, 99, 42), surprise::InvalidInput);
    EXPECT_THROW(bootstrap_ci(std::vector<double>{}, Statistic::mean, 100, 42), surprise::InvalidInput);
    EXPECT_THROW(parse_statistic("mode"), surprise::InvalidInput);
}

TEST(Bootstrap, MeanIntervalMatchesNormalTheory) {
    surprise::Rng rng(31);
    std::vector<double> x(10000);
    for (auto& v : x) v = rng.normal();
    const auto ci = bootstrap_ci(x, Statistic::mean, 1000, 7);
    const double analytic = 2.0 * 1.96 / std::sqrt(10000.0);
    EXPECT_NEAR(ci.hi - ci.lo, analytic, 0.2 * analytic);
    EXPECT_LT(ci.lo, mean(x));
    EXPECT_GT(ci.hi, mean(x));
}

} // namespace
