#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surprise/error.hpp"
#include "surprise/stats/descriptive.hpp"
#include "surprise/stats/special.hpp"

namespace surprise::stats {

struct TestResult {
    std::string method;
    double statistic = 0.0;
    /// Degrees of freedom; empty for tests without them, two entries for F tests.
    std::vector<double> df;
    double p_value = 1.0;
    /// Cohen's d for Welch, rank-biserial correlation for Mann-Whitney,
    /// g1 for the skewness test.
    std::optional<double> effect_size;
    std::optional<Interval> ci;
};

enum class TwoSampleKind { welch_t, mann_whitney_u, levene, fligner_killeen };

namespace detail {

inline double clamp_p(double p) { return std::clamp(p, 0.0, 1.0); }

inline TestResult welch_from_moments(double m1, double v1, double n1, double m2, double v2, double n2) {
    const double se2 = v1 / n1 + v2 / n2;
    if (se2 <= 0.0) throw Degenerate("degenerate: both groups have zero variance");
    const double se = std::sqrt(se2);
    TestResult r;
    r.method = "welch_t";
    r.statistic = (m1 - m2) / se;
    const double df = se2 * se2 / ((v1 / n1) * (v1 / n1) / (n1 - 1.0) + (v2 / n2) * (v2 / n2) / (n2 - 1.0));
    r.df = {df};
    r.p_value = clamp_p(student_t_two_sided(r.statistic, df));
    const double pooled = std::sqrt(((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / (n1 + n2 - 2.0));
    r.effect_size = pooled > 0.0 ? (m1 - m2) / pooled : 0.0;
    const double half = student_t_quantile(0.975, df) * se;
    r.ci = Interval{m1 - m2 - half, m1 - m2 + half};
    return r;
}

} // namespace detail

/// Welch's unequal-variance t test with pooled-SD Cohen's d and a 95% CI for
/// the mean difference a - b.
inline TestResult welch_t(std::span<const double> a, std::span<const double> b) {
    require(a.size() >= 2 && b.size() >= 2, "welch_t needs at least two values per group");
    return detail::welch_from_moments(mean(a), variance(a), static_cast<double>(a.size()), mean(b), variance(b),
                                      static_cast<double>(b.size()));
}

/// Welch's t test from group means, standard deviations and sizes.
inline TestResult welch_t_summary(double m1, double s1, double n1, double m2, double s2, double n2) {
    require(s1 > 0.0 && s2 > 0.0, "welch_t_summary needs positive standard deviations");
    require(n1 >= 2.0 && n2 >= 2.0, "welch_t_summary needs n >= 2 per group");
    return detail::welch_from_moments(m1, s1 * s1, n1, m2, s2 * s2, n2);
}

/// Exact-enumeration limit for Mann-Whitney: n1 * n2 at or below this uses the
/// exact permutation distribution.
inline constexpr std::size_t mann_whitney_exact_limit = 64;

/// Mann-Whitney U for sample a (number of pairs with a > b, ties counting one
/// half). Two-sided p: exact when n1*n2 <= 64, otherwise normal approximation
/// with tie correction and continuity correction.
inline TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    require(!a.empty() && !b.empty(), "mann_whitney_u needs nonempty samples");
    const std::size_t n1 = a.size();
    const std::size_t n2 = b.size();
    const std::size_t n = n1 + n2;
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = average_ranks(pooled);
    // Twice the midranks are integers, which keeps the exact distribution in integer arithmetic.
    std::vector<std::int64_t> rank2(n);
    for (std::size_t i = 0; i < n; ++i) rank2[i] = std::llround(2.0 * ranks[i]);
    std::int64_t rank_sum2 = 0;
    for (std::size_t i = 0; i < n1; ++i) rank_sum2 += rank2[i];
    const auto nn1 = static_cast<std::int64_t>(n1);
    const auto nn2 = static_cast<std::int64_t>(n2);
    const std::int64_t u2 = rank_sum2 - nn1 * (nn1 + 1);  // 2U
    const double u = 0.5 * static_cast<double>(u2);
    const double pairs = static_cast<double>(n1) * static_cast<double>(n2);

    TestResult r;
    r.method = "mann_whitney_u";
    r.statistic = u;
    r.effect_size = 2.0 * u / pairs - 1.0;

    if (n1 * n2 <= mann_whitney_exact_limit) {
        // ways[j][s]: number of j-subsets of the pooled ranks whose doubled sum is s.
        std::int64_t max_sum = 0;
        for (const auto v : rank2) max_sum += v;
        std::vector<std::vector<std::uint64_t>> ways(n1 + 1, std::vector<std::uint64_t>(max_sum + 1, 0));
        ways[0][0] = 1;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = std::min(i + 1, n1); j >= 1; --j) {
                for (std::int64_t s = max_sum; s >= rank2[i]; --s) ways[j][s] += ways[j - 1][s - rank2[i]];
            }
        }
        const std::int64_t observed = std::llabs(u2 - nn1 * nn2);
        std::uint64_t extreme = 0;
        std::uint64_t total = 0;
        for (std::int64_t s = 0; s <= max_sum; ++s) {
            const std::uint64_t w = ways[n1][s];
            if (w == 0) continue;
            total += w;
            const std::int64_t dist = std::llabs(s - nn1 * (nn1 + 1) - nn1 * nn2);
            if (dist >= observed) extreme += w;
        }
        r.p_value = static_cast<double>(extreme) / static_cast<double>(total);
        return r;
    }

    double tie_term = 0.0;
    {
        std::vector<double> sorted = pooled;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    const double nd = static_cast<double>(n);
    const double var = pairs / 12.0 * ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
    const double centered = u - pairs / 2.0;
    if (var <= 0.0) {
        r.p_value = 1.0;
        return r;
    }
    const double z = (std::fabs(centered) - 0.5) / std::sqrt(var);
    r.p_value = detail::clamp_p(z <= 0.0 ? 1.0 : normal_two_sided(z));
    return r;
}

enum class Center { mean, median };

/// Levene's test for equal variances across groups: one-way ANOVA on absolute
/// deviations from the group centre (median by default, the Brown-Forsythe form).
inline TestResult levene(const std::vector<std::vector<double>>& groups, Center center = Center::median) {
    require(groups.size() >= 2, "levene needs at least two groups");
    std::vector<std::vector<double>> dev(groups.size());
    std::size_t total = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        require(groups[g].size() >= 2, "levene needs at least two values per group");
        const double c = center == Center::mean ? mean(groups[g]) : median(groups[g]);
        for (const double v : groups[g]) dev[g].push_back(std::fabs(v - c));
        total += groups[g].size();
    }
    const double k = static_cast<double>(groups.size());
    const double nn = static_cast<double>(total);
    double grand = 0.0;
    for (const auto& d : dev)
        for (const double v : d) grand += v;
    grand /= nn;
    double between = 0.0;
    double within = 0.0;
    for (const auto& d : dev) {
        const double m = mean(d);
        between += static_cast<double>(d.size()) * (m - grand) * (m - grand);
        for (const double v : d) within += (v - m) * (v - m);
    }
    TestResult r;
    r.method = center == Center::mean ? "levene_mean" : "levene_median";
    r.df = {k - 1.0, nn - k};
    if (within <= 0.0) {
        r.statistic = between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        r.p_value = between > 0.0 ? 0.0 : 1.0;
        return r;
    }
    r.statistic = (nn - k) / (k - 1.0) * between / within;
    r.p_value = detail::clamp_p(f_sf(r.statistic, k - 1.0, nn - k));
    return r;
}

/// Fligner-Killeen median-centred test of homogeneity of variances.
inline TestResult fligner_killeen(const std::vector<std::vector<double>>& groups) {
    require(groups.size() >= 2, "fligner_killeen needs at least two groups");
    std::vector<double> dev;
    std::vector<std::size_t> owner;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        require(groups[g].size() >= 2, "fligner_killeen needs at least two values per group");
        const double c = median(groups[g]);
        for (const double v : groups[g]) {
            dev.push_back(std::fabs(v - c));
            owner.push_back(g);
        }
    }
    const auto ranks = average_ranks(dev);
    const double nn = static_cast<double>(dev.size());
    std::vector<double> scores(dev.size());
    for (std::size_t i = 0; i < dev.size(); ++i) scores[i] = normal_quantile(0.5 + ranks[i] / (2.0 * (nn + 1.0)));
    const double grand = mean(scores);
    const double var = variance(scores);
    std::vector<double> sums(groups.size(), 0.0);
    for (std::size_t i = 0; i < scores.size(); ++i) sums[owner[i]] += scores[i];
    double stat = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double ng = static_cast<double>(groups[g].size());
        const double m = sums[g] / ng;
        stat += ng * (m - grand) * (m - grand);
    }
    TestResult r;
    r.method = "fligner_killeen";
    r.df = {static_cast<double>(groups.size()) - 1.0};
    if (var <= 0.0) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    r.statistic = stat / var;
    r.p_value = detail::clamp_p(chi2_sf(r.statistic, r.df[0]));
    return r;
}

inline TestResult two_sample_test(TwoSampleKind kind, std::span<const double> a, std::span<const double> b) {
    require(!a.empty() && !b.empty(), "two_sample_test needs nonempty samples");
    switch (kind) {
    case TwoSampleKind::welch_t:
        return welch_t(a, b);
    case TwoSampleKind::mann_whitney_u:
        return mann_whitney_u(a, b);
    case TwoSampleKind::levene:
        return levene({{a.begin(), a.end()}, {b.begin(), b.end()}});
    case TwoSampleKind::fligner_killeen:
        return fligner_killeen({{a.begin(), a.end()}, {b.begin(), b.end()}});
    }
    throw InvalidInput("unknown two-sample test");
}

struct ContingencyResult {
    TestResult test;
    std::vector<std::vector<double>> expected;
    /// Adjusted standardized residuals (O - E) / sqrt(E (1 - row share)(1 - col share)).
    std::vector<std::vector<double>> residuals;
};

/// Pearson chi-squared test of independence on an r x c table of counts.
inline ContingencyResult contingency_test(const std::vector<std::vector<double>>& table) {
    require(table.size() >= 2 && table[0].size() >= 2, "contingency table must be at least 2 x 2");
    const std::size_t rows = table.size();
    const std::size_t cols = table[0].size();
    std::vector<double> row_sum(rows, 0.0);
    std::vector<double> col_sum(cols, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        require(table[i].size() == cols, "ragged contingency table");
        for (std::size_t j = 0; j < cols; ++j) {
            require(table[i][j] >= 0.0 && std::isfinite(table[i][j]), "contingency counts must be >= 0");
            row_sum[i] += table[i][j];
            col_sum[j] += table[i][j];
            total += table[i][j];
        }
    }
    require(total > 0.0, "contingency table is empty");
    for (const double s : row_sum) require(s > 0.0, "contingency table has a zero row marginal");
    for (const double s : col_sum) require(s > 0.0, "contingency table has a zero column marginal");

    ContingencyResult out;
    out.expected.assign(rows, std::vector<double>(cols));
    out.residuals.assign(rows, std::vector<double>(cols));
    double chi2 = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const double e = row_sum[i] * col_sum[j] / total;
            const double diff = table[i][j] - e;
            out.expected[i][j] = e;
            chi2 += diff * diff / e;
            out.residuals[i][j] = diff / std::sqrt(e * (1.0 - row_sum[i] / total) * (1.0 - col_sum[j] / total));
        }
    }
    out.test.method = "chi_squared";
    out.test.statistic = chi2;
    out.test.df = {static_cast<double>((rows - 1) * (cols - 1))};
    out.test.p_value = detail::clamp_p(chi2_sf(chi2, out.test.df[0]));
    return out;
}

enum class CorrelationKind { pearson, spearman };

/// Pearson or Spearman correlation; statistic is the coefficient, p from the
/// t distribution with n - 2 df, 95% CI by Fisher z (needs n >= 4).
inline TestResult correlation(CorrelationKind kind, std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "correlation needs equal-length inputs");
    require(x.size() >= 3, "correlation needs at least three points");
    std::vector<double> xs(x.begin(), x.end());
    std::vector<double> ys(y.begin(), y.end());
    if (kind == CorrelationKind::spearman) {
        xs = average_ranks(x);
        ys = average_ranks(y);
    }
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) throw Degenerate("correlation of a constant input");
    const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double n = static_cast<double>(xs.size());
    TestResult out;
    out.method = kind == CorrelationKind::pearson ? "pearson" : "spearman";
    out.statistic = r;
    out.df = {n - 2.0};
    if (std::fabs(r) >= 1.0) {
        out.p_value = 0.0;
        out.ci = Interval{r, r};
        return out;
    }
    const double t = r * std::sqrt((n - 2.0) / (1.0 - r * r));
    out.p_value = detail::clamp_p(student_t_two_sided(t, n - 2.0));
    if (n >= 4.0) {
        const double z = std::atanh(r);
        const double half = z_975 / std::sqrt(n - 3.0);
        out.ci = Interval{std::tanh(z - half), std::tanh(z + half)};
    }
    return out;
}

/// D'Agostino's skewness test. effect_size holds the sample skewness g1,
/// statistic the normal z.
inline TestResult skewness_z(std::span<const double> x) {
    require(x.size() >= 8, "skewness test needs at least 8 values");
    const double n = static_cast<double>(x.size());
    const double m = mean(x);
    double m2 = 0.0, m3 = 0.0;
    for (const double v : x) {
        const double d = v - m;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    if (m2 <= 0.0) throw Degenerate("skewness of a constant sample");
    const double g1 = m3 / std::pow(m2, 1.5);
    const double y = g1 * std::sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)));
    const double beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) /
                         ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
    const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
    const double delta = 1.0 / std::sqrt(0.5 * std::log(w2));
    const double alpha = std::sqrt(2.0 / (w2 - 1.0));
    const double ya = y / alpha;
    TestResult r;
    r.method = "skewness";
    r.statistic = delta * std::log(ya + std::sqrt(ya * ya + 1.0));
    r.p_value = detail::clamp_p(normal_two_sided(r.statistic));
    r.effect_size = g1;
    return r;
}

} // namespace surprise::stats
