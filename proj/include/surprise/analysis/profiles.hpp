#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "surprise/analysis/binning.hpp"
#include "surprise/error.hpp"
#include "surprise/stats/descriptive.hpp"
#include "surprise/stats/hypothesis.hpp"
#include "surprise/stats/regression.hpp"

namespace surprise::analysis {

/// Number of bins pooled at each end for top-vs-bottom comparisons.
inline constexpr std::size_t default_extreme_bins = 3;

namespace detail {

/// Chi-squared on a table whose marginals may vanish; a degenerate table
/// carries no evidence against independence and reports statistic 0, p 1.
inline stats::ContingencyResult tolerant_contingency(const std::vector<std::vector<double>>& table) {
    try {
        return stats::contingency_test(table);
    } catch (const InvalidInput&) {
        stats::ContingencyResult out;
        out.test.method = "chi_squared";
        out.test.df = {static_cast<double>((table.size() - 1) * (table[0].size() - 1))};
        out.expected = table;
        out.residuals.assign(table.size(), std::vector<double>(table[0].size(), 0.0));
        return out;
    }
}

/// Logistic fit of a 0/1 outcome on log(score); empty when the outcome has a
/// single class or is separated.
/// Optional `levels` (one per observation) add dummy columns "fe:<level>",
/// with the first level in sorted order as the reference.
inline std::optional<stats::RegressionFit> logistic_on_log_score(const std::vector<double>& outcome,
                                                                 const std::vector<double>& log_score,
                                                                 std::string* note,
                                                                 const std::vector<std::string>* levels = nullptr) {
    std::vector<std::vector<double>> columns{log_score};
    std::vector<std::string> names{"const", "log_ppl"};
    if (levels) {
        const std::set<std::string> distinct(levels->begin(), levels->end());
        for (auto it = std::next(distinct.begin()); it != distinct.end(); ++it) {
            std::vector<double> dummy(levels->size());
            for (std::size_t i = 0; i < levels->size(); ++i) dummy[i] = (*levels)[i] == *it ? 1.0 : 0.0;
            columns.push_back(std::move(dummy));
            names.push_back("fe:" + *it);
        }
    }
    try {
        return stats::fit_logistic(outcome, stats::with_intercept(columns), names);
    } catch (const Error& e) {
        if (note) *note = e.what();
        return std::nullopt;
    }
}

inline void require_top_bottom(const QuantileBinning& binning, std::size_t extreme_bins) {
    require(extreme_bins >= 1 && 2 * extreme_bins <= binning.k(), "top and bottom bin groups overlap");
}

} // namespace detail

struct BinShare {
    std::size_t bin = 0;
    std::size_t members = 0;
    std::size_t flagged = 0;
    double proportion = 0.0;
};

struct ExtremeShareProfile {
    std::vector<BinShare> bins;
    /// Pooled top-bins vs bottom-bins 2 x 2 (rows top, bottom; columns flagged, not).
    stats::ContingencyResult top_vs_bottom;
    std::optional<stats::RegressionFit> logistic;
    std::string logistic_note;
    /// Binned documents without a flag value.
    std::size_t unflagged = 0;
};

/// Categorical level per doc_id for fixed effects in the logistic fits.
using FixedEffects = std::unordered_map<std::string, std::string>;

/// Share of flagged documents per bin, a pooled top-vs-bottom chi-squared and
/// a logistic regression of the flag on log score. With `fixed_effects`, the
/// regression also gets dummies for each document's level; documents without
/// a level share the level "".
inline ExtremeShareProfile extreme_share_profile(const QuantileBinning& binning,
                                                 const std::unordered_map<std::string, bool>& flag,
                                                 std::size_t extreme_bins = default_extreme_bins,
                                                 const FixedEffects* fixed_effects = nullptr) {
    detail::require_top_bottom(binning, extreme_bins);
    ExtremeShareProfile out;
    out.bins.resize(binning.k());
    std::vector<std::vector<double>> pooled(2, std::vector<double>(2, 0.0));
    std::vector<double> outcome, log_score;
    std::vector<std::string> levels;
    for (const auto& m : binning.members()) {
        const auto it = flag.find(m.doc_id);
        if (it == flag.end()) {
            ++out.unflagged;
            continue;
        }
        auto& b = out.bins[m.bin];
        ++b.members;
        b.flagged += it->second;
        const int col = it->second ? 0 : 1;
        if (binning.in_top(m.bin, extreme_bins)) pooled[0][col] += 1.0;
        if (binning.in_bottom(m.bin, extreme_bins)) pooled[1][col] += 1.0;
        outcome.push_back(it->second ? 1.0 : 0.0);
        log_score.push_back(std::log(m.score));
        if (fixed_effects) {
            const auto level = fixed_effects->find(m.doc_id);
            levels.push_back(level == fixed_effects->end() ? std::string() : level->second);
        }
    }
    for (std::size_t b = 0; b < out.bins.size(); ++b) {
        out.bins[b].bin = b;
        if (out.bins[b].members) {
            out.bins[b].proportion =
                static_cast<double>(out.bins[b].flagged) / static_cast<double>(out.bins[b].members);
        }
    }
    out.top_vs_bottom = detail::tolerant_contingency(pooled);
    out.logistic =
        detail::logistic_on_log_score(outcome, log_score, &out.logistic_note, fixed_effects ? &levels : nullptr);
    return out;
}

struct BinDispersion {
    std::size_t bin = 0;
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
    std::vector<double> values;
};

struct DispersionProfile {
    std::vector<BinDispersion> bins;
    std::optional<stats::TestResult> white;
    /// OLS of log within-bin variance on the bin index scaled to [0, 1].
    std::optional<stats::RegressionFit> binned_variance;
    std::size_t variance_bins = 0;
    std::size_t omitted_variance_bins = 0;
    std::optional<stats::TestResult> levene;
    std::optional<stats::TestResult> fligner;
    std::size_t missing_values = 0;
};

/// Binned log-variance regression used by dispersion_profile: bins are
/// quantile bins of the score; bins with fewer than two values or zero
/// variance are dropped and counted.
inline std::optional<stats::RegressionFit> binned_variance_regression(const Scores& scores,
                                                                      const std::unordered_map<std::string, double>& values,
                                                                      std::size_t variance_bins,
                                                                      std::size_t* omitted = nullptr) {
    const auto fine = quantile_bins(scores, variance_bins);
    std::vector<std::vector<double>> per_bin(variance_bins);
    for (const auto& m : fine.members()) per_bin[m.bin].push_back(values.at(m.doc_id));
    std::vector<double> index, log_var;
    std::size_t dropped = 0;
    for (std::size_t b = 0; b < variance_bins; ++b) {
        const double v = per_bin[b].size() >= 2 ? stats::variance(per_bin[b]) : 0.0;
        if (!(v > 0.0)) {
            ++dropped;
            continue;
        }
        index.push_back(static_cast<double>(b) / static_cast<double>(variance_bins - 1));
        log_var.push_back(std::log(v));
    }
    if (omitted) *omitted = dropped;
    if (index.size() < 3) return std::nullopt;
    return stats::fit_linear(log_var, stats::with_intercept({index}), {"const", "bin_index"});
}

/// Spread of a per-document value across score bins: per-bin SD, White's test
/// of value on log score, binned log-variance OLS, and Levene / Fligner-Killeen
/// between the pooled top and bottom bins.
inline DispersionProfile dispersion_profile(const QuantileBinning& binning,
                                            const std::unordered_map<std::string, double>& values,
                                            std::size_t variance_bins,
                                            std::size_t extreme_bins = default_extreme_bins) {
    detail::require_top_bottom(binning, extreme_bins);
    require(variance_bins >= 3, "variance_bins must be at least 3");
    DispersionProfile out;
    out.variance_bins = variance_bins;
    out.bins.resize(binning.k());
    Scores present;
    std::vector<double> xs, ys, top, bottom;
    for (const auto& m : binning.members()) {
        const auto it = values.find(m.doc_id);
        if (it == values.end()) {
            ++out.missing_values;
            continue;
        }
        out.bins[m.bin].values.push_back(it->second);
        present.emplace(m.doc_id, m.score);
        xs.push_back(std::log(m.score));
        ys.push_back(it->second);
        if (binning.in_top(m.bin, extreme_bins)) top.push_back(it->second);
        if (binning.in_bottom(m.bin, extreme_bins)) bottom.push_back(it->second);
    }
    for (std::size_t b = 0; b < out.bins.size(); ++b) {
        auto& bin = out.bins[b];
        bin.bin = b;
        bin.n = bin.values.size();
        if (bin.n) bin.mean = stats::mean(bin.values);
        if (bin.n >= 2) bin.sd = stats::sd(bin.values);
    }
    if (ys.size() >= 10) {
        try {
            out.white = stats::white_test(ys, xs);
        } catch (const InvalidInput&) {
            // all scores equal
        }
    }
    if (present.size() >= variance_bins) {
        out.binned_variance = binned_variance_regression(present, values, variance_bins, &out.omitted_variance_bins);
    }
    if (top.size() >= 2 && bottom.size() >= 2) {
        out.levene = stats::levene({top, bottom});
        out.fligner = stats::fligner_killeen({top, bottom});
    }
    return out;
}

struct LabelProfile {
    std::string label;
    std::size_t papers = 0;
    /// Fraction of this label's papers in each bin; sums to 1.
    std::vector<double> shares;
    std::optional<stats::RegressionFit> logistic;
    std::string logistic_note;
    std::optional<stats::TestResult> mann_whitney;
};

struct GroupProfiles {
    std::vector<LabelProfile> labels;
    /// Labels held by fewer than two binned papers.
    std::vector<std::string> skipped;
};

/// Per-label bin shares, logistic regression of membership on log score and a
/// Mann-Whitney comparison of members' vs non-members' scores. A document may
/// carry several labels (e.g. funders).
inline GroupProfiles group_profiles(const QuantileBinning& binning,
                                    const std::unordered_map<std::string, std::vector<std::string>>& labels) {
    std::map<std::string, std::vector<std::size_t>> holders;  // label -> member ranks
    const auto& members = binning.members();
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto it = labels.find(members[i].doc_id);
        if (it == labels.end()) continue;
        std::vector<std::string> seen;
        for (const auto& label : it->second) {
            if (std::find(seen.begin(), seen.end(), label) != seen.end()) continue;
            seen.push_back(label);
            holders[label].push_back(i);
        }
    }
    std::vector<double> log_score(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) log_score[i] = std::log(members[i].score);

    GroupProfiles out;
    for (const auto& [label, ranks] : holders) {
        if (ranks.size() < 2) {
            out.skipped.push_back(label);
            continue;
        }
        LabelProfile p;
        p.label = label;
        p.papers = ranks.size();
        p.shares.assign(binning.k(), 0.0);
        std::vector<double> outcome(members.size(), 0.0);
        for (const auto i : ranks) {
            p.shares[members[i].bin] += 1.0;
            outcome[i] = 1.0;
        }
        for (auto& s : p.shares) s /= static_cast<double>(ranks.size());
        p.logistic = detail::logistic_on_log_score(outcome, log_score, &p.logistic_note);
        std::vector<double> in, rest;
        for (std::size_t i = 0; i < members.size(); ++i) (outcome[i] == 1.0 ? in : rest).push_back(members[i].score);
        if (!rest.empty()) p.mann_whitney = stats::mann_whitney_u(in, rest);
        out.labels.push_back(std::move(p));
    }
    return out;
}

} // namespace surprise::analysis
