#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "surprise/analysis/binning.hpp"
#include "surprise/analysis/profiles.hpp"
#include "surprise/corpus/types.hpp"
#include "surprise/stats/descriptive.hpp"
#include "surprise/stats/hypothesis.hpp"

namespace surprise::analysis {

struct ReviewMetrics {
    std::string doc_id;
    std::size_t bin = 0;
    double score = 0.0;
    /// max - min rating; absent without ratings.
    std::optional<double> disparity;
    std::optional<double> mean_rating;
    std::optional<double> mean_confidence;
    /// Days from received to accepted; absent when either date is.
    std::optional<long> delay_days;
};

struct ReviewVariability {
    std::vector<ReviewMetrics> papers;
    /// Bundles whose doc_id is not binned.
    std::size_t unmatched = 0;
    /// Welch tests of the pooled top bins against the pooled bottom bins.
    std::optional<stats::TestResult> disparity_welch;
    std::optional<stats::TestResult> rating_welch;
    std::optional<stats::TestResult> confidence_welch;

    std::unordered_map<std::string, double> disparity_map() const { return collect(&ReviewMetrics::disparity); }
    std::unordered_map<std::string, double> rating_map() const { return collect(&ReviewMetrics::mean_rating); }
    std::unordered_map<std::string, double> confidence_map() const { return collect(&ReviewMetrics::mean_confidence); }

    std::unordered_map<std::string, double> delay_map() const {
        std::unordered_map<std::string, double> out;
        for (const auto& p : papers) {
            if (p.delay_days) out[p.doc_id] = static_cast<double>(*p.delay_days);
        }
        return out;
    }

private:
    std::unordered_map<std::string, double> collect(std::optional<double> ReviewMetrics::*field) const {
        std::unordered_map<std::string, double> out;
        for (const auto& p : papers) {
            if (p.*field) out[p.doc_id] = *(p.*field);
        }
        return out;
    }
};

inline ReviewMetrics review_metrics(const corpus::ReviewBundle& bundle) {
    ReviewMetrics m;
    m.doc_id = bundle.doc_id;
    if (!bundle.ratings.empty()) {
        const auto [lo, hi] = std::minmax_element(bundle.ratings.begin(), bundle.ratings.end());
        m.disparity = *hi - *lo;
        m.mean_rating = stats::mean(bundle.ratings);
    }
    if (!bundle.confidences.empty()) m.mean_confidence = stats::mean(bundle.confidences);
    if (bundle.received_date && bundle.accepted_date) {
        m.delay_days = corpus::days_between(*bundle.received_date, *bundle.accepted_date);
    }
    return m;
}

/// Per-paper review metrics joined to the binning, with Welch comparisons of
/// the top and bottom bins.
inline ReviewVariability review_variability(const std::vector<corpus::ReviewBundle>& reviews,
                                            const QuantileBinning& binning,
                                            std::size_t extreme_bins = default_extreme_bins) {
    detail::require_top_bottom(binning, extreme_bins);
    ReviewVariability out;
    for (const auto& bundle : reviews) {
        const auto bin = binning.bin_of(bundle.doc_id);
        if (!bin) {
            ++out.unmatched;
            continue;
        }
        auto m = review_metrics(bundle);
        m.bin = *bin;
        m.score = *binning.score_of(bundle.doc_id);
        out.papers.push_back(std::move(m));
    }
    std::sort(out.papers.begin(), out.papers.end(), [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; });

    auto compare = [&](std::optional<double> ReviewMetrics::*field) -> std::optional<stats::TestResult> {
        std::vector<double> top, bottom;
        for (const auto& p : out.papers) {
            if (!(p.*field)) continue;
            if (binning.in_top(p.bin, extreme_bins)) top.push_back(*(p.*field));
            if (binning.in_bottom(p.bin, extreme_bins)) bottom.push_back(*(p.*field));
        }
        if (top.size() < 2 || bottom.size() < 2) return std::nullopt;
        try {
            return stats::welch_t(top, bottom);
        } catch (const Degenerate&) {
            return std::nullopt;
        }
    };
    out.disparity_welch = compare(&ReviewMetrics::disparity);
    out.rating_welch = compare(&ReviewMetrics::mean_rating);
    out.confidence_welch = compare(&ReviewMetrics::mean_confidence);
    return out;
}

} // namespace surprise::analysis
