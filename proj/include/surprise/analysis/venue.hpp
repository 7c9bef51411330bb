#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "surprise/analysis/binning.hpp"
#include "surprise/corpus/citations.hpp"
#include "surprise/corpus/types.hpp"
#include "surprise/error.hpp"
#include "surprise/stats/descriptive.hpp"
#include "surprise/stats/hypothesis.hpp"
#include "surprise/stats/regression.hpp"
#include "surprise/stats/smoothing.hpp"

namespace surprise::analysis {

struct ExtremeJournals {
    std::set<std::string> top;
    std::set<std::string> bottom;
};

/// The ceil(fraction * J) highest- and lowest-JIF journals, ties broken by
/// journal_id.
inline ExtremeJournals extreme_journals(const corpus::JifTable& table, double fraction) {
    require(fraction > 0.0 && fraction <= 0.5, "extreme fraction must lie in (0, 0.5]");
    std::vector<const corpus::JournalMetrics*> ranked;
    for (const auto& [id, m] : table.journals) ranked.push_back(&m);
    std::stable_sort(ranked.begin(), ranked.end(), [](auto a, auto b) { return a->jif < b->jif; });
    const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(ranked.size()) - 1e-9));
    ExtremeJournals out;
    for (std::size_t i = 0; i < count && i < ranked.size(); ++i) {
        out.bottom.insert(ranked[i]->journal_id);
        out.top.insert(ranked[ranked.size() - 1 - i]->journal_id);
    }
    return out;
}

/// Citations each paper received within the corpus.
inline std::unordered_map<std::string, double> citation_counts(const corpus::Corpus& corpus,
                                                               const corpus::CitationIndex& index) {
    std::unordered_map<std::string, double> out;
    for (const auto& p : corpus) out[p.doc_id] = static_cast<double>(index.citation_count(p.doc_id));
    return out;
}

/// JIF of each paper's journal, for papers whose journal has one.
inline std::unordered_map<std::string, double> paper_jif(const corpus::Corpus& corpus, const corpus::JifTable& table) {
    std::unordered_map<std::string, double> out;
    for (const auto& p : corpus) {
        if (const auto* m = table.find(p.journal_id)) out[p.doc_id] = m->jif;
    }
    return out;
}

struct ReferenceAgeBin {
    std::size_t bin = 0;
    std::size_t references = 0;
    double mean_age = 0.0;
    double mean_popularity = 0.0;
    /// Over references whose journal has a JIF.
    std::size_t with_jif = 0;
    double mean_jif = 0.0;
};

struct ReferenceAgeProfile {
    std::vector<ReferenceAgeBin> bins;
    std::size_t unresolved = 0;
};

/// Per-bin means of reference age (focal year minus reference year),
/// reference popularity (its in-corpus citation count) and the JIF of the
/// reference's journal. Reference ids outside the corpus are counted and skipped.
inline ReferenceAgeProfile reference_age_profile(const corpus::Corpus& corpus, const corpus::CitationIndex& index,
                                                 const QuantileBinning& binning,
                                                 const corpus::JifTable* jif = nullptr) {
    ReferenceAgeProfile out;
    out.bins.resize(binning.k());
    std::vector<double> age(binning.k(), 0.0), pop(binning.k(), 0.0), jsum(binning.k(), 0.0);
    for (const auto& m : binning.members()) {
        const auto* focal = corpus.find(m.doc_id);
        if (!focal) continue;
        std::set<std::string> seen;
        for (const auto& ref_id : focal->reference_ids) {
            if (!seen.insert(ref_id).second) continue;
            const auto* ref = corpus.find(ref_id);
            if (!ref) {
                ++out.unresolved;
                continue;
            }
            auto& b = out.bins[m.bin];
            ++b.references;
            age[m.bin] += corpus::year_of(focal->pub_date) - corpus::year_of(ref->pub_date);
            pop[m.bin] += static_cast<double>(index.citation_count(ref_id));
            if (jif) {
                if (const auto* jm = jif->find(ref->journal_id)) {
                    ++b.with_jif;
                    jsum[m.bin] += jm->jif;
                }
            }
        }
    }
    for (std::size_t b = 0; b < out.bins.size(); ++b) {
        auto& bin = out.bins[b];
        bin.bin = b;
        if (bin.references) {
            bin.mean_age = age[b] / static_cast<double>(bin.references);
            bin.mean_popularity = pop[b] / static_cast<double>(bin.references);
        }
        if (bin.with_jif) bin.mean_jif = jsum[b] / static_cast<double>(bin.with_jif);
    }
    return out;
}

struct JifCitationBin {
    std::size_t bin = 0;
    std::size_t n = 0;
    double mean_jif = 0.0;
    double mean_citations = 0.0;
    /// Within-bin Pearson correlation of JIF and citations, when defined.
    std::optional<stats::TestResult> pearson;
    std::optional<double> r_squared;
    std::vector<stats::SmoothedPoint> lowess;
};

struct JifCitationProfile {
    std::vector<JifCitationBin> bins;
    /// Bins in which no member has a JIF.
    std::size_t omitted_bins = 0;
    /// citations ~ 1 + log ppl + log ppl^2 over all binned papers with a citation count.
    std::optional<stats::RegressionFit> quadratic;
};

inline JifCitationProfile jif_citation_by_bin(const QuantileBinning& binning,
                                              const std::unordered_map<std::string, double>& jif,
                                              const std::unordered_map<std::string, double>& citations,
                                              double lowess_frac = 2.0 / 3.0) {
    JifCitationProfile out;
    std::vector<std::vector<double>> bj(binning.k()), bc(binning.k());
    std::vector<double> lp, lp2, cites;
    for (const auto& m : binning.members()) {
        const auto c = citations.find(m.doc_id);
        if (c == citations.end()) continue;
        const double l = std::log(m.score);
        lp.push_back(l);
        lp2.push_back(l * l);
        cites.push_back(c->second);
        const auto j = jif.find(m.doc_id);
        if (j == jif.end()) continue;
        bj[m.bin].push_back(j->second);
        bc[m.bin].push_back(c->second);
    }
    for (std::size_t b = 0; b < binning.k(); ++b) {
        if (bj[b].empty()) {
            ++out.omitted_bins;
            continue;
        }
        JifCitationBin row;
        row.bin = b;
        row.n = bj[b].size();
        row.mean_jif = stats::mean(bj[b]);
        row.mean_citations = stats::mean(bc[b]);
        try {
            row.pearson = stats::correlation(stats::CorrelationKind::pearson, bj[b], bc[b]);
            row.r_squared = row.pearson->statistic * row.pearson->statistic;
        } catch (const Error&) {
            // fewer than three points or a constant column
        }
        if (row.n >= 5 && lowess_frac * static_cast<double>(row.n) >= 2.0) {
            row.lowess = stats::lowess(bj[b], bc[b], lowess_frac);
        }
        out.bins.push_back(std::move(row));
    }
    if (cites.size() > 3) {
        try {
            out.quadratic = stats::fit_linear(cites, stats::with_intercept({lp, lp2}), {"const", "log_ppl", "log_ppl2"});
        } catch (const Error&) {
            // too few distinct scores for a quadratic
        }
    }
    return out;
}

} // namespace surprise::analysis
