#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "surprise/analysis/binning.hpp"
#include "surprise/corpus/citations.hpp"
#include "surprise/corpus/types.hpp"
#include "surprise/error.hpp"
#include "surprise/stats/regression.hpp"

namespace surprise::analysis {

enum class Linkage { intra, inter };

inline std::string_view to_string(Linkage l) { return l == Linkage::intra ? "intra" : "inter"; }

/// A linked paper is intradisciplinary when its groups are a subset of the
/// focal paper's groups.
inline Linkage interdisciplinary_classify(const std::set<std::string>& focal, const std::set<std::string>& other) {
    require(!focal.empty(), "focal paper has no field groups");
    return std::includes(focal.begin(), focal.end(), other.begin(), other.end()) ? Linkage::intra : Linkage::inter;
}

struct LinkCounts {
    std::size_t inter = 0;
    std::size_t intra = 0;

    std::optional<double> ratio() const {
        if (intra == 0) return std::nullopt;
        return static_cast<double>(inter) / static_cast<double>(intra);
    }
};

struct InterdisciplinarityBin {
    std::size_t bin = 0;
    LinkCounts references;
    LinkCounts citations;
};

struct InterdisciplinarityProfile {
    std::vector<InterdisciplinarityBin> bins;
    /// Inter reference count on log ppl with offset log(intra count).
    std::optional<stats::RegressionFit> references_fit;
    std::optional<stats::RegressionFit> citations_fit;
    std::string references_note;
    std::string citations_note;
    /// Binned papers without field groups.
    std::size_t ungrouped_focal = 0;
    /// Links to papers outside the corpus.
    std::size_t unusable_links = 0;
    /// Links to papers without field groups; the empty set is a subset, so these count as intra.
    std::size_t ungrouped_links = 0;
    /// Papers in the references fit whose offset used intra + 0.5 because intra was 0.
    std::size_t zero_intra_offsets = 0;
};

namespace detail {

inline double intra_offset(std::size_t intra) {
    return std::log(intra == 0 ? 0.5 : static_cast<double>(intra));
}

inline std::optional<stats::RegressionFit> fit_inter_rate(const std::vector<LinkCounts>& counts,
                                                          const std::vector<double>& log_ppl, std::size_t& zero_intra,
                                                          std::string& note) {
    std::vector<double> y, x, offset;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i].inter + counts[i].intra == 0) continue;
        zero_intra += counts[i].intra == 0;
        y.push_back(static_cast<double>(counts[i].inter));
        x.push_back(log_ppl[i]);
        offset.push_back(intra_offset(counts[i].intra));
    }
    try {
        return stats::fit_negbin(y, stats::with_intercept({x}), offset, {"const", "log_ppl"});
    } catch (const Error& e) {
        note = e.what();
        return std::nullopt;
    }
}

} // namespace detail

/// Per-bin interdisciplinary-to-intradisciplinary ratios for each paper's
/// references and for the papers citing it, plus negative binomial fits of the
/// per-paper inter count on log score with log(intra count) as offset.
inline InterdisciplinarityProfile interdisciplinarity_profile(const corpus::Corpus& corpus,
                                                              const corpus::CitationIndex& index,
                                                              const QuantileBinning& binning) {
    InterdisciplinarityProfile out;
    out.bins.resize(binning.k());
    for (std::size_t b = 0; b < out.bins.size(); ++b) out.bins[b].bin = b;

    auto classify_all = [&](const corpus::PaperRecord& focal, const std::vector<std::string>& ids) {
        LinkCounts c;
        std::set<std::string> seen;
        for (const auto& id : ids) {
            if (!seen.insert(id).second) continue;
            const auto* other = corpus.find(id);
            if (!other) {
                ++out.unusable_links;
                continue;
            }
            if (other->field_groups.empty()) ++out.ungrouped_links;
            if (interdisciplinary_classify(focal.field_groups, other->field_groups) == Linkage::intra) {
                ++c.intra;
            } else {
                ++c.inter;
            }
        }
        return c;
    };

    std::vector<LinkCounts> refs, cites;
    std::vector<double> log_ppl;
    for (const auto& m : binning.members()) {
        const auto* focal = corpus.find(m.doc_id);
        if (!focal) continue;
        if (focal->field_groups.empty()) {
            ++out.ungrouped_focal;
            continue;
        }
        const auto r = classify_all(*focal, focal->reference_ids);
        const auto c = classify_all(*focal, index.cited_by(focal->doc_id));
        auto& bin = out.bins[m.bin];
        bin.references.inter += r.inter;
        bin.references.intra += r.intra;
        bin.citations.inter += c.inter;
        bin.citations.intra += c.intra;
        refs.push_back(r);
        cites.push_back(c);
        log_ppl.push_back(std::log(m.score));
    }
    const bool any = std::any_of(refs.begin(), refs.end(), [](const auto& c) { return c.inter + c.intra > 0; });
    if (!any) throw InvalidInput("no resolvable references among the binned papers");
    out.references_fit = detail::fit_inter_rate(refs, log_ppl, out.zero_intra_offsets, out.references_note);
    std::size_t ignored = 0;
    out.citations_fit = detail::fit_inter_rate(cites, log_ppl, ignored, out.citations_note);
    return out;
}

} // namespace surprise::analysis
