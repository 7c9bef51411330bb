#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "surprise/corpus/types.hpp"

namespace surprise::corpus {

/// Reverse reference graph over one corpus.
class CitationIndex {
public:
    /// doc_ids of papers whose reference lists contain `doc_id`, in corpus order.
    const std::vector<std::string>& cited_by(const std::string& doc_id) const {
        static const std::vector<std::string> none;
        const auto it = cited_by_.find(doc_id);
        return it == cited_by_.end() ? none : it->second;
    }

    std::size_t citation_count(const std::string& doc_id) const { return cited_by(doc_id).size(); }

    /// Distinct (citing, cited) pairs whose cited id is in the corpus.
    std::size_t resolved() const { return resolved_; }
    /// Reference entries naming ids absent from the corpus.
    std::size_t unresolved() const { return unresolved_; }

    friend CitationIndex resolve_citations(const Corpus& corpus);

private:
    std::unordered_map<std::string, std::vector<std::string>> cited_by_;
    std::size_t resolved_ = 0;
    std::size_t unresolved_ = 0;
};

/// Builds the cited-by lists. Repeated references from one paper to the same
/// target count once; unknown targets are tallied and otherwise ignored.
inline CitationIndex resolve_citations(const Corpus& corpus) {
    CitationIndex index;
    std::unordered_set<std::string> seen;
    for (const auto& paper : corpus) {
        seen.clear();
        for (const auto& ref : paper.reference_ids) {
            if (!corpus.contains(ref)) {
                ++index.unresolved_;
                continue;
            }
            if (!seen.insert(ref).second) continue;
            index.cited_by_[ref].push_back(paper.doc_id);
            ++index.resolved_;
        }
    }
    return index;
}

struct JifTable {
    int target_year = 0;
    std::map<std::string, JournalMetrics> journals;
    /// Journals without a citable item in the two-year window.
    std::vector<std::string> omitted;

    const JournalMetrics* find(const std::string& journal_id) const {
        const auto it = journals.find(journal_id);
        return it == journals.end() ? nullptr : &it->second;
    }
};

/// Two-year impact factor for `target_year`: citations made in target_year to
/// a journal's items from the two preceding years, over its citable items from
/// those years.
inline JifTable compute_jif(const Corpus& corpus, const CitationIndex& index, int target_year) {
    std::map<std::string, JournalMetrics> acc;
    for (const auto& paper : corpus) {
        if (paper.journal_id.empty()) continue;
        auto& m = acc[paper.journal_id];
        m.journal_id = paper.journal_id;
        const int year = year_of(paper.pub_date);
        if (year != target_year - 1 && year != target_year - 2) continue;
        if (is_citable(paper.doc_type)) ++m.citable_denominator;
        for (const auto& citer_id : index.cited_by(paper.doc_id)) {
            const auto* citer = corpus.find(citer_id);
            if (citer && year_of(citer->pub_date) == target_year) ++m.citation_numerator;
        }
    }
    JifTable table;
    table.target_year = target_year;
    for (auto& [id, m] : acc) {
        if (m.citable_denominator == 0) {
            table.omitted.push_back(id);
            continue;
        }
        m.jif = static_cast<double>(m.citation_numerator) / static_cast<double>(m.citable_denominator);
        table.journals.emplace(id, m);
    }
    return table;
}

} // namespace surprise::corpus
