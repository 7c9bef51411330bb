#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "surprise/error.hpp"

namespace surprise::analysis {

using Scores = std::map<std::string, double>;

/// Documents ranked by score and cut into k bins of near-equal size.
class QuantileBinning {
public:
    struct Member {
        std::string doc_id;
        double score = 0.0;
        std::size_t bin = 0;
    };

    std::size_t k() const { return k_; }
    std::size_t size() const { return members_.size(); }

    /// Members in ascending rank order.
    const std::vector<Member>& members() const { return members_; }

    std::optional<std::size_t> bin_of(const std::string& doc_id) const {
        const auto it = index_.find(doc_id);
        if (it == index_.end()) return std::nullopt;
        return members_[it->second].bin;
    }

    std::optional<double> score_of(const std::string& doc_id) const {
        const auto it = index_.find(doc_id);
        if (it == index_.end()) return std::nullopt;
        return members_[it->second].score;
    }

    std::vector<std::size_t> bin_sizes() const {
        std::vector<std::size_t> sizes(k_, 0);
        for (const auto& m : members_) ++sizes[m.bin];
        return sizes;
    }

    /// True when `bin` is one of the `count` highest bins.
    bool in_top(std::size_t bin, std::size_t count) const { return bin + count >= k_; }
    bool in_bottom(std::size_t bin, std::size_t count) const { return bin < count; }

    friend QuantileBinning quantile_bins(const Scores& scores, std::size_t k);

private:
    std::size_t k_ = 0;
    std::vector<Member> members_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Rank-based binning: the document at rank i of n lands in bin floor(i * k / n).
/// Equal scores are ordered by doc_id.
inline QuantileBinning quantile_bins(const Scores& scores, std::size_t k) {
    require(k >= 2, "binning needs at least 2 bins");
    require(scores.size() >= k, "fewer documents than bins");
    QuantileBinning out;
    out.k_ = k;
    out.members_.reserve(scores.size());
    for (const auto& [id, score] : scores) {
        require(std::isfinite(score), "non-finite score for " + id);
        out.members_.push_back({id, score, 0});
    }
    // The map already iterates in doc_id order, so a stable sort on score
    // keeps doc_id as the tie-breaker.
    std::stable_sort(out.members_.begin(), out.members_.end(),
                     [](const auto& a, const auto& b) { return a.score < b.score; });
    const std::size_t n = out.members_.size();
    for (std::size_t i = 0; i < n; ++i) {
        out.members_[i].bin = i * k / n;
        out.index_.emplace(out.members_[i].doc_id, i);
    }
    return out;
}

} // namespace surprise::analysis
