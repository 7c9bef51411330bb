#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "surprise/corpus/types.hpp"
#include "surprise/lm/ngram.hpp"
#include "surprise/lm/perplexity.hpp"
#include "surprise/rng.hpp"
#include "surprise/stats/descriptive.hpp"
#include "surprise/stats/regression.hpp"
#include "surprise/text.hpp"

namespace surprise::lm {

/// Word -> interchangeable words, built from synonyms.tsv (one tab-separated
/// group per line).
class SynonymLexicon {
public:
    static SynonymLexicon parse(std::istream& in) {
        SynonymLexicon lex;
        std::string line;
        while (std::getline(in, line)) {
            std::vector<std::string> group;
            std::stringstream fields(line);
            std::string word;
            while (std::getline(fields, word, '\t')) {
                while (!word.empty() && (word.back() == '\r' || word.back() == ' ')) word.pop_back();
                while (!word.empty() && word.front() == ' ') word.erase(word.begin());
                if (!word.empty()) group.push_back(word);
            }
            lex.add_group(group);
        }
        return lex;
    }

    void add_group(const std::vector<std::string>& group) {
        for (const auto& w : group) {
            auto& alts = synonyms_[w];
            for (const auto& other : group) {
                if (other != w && std::find(alts.begin(), alts.end(), other) == alts.end()) alts.push_back(other);
            }
            if (alts.empty()) synonyms_.erase(w);
        }
    }

    /// Alternatives for `word`, or nullptr when it has none.
    const std::vector<std::string>* alternatives(const std::string& word) const {
        const auto it = synonyms_.find(word);
        return it == synonyms_.end() ? nullptr : &it->second;
    }

    bool empty() const { return synonyms_.empty(); }

private:
    std::unordered_map<std::string, std::vector<std::string>> synonyms_;
};

/// One replacement experiment: which token positions of which document were
/// swapped for which synonyms, and the resulting perplexities.
struct StabilityTrial {
    std::size_t doc_index = 0;
    int repetition = 0;
    int k = 0;
    std::vector<std::size_t> positions;
    std::vector<std::string> replacements;
    double original_perplexity = 0.0;
    double perturbed_perplexity = 0.0;
    double abs_delta = 0.0;
};

struct StabilityCurve {
    std::vector<int> k;
    std::vector<double> mean_abs_delta;
    std::vector<std::size_t> observations;
    /// Fit of |dPPL| on (1, k, k^2) over all trials; absent with no trials.
    std::optional<stats::RegressionFit> quadratic;
    /// Standard deviation of the original perplexities of the sample.
    double reference_sd = 0.0;
    /// (document, repetition) pairs skipped for lack of a lexicon-covered word.
    std::size_t skipped = 0;
    std::vector<StabilityTrial> trials;

    std::optional<double> quadratic_coefficient() const {
        if (!quadratic) return std::nullopt;
        return quadratic->coefficients[2];
    }
};

/// Synonym-replacement stability curve under an n-gram model.
///
/// For every document and repetition, k = 1..max_k lexicon-covered token
/// positions (all of them when fewer than k exist) are replaced by randomly
/// chosen synonyms and the absolute perplexity change is recorded. Document
/// d, repetition r draws from substream derive_seed(seed, d * reps + r).
inline StabilityCurve synonym_stability(const NGramModel& model, const std::vector<corpus::PaperRecord>& sample,
                                        const SynonymLexicon& lexicon, int max_k, int reps, std::uint64_t seed) {
    require(max_k >= 1, "max_k must be at least 1");
    require(reps >= 1, "reps must be at least 1");
    StabilityCurve curve;
    std::vector<double> sums(max_k, 0.0);
    curve.observations.assign(max_k, 0);
    std::vector<double> originals;
    for (std::size_t d = 0; d < sample.size(); ++d) {
        const auto tokens = text::tokenize(sample[d].abstract);
        if (tokens.empty()) continue;
        const double original = perplexity(model.logprobs(tokens));
        originals.push_back(original);
        std::vector<std::size_t> covered;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (lexicon.alternatives(tokens[i])) covered.push_back(i);
        }
        for (int r = 0; r < reps; ++r) {
            if (covered.empty()) {
                ++curve.skipped;
                continue;
            }
            Rng rng(derive_seed(seed, d * static_cast<std::uint64_t>(reps) + static_cast<std::uint64_t>(r)));
            for (int k = 1; k <= max_k; ++k) {
                StabilityTrial trial;
                trial.doc_index = d;
                trial.repetition = r;
                trial.k = k;
                auto pool = covered;
                const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(k), pool.size());
                auto perturbed = tokens;
                for (std::size_t c = 0; c < count; ++c) {
                    const std::size_t pick = c + rng.below(pool.size() - c);
                    std::swap(pool[c], pool[pick]);
                    const std::size_t pos = pool[c];
                    const auto& alts = *lexicon.alternatives(tokens[pos]);
                    const auto& replacement = alts[rng.below(alts.size())];
                    perturbed[pos] = replacement;
                    trial.positions.push_back(pos);
                    trial.replacements.push_back(replacement);
                }
                trial.original_perplexity = original;
                trial.perturbed_perplexity = perplexity(model.logprobs(perturbed));
                trial.abs_delta = std::fabs(trial.perturbed_perplexity - original);
                sums[k - 1] += trial.abs_delta;
                ++curve.observations[k - 1];
                curve.trials.push_back(std::move(trial));
            }
        }
    }
    for (int k = 1; k <= max_k; ++k) {
        curve.k.push_back(k);
        const auto n = curve.observations[k - 1];
        curve.mean_abs_delta.push_back(n ? sums[k - 1] / static_cast<double>(n) : 0.0);
    }
    curve.reference_sd = originals.size() >= 2 ? stats::sd(originals) : 0.0;

    std::vector<double> ks, ks2, deltas;
    for (const auto& t : curve.trials) {
        ks.push_back(t.k);
        ks2.push_back(static_cast<double>(t.k) * t.k);
        deltas.push_back(t.abs_delta);
    }
    if (max_k >= 3 && deltas.size() > 3) {
        try {
            curve.quadratic = stats::fit_linear(deltas, stats::with_intercept({ks, ks2}), {"const", "k", "k2"});
        } catch (const Degenerate&) {
            // Fewer than three distinct k values among the trials.
        }
    }
    return curve;
}

} // namespace surprise::lm
