#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "surprise/analysis/profiles.hpp"
#include "surprise/error.hpp"
#include "surprise/stats/hypothesis.hpp"
#include "surprise/text.hpp"

namespace surprise::analysis {

enum class Orientation { high, low };

inline std::string_view to_string(Orientation o) { return o == Orientation::high ? "high" : "low"; }

struct LexiconRatio {
    std::string word;
    std::size_t count_high = 0;
    std::size_t count_low = 0;
    double freq_high = 0.0;
    double freq_low = 0.0;
    double r = 1.0;
    /// r when r > 1, else 1 / r.
    double display_value = 1.0;
    Orientation orientation = Orientation::low;
};

inline LexiconRatio make_ratio(std::string word, std::size_t count_high, std::size_t tokens_high,
                               std::size_t count_low, std::size_t tokens_low) {
    LexiconRatio out;
    out.word = std::move(word);
    out.count_high = count_high;
    out.count_low = count_low;
    out.freq_high = static_cast<double>(count_high) / static_cast<double>(tokens_high);
    out.freq_low = static_cast<double>(count_low) / static_cast<double>(tokens_low);
    out.r = out.freq_high / out.freq_low;
    out.orientation = out.r > 1.0 ? Orientation::high : Orientation::low;
    out.display_value = out.r > 1.0 ? out.r : 1.0 / out.r;
    return out;
}

struct TermSet {
    std::string name;
    std::set<std::string> terms;
};

struct TermSetTest {
    /// Rows: one per term set, then all remaining tokens. Columns: high, low.
    std::vector<std::string> rows;
    std::vector<std::vector<double>> counts;
    stats::ContingencyResult result;
};

struct WordRatioResult {
    std::vector<LexiconRatio> ratios;
    std::size_t tokens_high = 0;
    std::size_t tokens_low = 0;
    std::optional<TermSetTest> term_sets;
};

/// Word counts and total token count over a set of texts.
struct WordCounts {
    std::map<std::string, std::size_t> counts;
    std::size_t total = 0;

    void add_text(std::string_view s) {
        for (auto& w : text::words(s)) {
            ++counts[std::move(w)];
            ++total;
        }
    }

    std::size_t count(const std::string& w) const {
        const auto it = counts.find(w);
        return it == counts.end() ? 0 : it->second;
    }
};

/// Relative-frequency ratios of words between a high and a low group of
/// texts, restricted to words reaching min_count in both groups and sorted by
/// |log r| (then word). Term sets, if given, get a chi-squared test of their
/// token counts across the two groups.
inline WordRatioResult word_ratio_analysis(const std::vector<std::string>& high_texts,
                                           const std::vector<std::string>& low_texts, std::size_t min_count = 20,
                                           const std::vector<TermSet>& term_sets = {}) {
    require(!high_texts.empty() && !low_texts.empty(), "word ratio analysis needs both groups nonempty");
    WordCounts high, low;
    for (const auto& t : high_texts) high.add_text(t);
    for (const auto& t : low_texts) low.add_text(t);
    require(high.total > 0 && low.total > 0, "a word ratio group contains no words");

    WordRatioResult out;
    out.tokens_high = high.total;
    out.tokens_low = low.total;
    for (const auto& [word, ch] : high.counts) {
        const auto cl = low.count(word);
        if (ch < std::max<std::size_t>(min_count, 1) || cl < std::max<std::size_t>(min_count, 1)) continue;
        out.ratios.push_back(make_ratio(word, ch, high.total, cl, low.total));
    }
    std::stable_sort(out.ratios.begin(), out.ratios.end(), [](const auto& a, const auto& b) {
        return std::fabs(std::log(a.r)) > std::fabs(std::log(b.r));
    });

    if (!term_sets.empty()) {
        TermSetTest t;
        double rest_high = static_cast<double>(high.total);
        double rest_low = static_cast<double>(low.total);
        for (const auto& set : term_sets) {
            double h = 0.0, l = 0.0;
            for (const auto& term : set.terms) {
                h += static_cast<double>(high.count(term));
                l += static_cast<double>(low.count(term));
            }
            t.rows.push_back(set.name);
            t.counts.push_back({h, l});
            rest_high -= h;
            rest_low -= l;
        }
        t.rows.push_back("other");
        t.counts.push_back({rest_high, rest_low});
        t.result = detail::tolerant_contingency(t.counts);
        out.term_sets = std::move(t);
    }
    return out;
}

/// Lexicon terms are single words, normalised the way texts are tokenized.
inline std::string normalize_term(std::string_view term) {
    auto w = text::words(term);
    if (w.size() != 1) throw InvalidInput("lexicon term is not a single word: " + std::string(term));
    return std::move(w.front());
}

/// One term per line; blank lines and lines starting with '#' are ignored.
inline std::vector<std::string> read_term_list(std::istream& in) {
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        out.push_back(normalize_term(line));
    }
    return out;
}

inline const std::vector<std::string>& default_uncertainty_lexicon() {
    static const std::vector<std::string> words{"perhaps", "maybe", "likely", "might"};
    return words;
}

struct UncertaintyRate {
    std::size_t hits_high = 0;
    std::size_t tokens_high = 0;
    std::size_t hits_low = 0;
    std::size_t tokens_low = 0;
    /// word -> (count in high, count in low)
    std::map<std::string, std::pair<std::size_t, std::size_t>> per_word;
    /// 2 x 2: rows high, low; columns lexicon hits, other tokens.
    stats::ContingencyResult test;

    double rate_high() const { return static_cast<double>(hits_high) / static_cast<double>(tokens_high); }
    double rate_low() const { return static_cast<double>(hits_low) / static_cast<double>(tokens_low); }
};

/// Rate of lexicon words among all comment tokens in two groups, compared by a
/// 2 x 2 chi-squared test.
inline UncertaintyRate uncertainty_word_rate(const std::vector<std::string>& comments_high,
                                             const std::vector<std::string>& comments_low,
                                             const std::vector<std::string>& lexicon) {
    require(!lexicon.empty(), "uncertainty lexicon is empty");
    require(!comments_high.empty() && !comments_low.empty(), "uncertainty analysis needs comments in both groups");
    WordCounts high, low;
    for (const auto& c : comments_high) high.add_text(c);
    for (const auto& c : comments_low) low.add_text(c);
    require(high.total > 0 && low.total > 0, "a comment group contains no words");

    UncertaintyRate out;
    out.tokens_high = high.total;
    out.tokens_low = low.total;
    for (const auto& raw : lexicon) {
        const auto word = normalize_term(raw);
        if (out.per_word.count(word)) continue;
        const auto h = high.count(word);
        const auto l = low.count(word);
        out.per_word[word] = {h, l};
        out.hits_high += h;
        out.hits_low += l;
    }
    const auto hh = static_cast<double>(out.hits_high);
    const auto hl = static_cast<double>(out.hits_low);
    out.test = detail::tolerant_contingency(
        {{hh, static_cast<double>(out.tokens_high) - hh}, {hl, static_cast<double>(out.tokens_low) - hl}});
    return out;
}

} // namespace surprise::analysis
