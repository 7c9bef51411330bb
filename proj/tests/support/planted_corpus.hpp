#pragma once

// Synthetic corpus with known effects. Background papers (2021-2022) train the
// model and seed journal impact factors; focal papers (2023) carry a latent
// injection rate rho that drives every planted effect:
//   - a fraction rho of abstract tokens is replaced by rare tokens,
//   - the chance of publishing in a top- or bottom-JIF journal grows with rho,
//   - review rating spread grows with rho,
//   - the expected inter/intra reference ratio grows with rho.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "surprise/corpus/ingest.hpp"
#include "surprise/corpus/types.hpp"
#include "surprise/rng.hpp"

namespace surprise::testing {

struct PlantedOptions {
    std::size_t papers = 10000;
    double background_share = 0.4;
    std::size_t journals = 60;
    std::size_t groups = 6;
    std::size_t common_words = 300;
    std::size_t rare_words = 20000;
    std::size_t abstract_tokens = 40;
    double max_injection = 0.3;
    std::uint64_t seed = 1;
};

struct PlantedCorpus {
    std::vector<corpus::PaperRecord> papers;
    std::vector<corpus::ReviewBundle> reviews;
    /// Injection rate of each focal paper.
    std::unordered_map<std::string, double> injection;
    /// Journals built to have the highest and lowest impact factors.
    std::vector<std::string> top_journals, bottom_journals;
};

namespace detail {

inline std::string padded(const char* prefix, std::size_t i, int width) {
    std::string digits = std::to_string(i);
    if (static_cast<int>(digits.size()) < width) digits.insert(0, width - digits.size(), '0');
    return prefix + digits;
}

inline corpus::Date date(int y, unsigned m, unsigned d) {
    return corpus::Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

/// Index drawn with probability proportional to weights, given their running sums.
inline std::size_t weighted_pick(Rng& rng, const std::vector<double>& cumulative) {
    const double u = rng.uniform() * cumulative.back();
    return static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
}

} // namespace detail

inline PlantedCorpus make_planted_corpus(const PlantedOptions& opt = {}) {
    Rng rng(opt.seed);
    PlantedCorpus out;

    // Sparse first-order chain over common words: each word has a few likely successors.
    std::vector<std::string> words;
    for (std::size_t i = 0; i < opt.common_words; ++i) words.push_back(detail::padded("w", i, 3));
    std::vector<std::vector<std::size_t>> successors(opt.common_words);
    for (auto& s : successors) {
        for (int k = 0; k < 4; ++k) s.push_back(rng.below(opt.common_words));
    }
    auto abstract = [&](double rho) {
        std::string text;
        std::size_t w = rng.below(opt.common_words);
        for (std::size_t t = 0; t < opt.abstract_tokens; ++t) {
            if (t) text += ' ';
            if (rng.uniform() < rho) {
                text += detail::padded("zq", rng.below(opt.rare_words), 5);
            } else {
                text += words[w];
            }
            w = rng.uniform() < 0.9 ? successors[w][rng.below(4)] : rng.below(opt.common_words);
        }
        return text;
    };

    // Journal attractiveness sets how often its items are cited, hence its JIF.
    const std::size_t extremes = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.05 * opt.journals)));
    std::vector<std::string> journals;
    std::vector<double> appeal;
    for (std::size_t j = 0; j < opt.journals; ++j) {
        journals.push_back(detail::padded("J", j, 3));
        appeal.push_back(j < extremes ? 10.0 : j >= opt.journals - extremes ? 0.1 : 1.0 + 0.05 * (j % 7));
    }
    for (std::size_t j = 0; j < extremes; ++j) {
        out.top_journals.push_back(journals[j]);
        out.bottom_journals.push_back(journals[opt.journals - 1 - j]);
    }
    auto group_of = [&](std::size_t j) { return detail::padded("G", j % opt.groups, 1); };

    const auto background = static_cast<std::size_t>(opt.background_share * static_cast<double>(opt.papers));
    std::vector<std::vector<std::string>> by_group(opt.groups);
    std::vector<std::vector<double>> cumulative(opt.groups);
    for (std::size_t i = 0; i < background; ++i) {
        corpus::PaperRecord p;
        p.doc_id = detail::padded("B", i, 5);
        p.title = "Background study " + std::to_string(i);
        p.abstract = abstract(0.0);
        const std::size_t j = i % opt.journals;
        p.journal_id = journals[j];
        p.pub_date = detail::date(2021 + static_cast<int>(rng.below(2)), 1 + rng.below(12), 1 + rng.below(28));
        p.field_groups = {group_of(j)};
        const std::size_t g = j % opt.groups;
        by_group[g].push_back(p.doc_id);
        cumulative[g].push_back((cumulative[g].empty() ? 0.0 : cumulative[g].back()) + appeal[j]);
        out.papers.push_back(std::move(p));
    }

    std::vector<std::size_t> middle;
    for (std::size_t j = extremes; j + extremes < opt.journals; ++j) middle.push_back(j);
    for (std::size_t i = background; i < opt.papers; ++i) {
        const double rho = opt.max_injection * rng.uniform();
        corpus::PaperRecord p;
        p.doc_id = detail::padded("F", i - background, 5);
        p.title = "Focal study " + std::to_string(i - background);
        p.abstract = abstract(rho);
        const double extreme_chance = 0.02 + 0.6 * rho;
        const double u = rng.uniform();
        std::size_t j;
        if (u < extreme_chance) {
            j = rng.below(extremes);
        } else if (u < 2.0 * extreme_chance) {
            j = opt.journals - 1 - rng.below(extremes);
        } else {
            j = middle[rng.below(middle.size())];
        }
        p.journal_id = journals[j];
        p.pub_date = detail::date(2023, 1 + rng.below(12), 1 + rng.below(28));
        p.doc_type = rng.uniform() < 0.05 ? corpus::DocType::review : corpus::DocType::research;
        const std::size_t g = j % opt.groups;
        p.field_groups = {group_of(j)};
        if (rng.uniform() < 0.3) p.funders.insert("AGENCY_A");
        if (rng.uniform() < 0.05 + rho) p.funders.insert("AGENCY_B");

        const std::size_t intra = 2 + rng.below(6);
        const auto inter = rng.poisson(static_cast<double>(intra) * (0.05 + 1.5 * rho));
        for (std::size_t k = 0; k < intra; ++k) p.reference_ids.push_back(by_group[g][detail::weighted_pick(rng, cumulative[g])]);
        for (std::size_t k = 0; k < inter; ++k) {
            const std::size_t other = (g + 1 + rng.below(opt.groups - 1)) % opt.groups;
            p.reference_ids.push_back(by_group[other][detail::weighted_pick(rng, cumulative[other])]);
        }

        corpus::ReviewBundle r;
        r.doc_id = p.doc_id;
        const double spread = 0.6 + 6.0 * rho;
        const double quality = 5.5 + 0.8 * rng.normal();
        const std::size_t reviewers = 3 + rng.below(3);
        for (std::size_t k = 0; k < reviewers; ++k) {
            r.ratings.push_back(std::clamp(std::round(quality + spread * rng.normal()), 1.0, 10.0));
            r.confidences.push_back(std::clamp(std::round(3.8 - 3.0 * rho + 0.8 * rng.normal()), 1.0, 5.0));
            r.comments.push_back(rng.uniform() < 0.1 + rho ? "perhaps the claim might hold but the method is new"
                                                          : "the method is clear and the results are solid");
        }
        r.received_date = detail::date(2022, 1 + rng.below(12), 1 + rng.below(28));
        const auto delay = static_cast<int>(30 + rng.exponential() * 60.0 * (1.0 + 3.0 * rho));
        r.accepted_date = corpus::Date{std::chrono::sys_days{*r.received_date} + std::chrono::days{delay}};
        out.reviews.push_back(std::move(r));
        out.injection[p.doc_id] = rho;
        out.papers.push_back(std::move(p));
    }
    return out;
}

/// Writes papers.jsonl and reviews.jsonl into `dir`.
inline void write_planted_corpus(const PlantedCorpus& planted, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    corpus::Corpus c;
    for (const auto& p : planted.papers) c.add(p);
    std::ofstream papers(dir / "papers.jsonl", std::ios::binary);
    corpus::write_papers(papers, c);
    std::ofstream reviews(dir / "reviews.jsonl", std::ios::binary);
    corpus::write_reviews(reviews, planted.reviews);
}

} // namespace surprise::testing
