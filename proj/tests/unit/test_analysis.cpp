#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "surprise/analysis/interdisciplinary.hpp"
#include "surprise/analysis/profiles.hpp"
#include "surprise/analysis/review.hpp"
#include "surprise/analysis/venue.hpp"
#include "surprise/rng.hpp"

namespace {

using namespace surprise;
using namespace surprise::analysis;

std::string doc_id(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "p%05zu", i);
    return buf;
}

Scores ranked_scores(std::size_t n) {
    Scores s;
    for (std::size_t i = 0; i < n; ++i) s[doc_id(i)] = 1.0 + static_cast<double>(i);
    return s;
}

corpus::PaperRecord paper(std::string id, std::set<std::string> groups, std::vector<std::string> refs,
                          int year = 2023, std::string journal = "J") {
    corpus::PaperRecord p;
    p.doc_id = std::move(id);
    p.abstract = "text";
    p.field_groups = std::move(groups);
    p.reference_ids = std::move(refs);
    p.pub_date = corpus::Date{std::chrono::year{year}, std::chrono::month{6}, std::chrono::day{1}};
    p.journal_id = std::move(journal);
    return p;
}

TEST(Binning, SizesAreBalanced) {
    for (const auto& sz : quantile_bins(ranked_scores(100), 10).bin_sizes()) EXPECT_EQ(sz, 10u);
    const auto b = quantile_bins(ranked_scores(8005), 10);
    for (const auto sz : b.bin_sizes()) EXPECT_TRUE(sz == 800 || sz == 801) << sz;
    std::size_t prev = 0;
    for (const auto& m : b.members()) {
        EXPECT_GE(m.bin, prev);
        prev = m.bin;
    }
    EXPECT_THROW(quantile_bins(ranked_scores(5), 10), InvalidInput);
    EXPECT_THROW(quantile_bins(ranked_scores(5), 1), InvalidInput);
}

TEST(Binning, TiesFollowDocIdOrder) {
    Scores s;
    for (std::size_t i = 0; i < 20; ++i) s[doc_id(19 - i)] = 7.0;
    const auto b = quantile_bins(s, 4);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(*b.bin_of(doc_id(i)), i / 5);
    EXPECT_FALSE(b.bin_of("nope"));
}

TEST(ExtremeShare, ConstantAndMedianFlags) {
    const auto b = quantile_bins(ranked_scores(100), 10);
    std::unordered_map<std::string, bool> all, upper;
    for (std::size_t i = 0; i < 100; ++i) {
        all[doc_id(i)] = true;
        upper[doc_id(i)] = i >= 50;
    }
    const auto c = extreme_share_profile(b, all);
    for (const auto& bin : c.bins) EXPECT_EQ(bin.proportion, 1.0);
    EXPECT_EQ(c.top_vs_bottom.test.statistic, 0.0);
    EXPECT_EQ(c.top_vs_bottom.test.p_value, 1.0);
    EXPECT_FALSE(c.logistic);

    const auto m = extreme_share_profile(b, upper);
    for (const auto& bin : m.bins) EXPECT_EQ(bin.proportion, bin.bin >= 5 ? 1.0 : 0.0);
    const auto direct = stats::contingency_test({{30, 0}, {0, 30}});
    EXPECT_DOUBLE_EQ(m.top_vs_bottom.test.statistic, direct.test.statistic);
    EXPECT_FALSE(m.logistic);  // perfectly separated
    EXPECT_FALSE(m.logistic_note.empty());
}

TEST(ExtremeShare, FixedEffectsAbsorbConfounding) {
    // The flag depends only on the level, and the score is higher in level "b".
    Rng rng(22);
    Scores s;
    std::unordered_map<std::string, bool> flag;
    FixedEffects levels;
    for (std::size_t i = 0; i < 6000; ++i) {
        const bool in_b = i % 2 == 1;
        s[doc_id(i)] = std::exp((in_b ? 2.5 : 1.5) + 0.5 * rng.normal());
        flag[doc_id(i)] = rng.uniform() < (in_b ? 0.4 : 0.1);
        levels[doc_id(i)] = in_b ? "b" : "a";
    }
    const auto b = quantile_bins(s, 10);
    const auto plain = extreme_share_profile(b, flag);
    const auto adjusted = extreme_share_profile(b, flag, 3, &levels);
    ASSERT_TRUE(plain.logistic && adjusted.logistic);
    EXPECT_LT(plain.logistic->p_values[1], 1e-10);
    EXPECT_EQ(adjusted.logistic->names, (std::vector<std::string>{"const", "log_ppl", "fe:b"}));
    EXPECT_LT(std::fabs(adjusted.logistic->coefficients[1]), 3.0 * adjusted.logistic->standard_errors[1]);
    EXPECT_GT(adjusted.logistic->coefficients[2], 0.0);
}

TEST(ExtremeShare, RecoversPlantedOddsRatio) {
    Rng rng(21);
    Scores s;
    std::unordered_map<std::string, bool> flag;
    for (std::size_t i = 0; i < 20000; ++i) {
        const double lp = 2.0 + 0.6 * rng.normal();
        s[doc_id(i)] = std::exp(lp);
        const double p = 1.0 / (1.0 + std::exp(-(-2.0 + std::log(2.0) * lp)));
        flag[doc_id(i)] = rng.uniform() < p;
    }
    const auto prof = extreme_share_profile(quantile_bins(s, 10), flag);
    ASSERT_TRUE(prof.logistic);
    const auto& fit = *prof.logistic;
    EXPECT_LT(std::fabs(fit.coefficients[1] - std::log(2.0)), 3.0 * fit.standard_errors[1]);
    EXPECT_LT(prof.top_vs_bottom.test.p_value, 1e-6);
    for (const auto& bin : prof.bins) EXPECT_TRUE(bin.proportion >= 0.0 && bin.proportion <= 1.0);
}

TEST(Dispersion, ConstantValues) {
    const auto b = quantile_bins(ranked_scores(200), 10);
    std::unordered_map<std::string, double> v;
    for (std::size_t i = 0; i < 200; ++i) v[doc_id(i)] = 4.0;
    const auto prof = dispersion_profile(b, v, 20);
    for (const auto& bin : prof.bins) EXPECT_EQ(bin.sd, 0.0);
    ASSERT_TRUE(prof.white);
    EXPECT_EQ(prof.white->statistic, 0.0);
    EXPECT_FALSE(prof.binned_variance);
}

TEST(Dispersion, SpreadGrowingWithRankIsDetected) {
    Rng rng(5);
    const std::size_t n = 4000;
    const auto s = ranked_scores(n);
    std::unordered_map<std::string, double> v;
    for (std::size_t i = 0; i < n; ++i) v[doc_id(i)] = 5.0 + (1.0 + 4.0 * i / n) * rng.normal();
    const auto prof = dispersion_profile(quantile_bins(s, 10), v, 20);
    ASSERT_TRUE(prof.binned_variance);
    EXPECT_GT(prof.binned_variance->coefficients[1], 0.0);
    EXPECT_LT(prof.binned_variance->p_values[1], 0.01);
    EXPECT_LT(prof.white->p_value, 0.01);
    EXPECT_LT(prof.levene->p_value, 0.01);
    EXPECT_LT(prof.fligner->p_value, 0.01);
    EXPECT_GT(prof.bins.back().sd, prof.bins.front().sd);
}

TEST(Dispersion, SmallVarianceBinsAreOmitted) {
    const auto s = ranked_scores(30);
    std::unordered_map<std::string, double> v;
    for (std::size_t i = 0; i < 30; ++i) v[doc_id(i)] = i < 10 ? 1.0 : static_cast<double>(i % 3);
    std::size_t omitted = 0;
    const auto fit = binned_variance_regression(s, v, 10, &omitted);
    EXPECT_EQ(omitted, 3u);
    ASSERT_TRUE(fit);
    EXPECT_EQ(fit->n, 7u);
}

TEST(Review, MetricsAndDelay) {
    corpus::ReviewBundle r;
    r.doc_id = "x";
    r.ratings = {3, 5, 8};
    r.confidences = {2, 4};
    r.received_date = corpus::parse_date("2023-01-01");
    r.accepted_date = corpus::parse_date("2023-03-02");
    const auto m = review_metrics(r);
    EXPECT_EQ(*m.disparity, 5.0);
    EXPECT_DOUBLE_EQ(*m.mean_rating, 16.0 / 3.0);
    EXPECT_EQ(*m.mean_confidence, 3.0);
    EXPECT_EQ(*m.delay_days, 60);
    r.ratings = {6};
    r.accepted_date.reset();
    const auto single = review_metrics(r);
    EXPECT_EQ(*single.disparity, 0.0);
    EXPECT_FALSE(single.delay_days);
}

TEST(Review, PlantedDisparityTrend) {
    Rng rng(8);
    const std::size_t n = 1000;
    const auto s = ranked_scores(n);
    std::vector<corpus::ReviewBundle> reviews;
    for (std::size_t i = 0; i < n; ++i) {
        corpus::ReviewBundle r;
        r.doc_id = doc_id(i);
        const double spread = 0.5 + 2.0 * i / n;
        for (int k = 0; k < 4; ++k) r.ratings.push_back(5.0 + spread * rng.normal());
        reviews.push_back(r);
    }
    corpus::ReviewBundle stray;
    stray.doc_id = "unscored";
    reviews.push_back(stray);
    const auto rv = review_variability(reviews, quantile_bins(s, 10));
    EXPECT_EQ(rv.unmatched, 1u);
    EXPECT_EQ(rv.papers.size(), n);
    ASSERT_TRUE(rv.disparity_welch);
    EXPECT_GT(rv.disparity_welch->statistic, 0.0);
    EXPECT_LT(rv.disparity_welch->p_value, 0.05);
    EXPECT_FALSE(rv.confidence_welch);
}

TEST(Interdisciplinary, Classification) {
    EXPECT_EQ(interdisciplinary_classify({"Physics"}, {"Physics"}), Linkage::intra);
    EXPECT_EQ(interdisciplinary_classify({"Physics"}, {"Chemistry", "Physics"}), Linkage::inter);
    EXPECT_EQ(interdisciplinary_classify({"Chemistry", "Physics"}, {"Chemistry"}), Linkage::intra);
    EXPECT_EQ(interdisciplinary_classify({"Physics"}, {}), Linkage::intra);
    EXPECT_THROW(interdisciplinary_classify({}, {"Physics"}), InvalidInput);
}

TEST(Interdisciplinary, FivePaperManualCount) {
    corpus::Corpus c;
    c.add(paper("P1", {"Phys"}, {"P2", "P3", "P4", "X"}));
    c.add(paper("P2", {"Phys"}, {"P3"}));
    c.add(paper("P3", {"Chem", "Phys"}, {"P2", "P4", "P2"}));
    c.add(paper("P4", {"Bio"}, {"P5"}));
    c.add(paper("P5", {"Bio"}, {}));
    const Scores s{{"P1", 10}, {"P2", 20}, {"P3", 30}, {"P4", 40}, {"P5", 50}};
    const auto prof = interdisciplinarity_profile(c, corpus::resolve_citations(c), quantile_bins(s, 5));
    const std::vector<std::array<std::size_t, 4>> expected{
        // refs inter, refs intra, cites inter, cites intra
        {2, 1, 0, 0}, {1, 0, 1, 1}, {1, 1, 0, 2}, {0, 1, 2, 0}, {0, 0, 0, 1}};
    for (std::size_t b = 0; b < 5; ++b) {
        const auto& bin = prof.bins[b];
        EXPECT_EQ(bin.references.inter, expected[b][0]) << b;
        EXPECT_EQ(bin.references.intra, expected[b][1]) << b;
        EXPECT_EQ(bin.citations.inter, expected[b][2]) << b;
        EXPECT_EQ(bin.citations.intra, expected[b][3]) << b;
    }
    EXPECT_EQ(prof.unusable_links, 1u);
    EXPECT_EQ(*prof.bins[0].references.ratio(), 2.0);
    EXPECT_FALSE(prof.bins[1].references.ratio());
    EXPECT_EQ(prof.zero_intra_offsets, 1u);
}

TEST(Interdisciplinary, UngroupedLinkCountsAsIntra) {
    corpus::Corpus c;
    c.add(paper("P1", {"Phys"}, {"P2", "P3"}));
    c.add(paper("P2", {}, {}));
    c.add(paper("P3", {"Chem"}, {}));
    Scores s{{"P1", 1.0}, {"P2", 2.0}, {"P3", 3.0}};
    const auto prof = interdisciplinarity_profile(c, corpus::resolve_citations(c), quantile_bins(s, 3));
    EXPECT_EQ(prof.bins[0].references.intra, 1u);
    EXPECT_EQ(prof.bins[0].references.inter, 1u);
    EXPECT_EQ(prof.ungrouped_links, 1u);
    EXPECT_EQ(prof.unusable_links, 0u);
    EXPECT_EQ(prof.ungrouped_focal, 1u);
}

TEST(Interdisciplinary, SameGroupsGiveZeroRatio) {
    corpus::Corpus c;
    Scores s;
    for (std::size_t i = 0; i < 40; ++i) {
        std::vector<std::string> refs;
        if (i > 0) refs.push_back(doc_id(i - 1));
        if (i > 1) refs.push_back(doc_id(i - 2));
        c.add(paper(doc_id(i), {"A", "B"}, refs));
        s[doc_id(i)] = 1.0 + i;
    }
    const auto prof = interdisciplinarity_profile(c, corpus::resolve_citations(c), quantile_bins(s, 4));
    for (const auto& bin : prof.bins) EXPECT_EQ(*bin.references.ratio(), 0.0);
    EXPECT_FALSE(prof.references_fit);

    corpus::Corpus isolated;
    isolated.add(paper("a", {"A"}, {}));
    isolated.add(paper("b", {"A"}, {}));
    EXPECT_THROW(interdisciplinarity_profile(isolated, corpus::resolve_citations(isolated),
                                             quantile_bins({{"a", 1.0}, {"b", 2.0}}, 2)),
                 InvalidInput);
}

TEST(Interdisciplinary, PlantedRateGivesIncidenceRatioAboveOne) {
    Rng rng(13);
    corpus::Corpus c;
    for (std::size_t i = 0; i < 200; ++i) c.add(paper("a" + std::to_string(i), {"A"}, {}));
    for (std::size_t i = 0; i < 200; ++i) c.add(paper("b" + std::to_string(i), {"B"}, {}));
    Scores s;
    for (std::size_t i = 0; i < 1500; ++i) {
        const double lp = 1.0 + 2.0 * rng.uniform();
        const std::size_t intra = 1 + rng.below(6);
        const auto inter = rng.poisson(static_cast<double>(intra) * 0.3 * std::exp(0.8 * (lp - 2.0)));
        std::vector<std::string> refs;
        for (std::size_t k = 0; k < intra; ++k) refs.push_back("a" + std::to_string(rng.below(200)));
        for (std::size_t k = 0; k < inter; ++k) refs.push_back("b" + std::to_string(rng.below(200)));
        c.add(paper(doc_id(i), {"A"}, refs));
        s[doc_id(i)] = std::exp(lp);
    }
    const auto prof = interdisciplinarity_profile(c, corpus::resolve_citations(c), quantile_bins(s, 10));
    ASSERT_TRUE(prof.references_fit) << prof.references_note;
    const auto& irr = *prof.references_fit->exponentiated;
    EXPECT_GT(irr[1], 1.0);
    EXPECT_LT(prof.references_fit->p_values[1], 0.01);
    EXPECT_LT(std::fabs(prof.references_fit->coefficients[1] - 0.8), 3.0 * prof.references_fit->standard_errors[1]);
}

TEST(ReferenceAge, ManualMeans) {
    corpus::Corpus c;
    c.add(paper("F1", {"A"}, {"R1", "R2", "missing", "R1"}, 2024, "J1"));
    c.add(paper("F2", {"A"}, {"R1"}, 2023, "J1"));
    c.add(paper("R1", {"A"}, {}, 2020, "J2"));
    c.add(paper("R2", {"A"}, {}, 2022, "J3"));
    corpus::JifTable jif;
    jif.journals["J2"] = {"J2", 4.0, 8, 2};
    const auto prof = reference_age_profile(c, corpus::resolve_citations(c), quantile_bins({{"F1", 5}, {"F2", 9}}, 2),
                                            &jif);
    EXPECT_EQ(prof.unresolved, 1u);
    EXPECT_EQ(prof.bins[0].references, 2u);
    EXPECT_DOUBLE_EQ(prof.bins[0].mean_age, 3.0);
    EXPECT_DOUBLE_EQ(prof.bins[0].mean_popularity, 1.5);
    EXPECT_EQ(prof.bins[0].with_jif, 1u);
    EXPECT_DOUBLE_EQ(prof.bins[0].mean_jif, 4.0);
    EXPECT_DOUBLE_EQ(prof.bins[1].mean_age, 3.0);
    EXPECT_DOUBLE_EQ(prof.bins[1].mean_popularity, 2.0);
}

TEST(Venue, ExtremeJournalsUseCeiling) {
    corpus::JifTable t;
    for (int j = 0; j < 30; ++j) {
        const std::string id = "J" + std::to_string(10 + j);
        t.journals[id] = {id, static_cast<double>(j % 10), 0, 1};
    }
    const auto e = extreme_journals(t, 0.05);  // ceil(1.5) = 2 per side
    EXPECT_EQ(e.bottom, (std::set<std::string>{"J10", "J20"}));
    EXPECT_EQ(e.top, (std::set<std::string>{"J39", "J29"}));
}

TEST(JifCitation, ManualBinMeansAndPlantedCurvature) {
    Scores s;
    std::unordered_map<std::string, double> jif, cites;
    for (std::size_t i = 0; i < 30; ++i) {
        s[doc_id(i)] = 1.0 + i;
        if (i % 10 != 9) jif[doc_id(i)] = static_cast<double>(i % 7);
        cites[doc_id(i)] = static_cast<double>((i * 3) % 11);
    }
    const auto prof = jif_citation_by_bin(quantile_bins(s, 3), jif, cites);
    ASSERT_EQ(prof.bins.size(), 3u);
    for (std::size_t b = 0; b < 3; ++b) {
        double sj = 0, sc = 0;
        for (std::size_t i = 10 * b; i < 10 * b + 9; ++i) {
            sj += static_cast<double>(i % 7);
            sc += static_cast<double>((i * 3) % 11);
        }
        EXPECT_EQ(prof.bins[b].n, 9u);
        EXPECT_DOUBLE_EQ(prof.bins[b].mean_jif, sj / 9.0);
        EXPECT_DOUBLE_EQ(prof.bins[b].mean_citations, sc / 9.0);
        EXPECT_EQ(prof.bins[b].lowess.size(), 9u);
    }

    Rng rng(3);
    Scores big;
    std::unordered_map<std::string, double> c2;
    for (std::size_t i = 0; i < 3000; ++i) {
        const double lp = 1.0 + 2.0 * rng.uniform();
        big[doc_id(i)] = std::exp(lp);
        c2[doc_id(i)] = static_cast<double>(rng.poisson(std::exp(2.0 - 1.5 * (lp - 2.0) * (lp - 2.0))));
    }
    std::unordered_map<std::string, double> none;
    const auto curved = jif_citation_by_bin(quantile_bins(big, 10), none, c2);
    EXPECT_EQ(curved.omitted_bins, 10u);
    ASSERT_TRUE(curved.quadratic);
    EXPECT_LT(curved.quadratic->coefficients[2], 0.0);
    EXPECT_LT(curved.quadratic->p_values[2], 0.01);
}

TEST(Groups, SharesAndPlantedLabel) {
    Rng rng(44);
    Scores s;
    std::unordered_map<std::string, std::vector<std::string>> labels;
    for (std::size_t i = 0; i < 10000; ++i) {
        const double lp = 2.0 + 0.5 * rng.normal();
        s[doc_id(i)] = std::exp(lp);
        auto& l = labels[doc_id(i)];
        if (rng.uniform() < 0.3) l.push_back("random");
        if (rng.uniform() < 1.0 / (1.0 + std::exp(-(-4.0 + std::log(2.5) * lp)))) l.push_back("planted");
    }
    labels[doc_id(0)].push_back("lonely");
    const auto b = quantile_bins(s, 10);
    for (const auto& m : b.members()) {
        if (m.bin == 9) labels[m.doc_id].push_back("top");
    }
    const auto g = group_profiles(b, labels);
    EXPECT_EQ(g.skipped, std::vector<std::string>{"lonely"});
    for (const auto& p : g.labels) {
        EXPECT_NEAR(std::accumulate(p.shares.begin(), p.shares.end(), 0.0), 1.0, 1e-12);
        if (p.label == "top") {
            EXPECT_EQ(p.shares[9], 1.0);
            EXPECT_EQ(p.shares[0], 0.0);
        } else if (p.label == "random") {
            for (const double sh : p.shares) EXPECT_NEAR(sh, 0.1, 0.025);
            EXPECT_LT(std::fabs(p.logistic->coefficients[1]), 3.0 * p.logistic->standard_errors[1]);
        } else if (p.label == "planted") {
            EXPECT_LT(std::fabs(p.logistic->coefficients[1] - std::log(2.5)), 3.0 * p.logistic->standard_errors[1]);
            EXPECT_LT(p.mann_whitney->p_value, 0.01);
        }
    }
}

} // namespace
