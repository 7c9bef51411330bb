#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "support/toy_corpus.hpp"
#include "surprise/lm/stability.hpp"

namespace {

using namespace surprise;
using lm::NGramModel;
using lm::SynonymLexicon;

using surprise::testing::toy_lexicon;
using surprise::testing::toy_model;
using surprise::testing::toy_sample;

corpus::PaperRecord paper(std::string id, std::string abstract) { return surprise::testing::toy_paper(std::move(id), std::move(abstract)); }

TEST(Synonyms, ParseBuildsSymmetricGroups) {
    const auto lex = toy_lexicon();
    ASSERT_NE(lex.alternatives("big"), nullptr);
    EXPECT_EQ(*lex.alternatives("big"), (std::vector<std::string>{"large", "huge"}));
    EXPECT_EQ(*lex.alternatives("rapid"), (std::vector<std::string>{"quick", "fast"}));
    EXPECT_EQ(lex.alternatives("cell"), nullptr);
    std::istringstream lonely("alone\n\n");
    EXPECT_TRUE(SynonymLexicon::parse(lonely).empty());
}

TEST(Stability, EmptyLexiconChangesNothing) {
    const auto curve = lm::synonym_stability(toy_model(), toy_sample(), SynonymLexicon{}, 3, 4, 1);
    EXPECT_TRUE(curve.trials.empty());
    EXPECT_EQ(curve.skipped, toy_sample().size() * 4);
    for (const double d : curve.mean_abs_delta) EXPECT_EQ(d, 0.0);
    EXPECT_FALSE(curve.quadratic);
}

TEST(Stability, InterchangeableTwinsGiveZeroDelta) {
    const auto model = NGramModel::train(surprise::testing::twin_texts(), {.order = 3, .discount = 0.75, .min_count = 1});
    SynonymLexicon lex;
    lex.add_group({"alpha", "omega"});
    const auto curve = lm::synonym_stability(model, {paper("t", "we saw an alpha result in the data .")}, lex, 2, 5, 9);
    ASSERT_EQ(curve.trials.size(), 10u);
    for (const auto& t : curve.trials) EXPECT_LT(t.abs_delta, 1e-12);
}

TEST(Stability, TrialsMatchBruteForceRecomputation) {
    const auto model = toy_model();
    const auto sample = toy_sample();
    const auto lex = toy_lexicon();
    const auto curve = lm::synonym_stability(model, sample, lex, 3, 4, 2024);
    EXPECT_EQ(curve.skipped, 4u);  // d6 has no covered words
    std::vector<double> sums(3, 0.0);
    std::vector<std::size_t> counts(3, 0);
    for (const auto& t : curve.trials) {
        const auto tokens = text::tokenize(sample[t.doc_index].abstract);
        std::size_t covered = 0;
        for (const auto& tok : tokens) covered += lex.alternatives(tok) != nullptr;
        ASSERT_EQ(t.positions.size(), std::min<std::size_t>(t.k, covered));
        EXPECT_EQ(std::set<std::size_t>(t.positions.begin(), t.positions.end()).size(), t.positions.size());
        auto perturbed = tokens;
        for (std::size_t i = 0; i < t.positions.size(); ++i) {
            const auto* alts = lex.alternatives(tokens[t.positions[i]]);
            ASSERT_NE(alts, nullptr);
            EXPECT_NE(std::find(alts->begin(), alts->end(), t.replacements[i]), alts->end());
            perturbed[t.positions[i]] = t.replacements[i];
        }
        const double before = lm::perplexity(model.logprobs(tokens));
        const double after = lm::perplexity(model.logprobs(perturbed));
        EXPECT_DOUBLE_EQ(t.original_perplexity, before);
        EXPECT_DOUBLE_EQ(t.abs_delta, std::fabs(after - before));
        sums[t.k - 1] += t.abs_delta;
        ++counts[t.k - 1];
    }
    for (int k = 1; k <= 3; ++k) {
        EXPECT_EQ(curve.observations[k - 1], 9u * 4u);
        EXPECT_NEAR(curve.mean_abs_delta[k - 1], sums[k - 1] / counts[k - 1], 1e-12);
    }
    ASSERT_TRUE(curve.quadratic);
    EXPECT_EQ(curve.quadratic->names, (std::vector<std::string>{"const", "k", "k2"}));
}

TEST(Stability, DeterministicForFixedSeed) {
    const auto model = toy_model();
    const auto a = lm::synonym_stability(model, toy_sample(), toy_lexicon(), 3, 3, 5);
    const auto b = lm::synonym_stability(model, toy_sample(), toy_lexicon(), 3, 3, 5);
    const auto c = lm::synonym_stability(model, toy_sample(), toy_lexicon(), 3, 3, 6);
    EXPECT_EQ(a.mean_abs_delta, b.mean_abs_delta);
    bool differs = false;
    for (std::size_t i = 0; i < a.trials.size(); ++i) differs = differs || a.trials[i].positions != c.trials[i].positions;
    EXPECT_TRUE(differs);
}

} // namespace
