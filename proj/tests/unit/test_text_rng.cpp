#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "surprise/rng.hpp"
#include "surprise/stats/descriptive.hpp"
#include "surprise/text.hpp"

namespace {

using surprise::Rng;
using Tokens = std::vector<std::string>;

TEST(Text, TokenizeSplitsPunctuationAndLowercases) {
    EXPECT_EQ(surprise::text::tokenize("The cat, SAT."), (Tokens{"the", "cat", ",", "sat", "."}));
    EXPECT_EQ(surprise::text::tokenize("  "), Tokens{});
    EXPECT_EQ(surprise::text::tokenize("co-op x2"), (Tokens{"co", "-", "op", "x2"}));
}

TEST(Text, WordsDropsPunctuation) {
    EXPECT_EQ(surprise::text::words("Maybe, good!"), (Tokens{"maybe", "good"}));
}

TEST(Text, HandlesUtf8) {
    EXPECT_EQ(surprise::text::tokenize("Ünïcode Straße"), (Tokens{"ünïcode", "straße"}));
    EXPECT_EQ(surprise::text::tokenize("α–β"), (Tokens{"α", "–", "β"}));
}

TEST(Text, TruncatedUtf8DoesNotCrash) {
    const std::string broken = std::string("ab") + static_cast<char>(0xE2);
    EXPECT_NO_THROW(surprise::text::tokenize(broken));
}

TEST(Text, DetokenizeRoundTripsTokens) {
    const Tokens t{"a", "b", ",", "c"};
    EXPECT_EQ(surprise::text::tokenize(surprise::text::detokenize(t)), t);
}

TEST(Rng, SameSeedSameStream) {
    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, DerivedSeedsDiffer) {
    EXPECT_NE(surprise::derive_seed(1, 0), surprise::derive_seed(1, 1));
    EXPECT_NE(surprise::derive_seed(1, 0), surprise::derive_seed(2, 0));
}

TEST(Rng, BelowStaysInRange) {
    Rng r(3);
    std::vector<int> seen(7, 0);
    for (int i = 0; i < 7000; ++i) ++seen[r.below(7)];
    for (const int c : seen) EXPECT_GT(c, 800);
}

TEST(Rng, DistributionMoments) {
    Rng r(11);
    const int n = 200000;
    std::vector<double> normal(n), gamma(n), poisson(n), negbin(n);
    for (int i = 0; i < n; ++i) {
        normal[i] = r.normal();
        gamma[i] = r.gamma(2.5, 2.0);
        poisson[i] = static_cast<double>(r.poisson(i % 2 ? 3.0 : 40.0));
        negbin[i] = static_cast<double>(r.negative_binomial(5.0, 0.5));
    }
    using surprise::stats::mean;
    using surprise::stats::variance;
    EXPECT_NEAR(mean(normal), 0.0, 0.01);
    EXPECT_NEAR(variance(normal), 1.0, 0.02);
    EXPECT_NEAR(mean(gamma), 5.0, 0.05);
    EXPECT_NEAR(variance(gamma), 10.0, 0.3);
    EXPECT_NEAR(mean(poisson), 21.5, 0.1);
    EXPECT_NEAR(mean(negbin), 5.0, 0.06);
    EXPECT_NEAR(variance(negbin), 5.0 + 0.5 * 25.0, 0.5);
}

} // namespace
