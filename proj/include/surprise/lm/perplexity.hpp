#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "surprise/error.hpp"

namespace surprise::lm {

/// exp of the mean negative natural-log probability of a token sequence.
/// Every entry must be finite and <= 0, so the result is >= 1.
inline double perplexity(std::span<const double> logprobs) {
    require(!logprobs.empty(), "perplexity of an empty sequence");
    // Neumaier summation keeps the mean exact for long runs of equal values.
    double sum = 0.0, carry = 0.0;
    for (const double lp : logprobs) {
        require(std::isfinite(lp), "non-finite log-probability");
        require(lp <= 0.0, "positive log-probability");
        const double t = sum + lp;
        carry += std::fabs(sum) >= std::fabs(lp) ? (sum - t) + lp : (lp - t) + sum;
        sum = t;
    }
    return std::exp(-(sum + carry) / static_cast<double>(logprobs.size()));
}

/// One (document, model) scoring: tokens with their natural-log probabilities.
struct ScoredDocument {
    std::string doc_id;
    std::string model_id;
    std::vector<std::string> tokens;
    std::vector<double> logprobs;
    double perplexity = 1.0;

    std::size_t token_count() const { return tokens.size(); }
};

} // namespace surprise::lm
