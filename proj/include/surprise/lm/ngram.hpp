#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "surprise/error.hpp"
#include "surprise/text.hpp"

namespace surprise::lm {

using TokenId = std::uint32_t;

struct NGramOptions {
    int order = 3;
    double discount = 0.75;
    /// Training tokens seen fewer times than this become <unk>.
    std::size_t min_count = 2;
};

/// Interpolated Kneser-Ney n-gram model with a single absolute discount.
///
/// The highest order uses raw counts; every lower order uses continuation
/// counts (number of distinct left extensions). The unigram level interpolates
/// with the uniform distribution over predictable tokens, so every token of the
/// vocabulary (including </s> and <unk>) has positive probability in every
/// context. <s> is context-only and never predicted.
class NGramModel {
public:
    static constexpr TokenId bos_id = 0;
    static constexpr TokenId eos_id = 1;
    static constexpr TokenId unk_id = 2;
    static constexpr std::string_view bos = "<s>";
    static constexpr std::string_view eos = "</s>";
    static constexpr std::string_view unk = "<unk>";

    /// Trains on raw texts tokenized with text::tokenize.
    static NGramModel train(const std::vector<std::string>& texts, const NGramOptions& options = {}) {
        std::vector<std::vector<std::string>> docs;
        docs.reserve(texts.size());
        for (const auto& t : texts) docs.push_back(text::tokenize(t));
        return train_tokens(docs, options);
    }

    static NGramModel train_tokens(const std::vector<std::vector<std::string>>& docs,
                                   const NGramOptions& options = {}) {
        require(options.order >= 1, "n-gram order must be at least 1");
        require(options.discount > 0.0 && options.discount < 1.0, "discount must lie in (0, 1)");
        std::size_t total_tokens = 0;
        for (const auto& d : docs) total_tokens += d.size();
        require(!docs.empty() && total_tokens > 0, "cannot train on an empty corpus");

        NGramModel model;
        model.order_ = options.order;
        model.discount_ = options.discount;
        model.min_count_ = options.min_count;

        std::map<std::string, std::size_t> freq;
        for (const auto& d : docs)
            for (const auto& tok : d) ++freq[tok];
        model.vocab_ = {std::string(bos), std::string(eos), std::string(unk)};
        for (const auto& [tok, n] : freq) {
            if (n >= options.min_count && tok != bos && tok != eos && tok != unk) {
                model.vocab_.push_back(tok);
            }
        }
        model.rebuild_lookup();

        model.levels_.assign(options.order, Level{});
        auto& top = model.levels_.back().counts;
        std::vector<TokenId> ids;
        for (const auto& d : docs) {
            ids.assign(options.order - 1, bos_id);
            for (const auto& tok : d) ids.push_back(model.id(tok));
            ids.push_back(eos_id);
            for (std::size_t end = options.order - 1; end < ids.size(); ++end) {
                ++top[make_key(std::span(ids).subspan(end + 1 - options.order, options.order))];
            }
        }
        model.derive_lower_orders();
        model.build_contexts();
        return model;
    }

    int order() const { return order_; }
    double discount() const { return discount_; }
    std::size_t min_count() const { return min_count_; }

    /// Number of token types including the three sentinels.
    std::size_t vocabulary_size() const { return vocab_.size(); }
    /// Tokens that can be predicted: everything except <s>.
    std::size_t predictable_size() const { return vocab_.size() - 1; }

    TokenId id(std::string_view token) const {
        const auto it = lookup_.find(std::string(token));
        return it == lookup_.end() ? unk_id : it->second;
    }

    const std::string& token(TokenId id) const { return vocab_.at(id); }

    /// P(word | context). Only the last order-1 ids of the context are used;
    /// a shorter context is treated as a lower-order history.
    double probability(std::span<const TokenId> context, TokenId word) const {
        double p = 1.0 / static_cast<double>(predictable_size());
        std::string key;
        for (int k = 1; k <= order_; ++k) {
            const std::size_t hist = static_cast<std::size_t>(k - 1);
            if (hist > context.size()) break;
            const auto& level = levels_[k - 1];
            key.clear();
            append_ids(key, context.subspan(context.size() - hist, hist));
            const auto ctx = level.contexts.find(key);
            if (ctx == level.contexts.end()) continue;
            append_id(key, word);
            const auto hit = level.counts.find(key);
            const double count = hit == level.counts.end() ? 0.0 : static_cast<double>(hit->second);
            const double total = static_cast<double>(ctx->second.total);
            const double types = static_cast<double>(ctx->second.types);
            p = (std::max(count - discount_, 0.0) + discount_ * types * p) / total;
        }
        return p;
    }

    /// Natural-log probability of each token given its predecessors, with the
    /// first token conditioned on order-1 <s> sentinels. </s> is not scored.
    std::vector<double> logprobs(const std::vector<std::string>& tokens) const {
        std::vector<TokenId> history(order_ > 1 ? order_ - 1 : 0, bos_id);
        history.reserve(history.size() + tokens.size());
        std::vector<double> out;
        out.reserve(tokens.size());
        for (const auto& tok : tokens) {
            const TokenId w = id(tok);
            const std::size_t hist = std::min<std::size_t>(history.size(), order_ - 1);
            out.push_back(std::log(probability(std::span(history).last(hist), w)));
            history.push_back(w);
        }
        return out;
    }

    /// Text serialization; load(save(m)) scores bit-identically to m.
    void save(std::ostream& out) const {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", discount_);
        out << "surprise-ngram 1\n"
            << "order " << order_ << '\n'
            << "discount " << buf << '\n'
            << "min_count " << min_count_ << '\n'
            << "vocab " << vocab_.size() << '\n';
        for (const auto& tok : vocab_) out << tok << '\n';
        for (int k = 1; k <= order_; ++k) {
            const auto& counts = levels_[k - 1].counts;
            std::vector<std::pair<std::vector<TokenId>, std::uint64_t>> rows;
            rows.reserve(counts.size());
            for (const auto& [key, n] : counts) rows.emplace_back(split_key(key), n);
            std::sort(rows.begin(), rows.end());
            out << "level " << k << ' ' << rows.size() << '\n';
            for (const auto& [ids, n] : rows) {
                for (const auto id : ids) out << id << ' ';
                out << n << '\n';
            }
        }
    }

    static NGramModel load(std::istream& in) {
        auto fail = [](const std::string& what) -> NGramModel {
            throw InvalidInput("bad n-gram model file: " + what);
        };
        std::string magic, word;
        int version = 0;
        if (!(in >> magic >> version) || magic != "surprise-ngram" || version != 1) return fail("header");
        NGramModel model;
        std::string discount_text;
        std::size_t vocab_size = 0;
        if (!(in >> word >> model.order_) || word != "order" || model.order_ < 1) return fail("order");
        if (!(in >> word >> discount_text) || word != "discount") return fail("discount");
        model.discount_ = std::strtod(discount_text.c_str(), nullptr);
        if (!(in >> word >> model.min_count_) || word != "min_count") return fail("min_count");
        if (!(in >> word >> vocab_size) || word != "vocab" || vocab_size < 3) return fail("vocab");
        model.vocab_.resize(vocab_size);
        for (auto& tok : model.vocab_)
            if (!(in >> tok)) return fail("vocabulary entry");
        model.rebuild_lookup();
        model.levels_.assign(model.order_, Level{});
        for (int k = 1; k <= model.order_; ++k) {
            int level = 0;
            std::size_t rows = 0;
            if (!(in >> word >> level >> rows) || word != "level" || level != k) return fail("level header");
            auto& counts = model.levels_[k - 1].counts;
            counts.reserve(rows);
            std::vector<TokenId> ids(k);
            for (std::size_t r = 0; r < rows; ++r) {
                std::uint64_t n = 0;
                for (auto& id : ids)
                    if (!(in >> id) || id >= vocab_size) return fail("n-gram row");
                if (!(in >> n)) return fail("n-gram count");
                counts.emplace(make_key(ids), n);
            }
        }
        model.build_contexts();
        return model;
    }

private:
    struct ContextStats {
        std::uint64_t total = 0;
        std::uint64_t types = 0;
    };
    struct Level {
        std::unordered_map<std::string, std::uint64_t> counts;
        std::unordered_map<std::string, ContextStats> contexts;
    };

    static void append_id(std::string& key, TokenId id) {
        char bytes[sizeof(TokenId)];
        std::memcpy(bytes, &id, sizeof id);
        key.append(bytes, sizeof bytes);
    }

    static void append_ids(std::string& key, std::span<const TokenId> ids) {
        for (const auto id : ids) append_id(key, id);
    }

    static std::string make_key(std::span<const TokenId> ids) {
        std::string key;
        key.reserve(ids.size() * sizeof(TokenId));
        append_ids(key, ids);
        return key;
    }

    static std::vector<TokenId> split_key(std::string_view key) {
        std::vector<TokenId> ids(key.size() / sizeof(TokenId));
        std::memcpy(ids.data(), key.data(), ids.size() * sizeof(TokenId));
        return ids;
    }

    void rebuild_lookup() {
        lookup_.clear();
        for (std::size_t i = 0; i < vocab_.size(); ++i) lookup_.emplace(vocab_[i], static_cast<TokenId>(i));
    }

    // Continuation count of a k-gram = number of distinct (k+1)-grams ending in it.
    void derive_lower_orders() {
        for (int k = order_ - 1; k >= 1; --k) {
            auto& lower = levels_[k - 1].counts;
            for (const auto& [key, _] : levels_[k].counts) ++lower[key.substr(sizeof(TokenId))];
        }
    }

    void build_contexts() {
        for (auto& level : levels_) {
            level.contexts.clear();
            for (const auto& [key, n] : level.counts) {
                auto& ctx = level.contexts[key.substr(0, key.size() - sizeof(TokenId))];
                ctx.total += n;
                ++ctx.types;
            }
        }
    }

    int order_ = 1;
    double discount_ = 0.75;
    std::size_t min_count_ = 2;
    std::vector<std::string> vocab_;
    std::unordered_map<std::string, TokenId> lookup_;
    std::vector<Level> levels_;
};

} // namespace surprise::lm
