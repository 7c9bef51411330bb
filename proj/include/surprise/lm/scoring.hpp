#pragma once

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "surprise/corpus/ingest.hpp"
#include "surprise/corpus/types.hpp"
#include "surprise/lm/ngram.hpp"
#include "surprise/lm/perplexity.hpp"
#include "surprise/text.hpp"

namespace surprise::lm {

/// Scores the abstract of `doc` under the built-in n-gram backend.
inline ScoredDocument score_document(const NGramModel& model, const corpus::PaperRecord& doc,
                                     const std::string& model_id = "ngram") {
    ScoredDocument scored;
    scored.doc_id = doc.doc_id;
    scored.model_id = model_id;
    scored.tokens = text::tokenize(doc.abstract);
    if (scored.tokens.empty()) throw InvalidInput("unscoreable document: " + doc.doc_id);
    scored.logprobs = model.logprobs(scored.tokens);
    scored.perplexity = perplexity(scored.logprobs);
    return scored;
}

/// Externally produced per-token scores for one or more models, keyed by
/// (model_id, doc_id).
class ImportedScores {
public:
    void add(ScoredDocument doc) {
        auto key = std::make_pair(doc.model_id, doc.doc_id);
        docs_.insert_or_assign(std::move(key), std::move(doc));
    }

    const ScoredDocument* find(const std::string& model_id, const std::string& doc_id) const {
        const auto it = docs_.find({model_id, doc_id});
        return it == docs_.end() ? nullptr : &it->second;
    }

    std::size_t size() const { return docs_.size(); }

private:
    std::map<std::pair<std::string, std::string>, ScoredDocument> docs_;
};

/// Looks up the imported scores of `doc` for `model_id`.
inline ScoredDocument score_document(const ImportedScores& scores, const corpus::PaperRecord& doc,
                                     const std::string& model_id) {
    if (doc.abstract.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw InvalidInput("unscoreable document: " + doc.doc_id);
    }
    const auto* found = scores.find(model_id, doc.doc_id);
    if (!found) throw InvalidInput("no imported scores for " + doc.doc_id + " under " + model_id);
    return *found;
}

namespace reason {
inline constexpr const char* length_mismatch = "tokens/logprobs length mismatch";
inline constexpr const char* positive_logprob = "positive logprob";
inline constexpr const char* non_finite = "non-finite logprob";
inline constexpr const char* empty_sequence = "empty token sequence";
} // namespace reason

struct LogprobImport {
    std::vector<ScoredDocument> docs;
    corpus::IngestReport report;
};

/// Reads logprobs.jsonl. Perplexity is always recomputed from the logprobs;
/// any perplexity field present in the file is ignored.
inline LogprobImport import_token_logprobs(std::istream& in) {
    using nlohmann::json;
    LogprobImport result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        ++result.report.lines;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error&) {
            result.report.reject(line_no, corpus::reason::malformed, "invalid JSON");
            continue;
        }
        auto is_str = [&](const char* key) { return obj.contains(key) && obj[key].is_string(); };
        auto is_arr = [&](const char* key) { return obj.contains(key) && obj[key].is_array(); };
        if (!obj.is_object() || !is_str("doc_id") || !is_str("model_id") || !is_arr("tokens") ||
            !is_arr("logprobs")) {
            result.report.reject(line_no, corpus::reason::malformed, "missing or mistyped field");
            continue;
        }
        ScoredDocument doc;
        doc.doc_id = obj["doc_id"].get<std::string>();
        doc.model_id = obj["model_id"].get<std::string>();
        bool ok = true;
        for (const auto& t : obj["tokens"]) {
            if (!t.is_string()) ok = false;
            else doc.tokens.push_back(t.get<std::string>());
        }
        for (const auto& v : obj["logprobs"]) {
            if (!v.is_number()) ok = false;
            else doc.logprobs.push_back(v.get<double>());
        }
        if (!ok || doc.doc_id.empty()) {
            result.report.reject(line_no, corpus::reason::malformed, "bad array element");
            continue;
        }
        if (doc.tokens.size() != doc.logprobs.size()) {
            result.report.reject(line_no, reason::length_mismatch,
                                 doc.doc_id + ": " + std::to_string(doc.tokens.size()) + " tokens, " +
                                     std::to_string(doc.logprobs.size()) + " logprobs");
            continue;
        }
        if (doc.tokens.empty()) {
            result.report.reject(line_no, reason::empty_sequence, doc.doc_id);
            continue;
        }
        const char* bad = nullptr;
        for (const double lp : doc.logprobs) {
            if (!std::isfinite(lp)) bad = reason::non_finite;
            else if (lp > 0.0 && !bad) bad = reason::positive_logprob;
        }
        if (bad) {
            result.report.reject(line_no, bad, doc.doc_id);
            continue;
        }
        doc.perplexity = perplexity(doc.logprobs);
        result.docs.push_back(std::move(doc));
        ++result.report.loaded;
    }
    return result;
}

/// Writes scored documents in logprobs.jsonl format (full double precision).
inline void write_logprobs(std::ostream& out, const std::vector<ScoredDocument>& docs) {
    for (const auto& d : docs) {
        nlohmann::json obj = {
            {"doc_id", d.doc_id}, {"model_id", d.model_id}, {"tokens", d.tokens}, {"logprobs", d.logprobs}};
        out << obj.dump() << '\n';
    }
}

} // namespace surprise::lm
