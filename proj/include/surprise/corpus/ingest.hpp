#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "surprise/corpus/types.hpp"

namespace surprise::corpus {

namespace reason {
inline constexpr const char* missing_abstract = "missing abstract";
inline constexpr const char* bad_date = "bad date";
inline constexpr const char* duplicate_id = "duplicate id";
inline constexpr const char* malformed = "malformed line";
inline constexpr const char* date_order = "accepted before received";
} // namespace reason

struct IngestReport {
    std::size_t lines = 0;
    std::size_t loaded = 0;
    std::map<std::string, std::size_t> skipped;
    /// "line N: reason" for the first `max_diagnostics` rejected lines.
    std::vector<std::string> diagnostics;

    static constexpr std::size_t max_diagnostics = 100;

    std::size_t skipped_count(const std::string& why) const {
        const auto it = skipped.find(why);
        return it == skipped.end() ? 0 : it->second;
    }

    std::size_t total_skipped() const {
        std::size_t total = 0;
        for (const auto& [_, n] : skipped) total += n;
        return total;
    }

    void reject(std::size_t line_no, const std::string& why, const std::string& detail = {}) {
        ++skipped[why];
        if (diagnostics.size() < max_diagnostics) {
            std::string msg = "line " + std::to_string(line_no) + ": " + why;
            if (!detail.empty()) msg += " (" + detail + ")";
            diagnostics.push_back(std::move(msg));
        }
    }
};

namespace detail {

using nlohmann::json;

struct LineError {
    const char* reason;
    std::string detail;
};

inline std::string string_field(const json& obj, const char* key, bool required) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        if (required) throw LineError{reason::malformed, std::string("missing ") + key};
        return {};
    }
    if (!it->is_string()) throw LineError{reason::malformed, std::string(key) + " is not a string"};
    return it->get<std::string>();
}

template <typename Container>
Container string_array(const json& obj, const char* key) {
    Container out;
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return out;
    if (!it->is_array()) throw LineError{reason::malformed, std::string(key) + " is not an array"};
    for (const auto& v : *it) {
        if (!v.is_string()) throw LineError{reason::malformed, std::string(key) + " has a non-string"};
        if constexpr (requires { out.push_back(v.get<std::string>()); }) {
            out.push_back(v.get<std::string>());
        } else {
            out.insert(v.get<std::string>());
        }
    }
    return out;
}

inline std::vector<double> number_array(const json& obj, const char* key) {
    std::vector<double> out;
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return out;
    if (!it->is_array()) throw LineError{reason::malformed, std::string(key) + " is not an array"};
    for (const auto& v : *it) {
        if (!v.is_number()) throw LineError{reason::malformed, std::string(key) + " has a non-number"};
        out.push_back(v.get<double>());
    }
    return out;
}

inline bool is_blank(const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

inline PaperRecord parse_paper(const std::string& line) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw LineError{reason::malformed, "invalid JSON"};
    }
    if (!obj.is_object()) throw LineError{reason::malformed, "not an object"};

    PaperRecord p;
    p.doc_id = string_field(obj, "doc_id", true);
    if (p.doc_id.empty()) throw LineError{reason::malformed, "empty doc_id"};
    p.title = string_field(obj, "title", false);
    p.abstract = string_field(obj, "abstract", false);
    if (is_blank(p.abstract)) throw LineError{reason::missing_abstract, p.doc_id};
    const auto date_text = string_field(obj, "pub_date", false);
    const auto date = parse_date(date_text);
    if (!date) throw LineError{reason::bad_date, date_text};
    p.pub_date = *date;
    p.journal_id = string_field(obj, "journal_id", false);
    const auto type_text = string_field(obj, "doc_type", false);
    if (!type_text.empty()) {
        const auto type = parse_doc_type(type_text);
        if (!type) throw LineError{reason::malformed, "unknown doc_type " + type_text};
        p.doc_type = *type;
    }
    if (const auto it = obj.find("retracted"); it != obj.end() && !it->is_null()) {
        if (!it->is_boolean()) throw LineError{reason::malformed, "retracted is not a bool"};
        p.retracted = it->get<bool>();
    }
    p.field_groups = string_array<std::set<std::string>>(obj, "field_groups");
    p.funders = string_array<std::set<std::string>>(obj, "funders");
    p.reference_ids = string_array<std::vector<std::string>>(obj, "reference_ids");
    return p;
}

inline std::optional<Date> optional_date(const json& obj, const char* key) {
    const auto text = string_field(obj, key, false);
    if (text.empty()) return std::nullopt;
    const auto date = parse_date(text);
    if (!date) throw LineError{reason::bad_date, text};
    return date;
}

inline ReviewBundle parse_review(const std::string& line) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error&) {
        throw LineError{reason::malformed, "invalid JSON"};
    }
    if (!obj.is_object()) throw LineError{reason::malformed, "not an object"};
    ReviewBundle r;
    r.doc_id = string_field(obj, "doc_id", true);
    if (r.doc_id.empty()) throw LineError{reason::malformed, "empty doc_id"};
    r.ratings = number_array(obj, "ratings");
    r.confidences = number_array(obj, "confidences");
    r.comments = string_array<std::vector<std::string>>(obj, "comments");
    r.received_date = optional_date(obj, "received_date");
    r.accepted_date = optional_date(obj, "accepted_date");
    if (r.received_date && r.accepted_date && *r.accepted_date < *r.received_date) {
        throw LineError{reason::date_order, r.doc_id};
    }
    return r;
}

} // namespace detail

/// Reads papers.jsonl. Bad lines are counted in the report and skipped;
/// ingestion never stops early.
inline std::pair<Corpus, IngestReport> ingest_papers(std::istream& in) {
    Corpus corpus;
    IngestReport report;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::is_blank(line)) continue;
        ++report.lines;
        try {
            auto paper = detail::parse_paper(line);
            const std::string id = paper.doc_id;
            if (!corpus.add(std::move(paper))) {
                report.reject(line_no, reason::duplicate_id, id);
                continue;
            }
            ++report.loaded;
        } catch (const detail::LineError& e) {
            report.reject(line_no, e.reason, e.detail);
        }
    }
    return {std::move(corpus), std::move(report)};
}

/// Reads reviews.jsonl with the same skip-and-count policy as ingest_papers.
inline std::pair<std::vector<ReviewBundle>, IngestReport> ingest_reviews(std::istream& in) {
    std::vector<ReviewBundle> reviews;
    std::unordered_set<std::string> seen;
    IngestReport report;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::is_blank(line)) continue;
        ++report.lines;
        try {
            auto review = detail::parse_review(line);
            if (!seen.insert(review.doc_id).second) {
                report.reject(line_no, reason::duplicate_id, review.doc_id);
                continue;
            }
            reviews.push_back(std::move(review));
            ++report.loaded;
        } catch (const detail::LineError& e) {
            report.reject(line_no, e.reason, e.detail);
        }
    }
    return {std::move(reviews), std::move(report)};
}

inline nlohmann::json to_json(const PaperRecord& p) {
    return {
        {"doc_id", p.doc_id},
        {"title", p.title},
        {"abstract", p.abstract},
        {"pub_date", format_date(p.pub_date)},
        {"journal_id", p.journal_id},
        {"doc_type", to_string(p.doc_type)},
        {"retracted", p.retracted},
        {"field_groups", p.field_groups},
        {"funders", p.funders},
        {"reference_ids", p.reference_ids},
    };
}

inline nlohmann::json to_json(const ReviewBundle& r) {
    nlohmann::json obj = {
        {"doc_id", r.doc_id},
        {"ratings", r.ratings},
        {"confidences", r.confidences},
        {"comments", r.comments},
    };
    if (r.received_date) obj["received_date"] = format_date(*r.received_date);
    if (r.accepted_date) obj["accepted_date"] = format_date(*r.accepted_date);
    return obj;
}

/// Writes the corpus in papers.jsonl format with full YYYY-MM-DD dates.
inline void write_papers(std::ostream& out, const Corpus& corpus) {
    for (const auto& paper : corpus) out << to_json(paper).dump() << '\n';
}

inline void write_reviews(std::ostream& out, const std::vector<ReviewBundle>& reviews) {
    for (const auto& review : reviews) out << to_json(review).dump() << '\n';
}

} // namespace surprise::corpus
