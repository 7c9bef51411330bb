#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "surprise/error.hpp"

namespace surprise::corpus {

using Date = std::chrono::year_month_day;

/// Parses "YYYY-MM-DD" or "YYYY-MM" (day defaults to 01). Returns nullopt on
/// anything else, including impossible calendar dates.
inline std::optional<Date> parse_date(std::string_view s) {
    auto digits = [&](std::size_t from, std::size_t count) -> std::optional<int> {
        int value = 0;
        for (std::size_t i = from; i < from + count; ++i) {
            if (s[i] < '0' || s[i] > '9') return std::nullopt;
            value = value * 10 + (s[i] - '0');
        }
        return value;
    };
    if (s.size() != 7 && s.size() != 10) return std::nullopt;
    if (s[4] != '-' || (s.size() == 10 && s[7] != '-')) return std::nullopt;
    const auto y = digits(0, 4);
    const auto m = digits(5, 2);
    const auto d = s.size() == 10 ? digits(8, 2) : std::optional<int>{1};
    if (!y || !m || !d) return std::nullopt;
    const Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                    std::chrono::day{static_cast<unsigned>(*d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

/// Cutoff dates name the last day covered by a model. A bare "YYYY-MM" means
/// the last day of that month.
inline std::optional<Date> parse_cutoff(std::string_view s) {
    auto date = parse_date(s);
    if (!date || s.size() == 10) return date;
    return Date{std::chrono::year_month_day_last{date->year(),
                                                 std::chrono::month_day_last{date->month()}}};
}

inline std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

inline int year_of(const Date& d) { return static_cast<int>(d.year()); }

/// Signed number of days from `from` to `to`.
inline long days_between(const Date& from, const Date& to) {
    return (std::chrono::sys_days{to} - std::chrono::sys_days{from}).count();
}

enum class DocType { research, review };

inline std::optional<DocType> parse_doc_type(std::string_view s) {
    if (s == "research") return DocType::research;
    if (s == "review") return DocType::review;
    return std::nullopt;
}

inline std::string_view to_string(DocType t) {
    return t == DocType::research ? "research" : "review";
}

/// WOS-style citable items. Retracted papers stay citable.
inline bool is_citable(DocType t) { return t == DocType::research || t == DocType::review; }

struct PaperRecord {
    std::string doc_id;
    std::string title;
    std::string abstract;
    Date pub_date{};
    std::string journal_id;
    DocType doc_type = DocType::research;
    bool retracted = false;
    std::set<std::string> field_groups;
    std::set<std::string> funders;
    std::vector<std::string> reference_ids;

    bool operator==(const PaperRecord&) const = default;
};

struct ReviewBundle {
    std::string doc_id;
    std::vector<double> ratings;
    std::vector<double> confidences;
    std::vector<std::string> comments;
    std::optional<Date> received_date;
    std::optional<Date> accepted_date;

    bool operator==(const ReviewBundle&) const = default;
};

struct JournalMetrics {
    std::string journal_id;
    double jif = 0.0;
    std::size_t citation_numerator = 0;
    std::size_t citable_denominator = 0;
};

/// Papers keyed by doc_id, in insertion order.
class Corpus {
public:
    Corpus() = default;

    /// Adds a record; returns false (and leaves the corpus unchanged) when the
    /// doc_id is already present.
    bool add(PaperRecord record) {
        const auto [it, inserted] = index_.try_emplace(record.doc_id, papers_.size());
        if (!inserted) return false;
        papers_.push_back(std::move(record));
        return true;
    }

    const PaperRecord* find(std::string_view doc_id) const {
        const auto it = index_.find(std::string(doc_id));
        return it == index_.end() ? nullptr : &papers_[it->second];
    }

    bool contains(std::string_view doc_id) const { return find(doc_id) != nullptr; }

    const std::vector<PaperRecord>& papers() const { return papers_; }
    std::size_t size() const { return papers_.size(); }
    bool empty() const { return papers_.empty(); }
    auto begin() const { return papers_.begin(); }
    auto end() const { return papers_.end(); }

    bool operator==(const Corpus& other) const { return papers_ == other.papers_; }

private:
    std::vector<PaperRecord> papers_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Records published strictly after `cutoff`, in original order.
inline Corpus filter_post_cutoff(const Corpus& corpus, const Date& cutoff) {
    Corpus out;
    for (const auto& paper : corpus) {
        if (paper.pub_date > cutoff) out.add(paper);
    }
    return out;
}

} // namespace surprise::corpus
