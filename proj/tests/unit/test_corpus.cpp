#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "surprise/corpus/citations.hpp"
#include "surprise/corpus/ingest.hpp"
#include "surprise/rng.hpp"

namespace {

using namespace surprise::corpus;

std::string paper_line(const std::string& id, const std::string& date, const std::string& abstract = "some text",
                       const std::string& extra = "") {
    return R"({"doc_id":")" + id + R"(","title":"T","abstract":")" + abstract + R"(","pub_date":")" + date +
           R"(","journal_id":"J","doc_type":"research","retracted":false,"field_groups":["Physics"],)" +
           R"("funders":["NSF"],"reference_ids":[])" + extra + "}\n";
}

Corpus ingest_text(const std::string& text, IngestReport* report = nullptr) {
    std::istringstream in(text);
    auto [corpus, r] = ingest_papers(in);
    if (report) *report = r;
    return corpus;
}

PaperRecord make_paper(const std::string& id, const std::string& date, const std::string& journal = "J",
                       std::vector<std::string> refs = {}) {
    PaperRecord p;
    p.doc_id = id;
    p.abstract = "text";
    p.pub_date = *parse_date(date);
    p.journal_id = journal;
    p.field_groups = {"Physics"};
    p.reference_ids = std::move(refs);
    return p;
}

TEST(Dates, ParsesDayAndMonthPrecision) {
    EXPECT_EQ(format_date(*parse_date("2023-04-01")), "2023-04-01");
    EXPECT_EQ(format_date(*parse_date("2023-04")), "2023-04-01");
    EXPECT_FALSE(parse_date("2023-02-30"));
    EXPECT_FALSE(parse_date("2023/02/01"));
    EXPECT_FALSE(parse_date("23-02-01"));
    EXPECT_EQ(format_date(*parse_cutoff("2023-03")), "2023-03-31");
    EXPECT_EQ(format_date(*parse_cutoff("2024-02")), "2024-02-29");
}

TEST(Dates, DaysBetween) {
    EXPECT_EQ(days_between(*parse_date("2023-01-01"), *parse_date("2023-03-02")), 60);
}

TEST(Ingest, WellFormedLineLoads) {
    IngestReport report;
    const auto c = ingest_text(paper_line("p1", "2023-05-02"), &report);
    ASSERT_EQ(c.size(), 1u);
    const auto& p = *c.find("p1");
    EXPECT_EQ(p.journal_id, "J");
    EXPECT_EQ(p.doc_type, DocType::research);
    EXPECT_EQ(p.field_groups, std::set<std::string>{"Physics"});
    EXPECT_EQ(p.funders, std::set<std::string>{"NSF"});
    EXPECT_EQ(report.loaded, 1u);
    EXPECT_EQ(report.total_skipped(), 0u);
}

TEST(Ingest, EmptyAbstractSkipped) {
    IngestReport report;
    const auto c = ingest_text(paper_line("p1", "2023-05-02", ""), &report);
    EXPECT_TRUE(c.empty());
    EXPECT_EQ(report.skipped_count("missing abstract"), 1u);
}

TEST(Ingest, DuplicateIdRejected) {
    IngestReport report;
    const auto c = ingest_text(paper_line("p1", "2023-05-02") + paper_line("p1", "2023-06-02"), &report);
    EXPECT_EQ(c.size(), 1u);
    EXPECT_EQ(report.skipped_count("duplicate id"), 1u);
    EXPECT_EQ(format_date(c.find("p1")->pub_date), "2023-05-02");
}

TEST(Ingest, BadDateAndMalformedLinesCounted) {
    IngestReport report;
    const auto c = ingest_text(paper_line("p1", "2023-13-01") + "{not json\n" + "[1,2]\n" +
                                   R"({"doc_id":"x","abstract":"a","pub_date":"2023-01-01","doc_type":"letter"})" +
                                   "\n" + paper_line("p2", "2023-01"),
                               &report);
    EXPECT_EQ(c.size(), 1u);
    EXPECT_EQ(report.skipped_count("bad date"), 1u);
    EXPECT_EQ(report.skipped_count("malformed line"), 3u);
    EXPECT_EQ(report.lines, 5u);
    EXPECT_FALSE(report.diagnostics.empty());
}

TEST(Ingest, OptionalFieldsDefault) {
    const auto c = ingest_text(R"({"doc_id":"m","abstract":"a b","pub_date":"2022-07"})" "\n");
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c.find("m")->doc_type, DocType::research);
    EXPECT_TRUE(c.find("m")->reference_ids.empty());
}

TEST(Ingest, RoundTripIsStable) {
    std::string text;
    for (int i = 0; i < 20; ++i) {
        text += paper_line("p" + std::to_string(i), "2021-0" + std::to_string(1 + i % 9) + "-1" + std::to_string(i % 10),
                           "abstract \\\"quoted\\\" \\u00e9 " + std::to_string(i), "");
    }
    const auto first = ingest_text(text);
    std::ostringstream out;
    write_papers(out, first);
    const auto second = ingest_text(out.str());
    EXPECT_EQ(first, second);
    std::ostringstream again;
    write_papers(again, second);
    EXPECT_EQ(out.str(), again.str());
}

TEST(Ingest, ReviewsParsedAndDateOrderChecked) {
    std::istringstream in(
        R"({"doc_id":"r1","ratings":[3,5,8],"confidences":[2,4],"comments":["maybe good"],"received_date":"2023-01-01","accepted_date":"2023-03-02"})"
        "\n"
        R"({"doc_id":"r2","ratings":[1],"received_date":"2023-05-01","accepted_date":"2023-03-02"})"
        "\n"
        R"({"doc_id":"r3","ratings":[4,4]})"
        "\n");
    const auto [reviews, report] = ingest_reviews(in);
    ASSERT_EQ(reviews.size(), 2u);
    EXPECT_EQ(reviews[0].ratings, (std::vector<double>{3, 5, 8}));
    EXPECT_EQ(reviews[0].comments.size(), 1u);
    EXPECT_FALSE(reviews[1].received_date);
    EXPECT_EQ(report.skipped_count("accepted before received"), 1u);
}

TEST(Cutoff, StrictlyAfterCutoff) {
    Corpus c;
    c.add(make_paper("a", "2023-04-01"));
    c.add(make_paper("b", "2023-03-15"));
    c.add(make_paper("c", "2023-03-31"));
    const auto kept = filter_post_cutoff(c, *parse_cutoff("2023-03"));
    EXPECT_EQ(kept.size(), 1u);
    EXPECT_TRUE(kept.contains("a"));
    EXPECT_EQ(filter_post_cutoff(kept, *parse_cutoff("2023-03")), kept);
    EXPECT_TRUE(filter_post_cutoff(Corpus{}, *parse_cutoff("2023-03")).empty());
}

TEST(Citations, SimpleAndEmpty) {
    Corpus c;
    c.add(make_paper("A", "2023-01-01", "J", {"B", "B", "missing"}));
    c.add(make_paper("B", "2022-01-01"));
    const auto index = resolve_citations(c);
    EXPECT_EQ(index.cited_by("B"), std::vector<std::string>{"A"});
    EXPECT_TRUE(index.cited_by("A").empty());
    EXPECT_EQ(index.unresolved(), 1u);
    EXPECT_EQ(index.resolved(), 1u);

    Corpus plain;
    plain.add(make_paper("X", "2023-01-01"));
    plain.add(make_paper("Y", "2023-01-01"));
    const auto none = resolve_citations(plain);
    EXPECT_TRUE(none.cited_by("X").empty());
    EXPECT_TRUE(none.cited_by("Y").empty());
}

TEST(Citations, MatchesBruteForceTranspose) {
    surprise::Rng rng(99);
    Corpus c;
    std::vector<std::string> ids;
    for (int i = 0; i < 100; ++i) ids.push_back("d" + std::to_string(i));
    for (int i = 0; i < 100; ++i) {
        std::vector<std::string> refs;
        const auto n = rng.below(8);
        for (std::uint64_t r = 0; r < n; ++r) refs.push_back(rng.below(10) == 0 ? "ghost" : ids[rng.below(100)]);
        c.add(make_paper(ids[i], "2022-01-01", "J", refs));
    }
    const auto index = resolve_citations(c);
    for (const auto& target : ids) {
        std::vector<std::string> expected;
        for (const auto& p : c) {
            if (std::find(p.reference_ids.begin(), p.reference_ids.end(), target) != p.reference_ids.end()) {
                expected.push_back(p.doc_id);
            }
        }
        EXPECT_EQ(index.cited_by(target), expected) << target;
    }
}

TEST(Jif, DirectRatio) {
    Corpus c;
    for (int i = 0; i < 50; ++i) c.add(make_paper("t" + std::to_string(i), i < 25 ? "2021-05-01" : "2022-05-01", "J"));
    for (int i = 0; i < 100; ++i) {
        c.add(make_paper("c" + std::to_string(i), "2023-02-01", "K", {"t" + std::to_string(i % 50)}));
    }
    const auto table = compute_jif(c, resolve_citations(c), 2023);
    ASSERT_TRUE(table.find("J"));
    EXPECT_DOUBLE_EQ(table.find("J")->jif, 2.0);
    EXPECT_EQ(table.find("J")->citation_numerator, 100u);
    EXPECT_EQ(table.find("J")->citable_denominator, 50u);
    EXPECT_FALSE(table.find("K"));
    EXPECT_EQ(table.omitted, std::vector<std::string>{"K"});
}

TEST(Jif, MatchesBruteForceRecount) {
    surprise::Rng rng(5);
    Corpus c;
    const std::vector<std::string> journals{"A", "B", "C"};
    std::vector<std::string> ids;
    for (int i = 0; i < 150; ++i) {
        const int year = 2020 + static_cast<int>(rng.below(4));
        std::vector<std::string> refs;
        for (int r = 0; r < 5 && !ids.empty(); ++r) refs.push_back(ids[rng.below(ids.size())]);
        auto p = make_paper("p" + std::to_string(i), std::to_string(year) + "-06-01", journals[rng.below(3)], refs);
        p.doc_type = rng.below(4) == 0 ? DocType::review : DocType::research;
        p.retracted = rng.below(10) == 0;
        ids.push_back(p.doc_id);
        c.add(p);
    }
    const int y = 2023;
    const auto table = compute_jif(c, resolve_citations(c), y);
    std::size_t total_numerator = 0;
    for (const auto& j : journals) {
        std::size_t num = 0, den = 0;
        for (const auto& cited : c) {
            const int cy = year_of(cited.pub_date);
            if (cited.journal_id != j || (cy != y - 1 && cy != y - 2)) continue;
            ++den;
            for (const auto& citer : c) {
                if (year_of(citer.pub_date) != y) continue;
                const auto& refs = citer.reference_ids;
                if (std::find(refs.begin(), refs.end(), cited.doc_id) != refs.end()) ++num;
            }
        }
        const auto* m = table.find(j);
        ASSERT_TRUE(m) << j;
        EXPECT_EQ(m->citation_numerator, num);
        EXPECT_EQ(m->citable_denominator, den);
        EXPECT_DOUBLE_EQ(m->jif, static_cast<double>(num) / static_cast<double>(den));
        total_numerator += m->citation_numerator;
    }
    std::size_t citations_in_year = 0;
    const auto index = resolve_citations(c);
    for (const auto& p : c) {
        for (const auto& citer : index.cited_by(p.doc_id)) citations_in_year += year_of(c.find(citer)->pub_date) == y;
    }
    EXPECT_LE(total_numerator, citations_in_year);
}

} // namespace
