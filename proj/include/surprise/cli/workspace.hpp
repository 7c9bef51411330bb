#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "surprise/analysis/binning.hpp"
#include "surprise/cli/config.hpp"
#include "surprise/corpus/citations.hpp"
#include "surprise/corpus/ingest.hpp"
#include "surprise/io/csv.hpp"
#include "surprise/lm/ngram.hpp"
#include "surprise/lm/stability.hpp"

namespace surprise::cli {

inline const std::vector<std::string>& scores_header() {
    static const std::vector<std::string> header{"doc_id", "model_id", "token_count", "perplexity"};
    return header;
}

struct ScoreRow {
    std::string doc_id;
    std::string model_id;
    std::size_t token_count = 0;
    double perplexity = 0.0;
};

inline void write_scores(std::ostream& out, std::vector<ScoreRow> rows) {
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.model_id != b.model_id ? a.model_id < b.model_id : a.doc_id < b.doc_id;
    });
    io::CsvWriter csv(out, scores_header());
    for (const auto& r : rows) {
        csv.cell(r.doc_id).cell(r.model_id).cell(r.token_count).cell(r.perplexity);
        csv.end_row();
    }
}

/// Reads scores.csv. With several model ids present, `model_id` selects one;
/// it is required only when the file is ambiguous.
inline std::vector<ScoreRow> read_scores(std::istream& in, const std::string& source,
                                         const std::optional<std::string>& model_id) {
    std::string line;
    if (!std::getline(in, line) || io::parse_csv_line(line) != scores_header()) {
        throw UsageError(source + ": expected header doc_id,model_id,token_count,perplexity");
    }
    std::vector<ScoreRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = io::parse_csv_line(line);
        if (f.size() != 4) throw InvalidInput(source + ":" + std::to_string(line_no) + ": expected 4 fields");
        ScoreRow r{f[0], f[1], 0, 0.0};
        try {
            r.token_count = std::stoull(f[2]);
            r.perplexity = std::stod(f[3]);
        } catch (const std::logic_error&) {
            throw InvalidInput(source + ":" + std::to_string(line_no) + ": bad number");
        }
        if (!(r.perplexity >= 1.0) || !std::isfinite(r.perplexity)) {
            throw InvalidInput(source + ":" + std::to_string(line_no) + ": perplexity must be finite and >= 1");
        }
        rows.push_back(std::move(r));
    }
    std::vector<std::string> ids;
    for (const auto& r : rows) {
        if (std::find(ids.begin(), ids.end(), r.model_id) == ids.end()) ids.push_back(r.model_id);
    }
    if (model_id) {
        std::erase_if(rows, [&](const auto& r) { return r.model_id != *model_id; });
        if (rows.empty()) throw InvalidInput(source + ": no scores for model id " + *model_id);
    } else if (ids.size() > 1) {
        throw UsageError(source + ": several model ids present; choose one with --model-id");
    }
    return rows;
}

/// Inputs of one command, loaded on first use, and the output directory.
class Workspace {
public:
    explicit Workspace(RunConfig config, std::ostream& log = std::cerr) : config_(std::move(config)), log_(log) {}

    const RunConfig& config() const { return config_; }
    std::ostream& log() { return log_; }

    bool has_corpus() const { return !config_.corpus.empty() || !config_.papers.empty(); }
    bool has_reviews() const { return !config_.reviews.empty(); }
    bool has_scores() const { return !config_.scores.empty(); }

    const corpus::Corpus& corpus() {
        if (!corpus_) {
            const auto& path = !config_.corpus.empty() ? config_.corpus : config_.papers;
            if (path.empty()) throw UsageError("this command needs --corpus (or --papers)");
            auto in = open_input(path);
            auto [c, report] = corpus::ingest_papers(in);
            if (report.total_skipped()) {
                log_ << path << ": skipped " << report.total_skipped() << " of " << report.lines << " lines\n";
            }
            corpus_ = std::move(c);
        }
        return *corpus_;
    }

    const std::vector<corpus::ReviewBundle>& reviews() {
        if (!reviews_) {
            if (config_.reviews.empty()) throw UsageError("this command needs --reviews");
            auto in = open_input(config_.reviews);
            auto [r, report] = corpus::ingest_reviews(in);
            if (report.total_skipped()) {
                log_ << config_.reviews << ": skipped " << report.total_skipped() << " of " << report.lines
                     << " lines\n";
            }
            reviews_ = std::move(r);
        }
        return *reviews_;
    }

    const analysis::Scores& scores() {
        if (!scores_) {
            if (config_.scores.empty()) throw UsageError("this command needs --scores");
            auto in = open_input(config_.scores);
            const auto rows = read_scores(in, config_.scores,
                                          config_.model_id_explicit ? std::optional(config_.model_id) : std::nullopt);
            analysis::Scores s;
            for (const auto& r : rows) {
                if (!s.emplace(r.doc_id, r.perplexity).second) {
                    throw InvalidInput(config_.scores + ": duplicate doc_id " + r.doc_id);
                }
            }
            scores_ = std::move(s);
        }
        return *scores_;
    }

    const analysis::QuantileBinning& binning() {
        if (!binning_) binning_ = analysis::quantile_bins(scores(), config_.bins);
        return *binning_;
    }

    const corpus::CitationIndex& citations() {
        if (!citations_) citations_ = corpus::resolve_citations(corpus());
        return *citations_;
    }

    int jif_year() {
        if (config_.jif_year) return *config_.jif_year;
        int latest = 0;
        bool any = false;
        for (const auto& p : corpus()) {
            latest = any ? std::max(latest, corpus::year_of(p.pub_date)) : corpus::year_of(p.pub_date);
            any = true;
        }
        if (!any) throw InvalidInput("corpus is empty");
        return latest;
    }

    const corpus::JifTable& jif() {
        if (!jif_) {
            jif_ = corpus::compute_jif(corpus(), citations(), jif_year());
            if (!jif_->omitted.empty()) {
                log_ << "warning: " << jif_->omitted.size() << " journal(s) without citable items in "
                     << jif_->target_year - 2 << "-" << jif_->target_year - 1 << " omitted from JIF\n";
            }
        }
        return *jif_;
    }

    const lm::NGramModel& model() {
        if (!model_) {
            if (config_.model.empty()) throw UsageError("this command needs --model");
            auto in = open_input(config_.model);
            model_ = lm::NGramModel::load(in);
        }
        return *model_;
    }

    const lm::SynonymLexicon& synonyms() {
        if (!synonyms_) {
            if (config_.synonyms.empty()) throw UsageError("this command needs --synonyms");
            auto in = open_input(config_.synonyms);
            synonyms_ = lm::SynonymLexicon::parse(in);
        }
        return *synonyms_;
    }

    /// Opens `name` in the output directory for writing.
    std::ofstream output(const std::string& name) {
        std::filesystem::create_directories(config_.out);
        const auto path = config_.out / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path.string());
        written_.push_back(path.string());
        return out;
    }

    const std::vector<std::string>& written() const { return written_; }

    static std::ifstream open_input(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw UsageError("cannot read " + path);
        return in;
    }

private:
    RunConfig config_;
    std::ostream& log_;
    std::optional<corpus::Corpus> corpus_;
    std::optional<std::vector<corpus::ReviewBundle>> reviews_;
    std::optional<analysis::Scores> scores_;
    std::optional<analysis::QuantileBinning> binning_;
    std::optional<corpus::CitationIndex> citations_;
    std::optional<corpus::JifTable> jif_;
    std::optional<lm::NGramModel> model_;
    std::optional<lm::SynonymLexicon> synonyms_;
    std::vector<std::string> written_;
};

} // namespace surprise::cli
