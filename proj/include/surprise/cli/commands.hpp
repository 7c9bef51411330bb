#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "surprise/cli/config.hpp"
#include "surprise/cli/pipelines.hpp"
#include "surprise/cli/workspace.hpp"
#include "surprise/corpus/ingest.hpp"
#include "surprise/lm/ngram.hpp"
#include "surprise/lm/scoring.hpp"

namespace surprise::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;

namespace detail {

inline void print_report(std::ostream& log, const std::string& path, const corpus::IngestReport& report) {
    log << path << ": " << report.loaded << " of " << report.lines << " line(s) loaded\n";
    for (const auto& [reason, count] : report.skipped) log << "  skipped (" << reason << "): " << count << '\n';
    for (std::size_t i = 0; i < report.diagnostics.size() && i < 10; ++i) log << "  " << report.diagnostics[i] << '\n';
}

inline void write_report_rows(io::CsvWriter& csv, const std::string& file, const corpus::IngestReport& report) {
    csv.cell(file).cell(report.lines).cell(report.loaded).cell("").cell("");
    csv.end_row();
    for (const auto& [reason, count] : report.skipped) {
        csv.cell(file).cell(report.lines).cell(report.loaded).cell(reason).cell(count);
        csv.end_row();
    }
}

} // namespace detail

inline void cmd_ingest(Workspace& ws) {
    const auto& cfg = ws.config();
    if (cfg.papers.empty()) throw UsageError("ingest needs --papers");
    auto in = Workspace::open_input(cfg.papers);
    const auto [corpus, report] = corpus::ingest_papers(in);
    detail::print_report(ws.log(), cfg.papers, report);
    {
        auto out = ws.output("corpus.jsonl");
        corpus::write_papers(out, corpus);
    }
    auto out = ws.output("ingest_report.csv");
    io::CsvWriter csv(out, {"file", "lines", "loaded", "reason", "skipped"});
    detail::write_report_rows(csv, "papers", report);
    if (!cfg.reviews.empty()) {
        auto rin = Workspace::open_input(cfg.reviews);
        const auto [reviews, rreport] = corpus::ingest_reviews(rin);
        detail::print_report(ws.log(), cfg.reviews, rreport);
        auto rout = ws.output("reviews.jsonl");
        corpus::write_reviews(rout, reviews);
        detail::write_report_rows(csv, "reviews", rreport);
    }
}

inline void cmd_train(Workspace& ws) {
    const auto& cfg = ws.config();
    std::vector<std::string> texts;
    if (!cfg.train.empty()) {
        auto in = Workspace::open_input(cfg.train);
        const auto [corpus, report] = corpus::ingest_papers(in);
        if (report.total_skipped()) detail::print_report(ws.log(), cfg.train, report);
        for (const auto& p : corpus) texts.push_back(p.abstract);
    } else {
        // Without a separate training file, train on what the model could
        // have seen: papers up to the cutoff.
        for (const auto& p : ws.corpus()) {
            if (!cfg.cutoff || p.pub_date <= *cfg.cutoff) texts.push_back(p.abstract);
        }
    }
    if (texts.empty()) throw InvalidInput("no training documents");
    const auto model = lm::NGramModel::train(
        texts, {.order = cfg.order, .discount = cfg.discount, .min_count = cfg.min_count});
    ws.log() << "trained order-" << model.order() << " model on " << texts.size() << " document(s), vocabulary "
             << model.vocabulary_size() << '\n';
    auto out = ws.output("model.ngram");
    model.save(out);
}

inline void cmd_score(Workspace& ws) {
    const auto& cfg = ws.config();
    if (cfg.model.empty() == cfg.logprobs.empty()) {
        throw UsageError("score needs exactly one backend: --model or --logprobs");
    }
    lm::ImportedScores imported;
    if (!cfg.logprobs.empty()) {
        auto in = Workspace::open_input(cfg.logprobs);
        auto result = lm::import_token_logprobs(in);
        if (result.report.total_skipped()) detail::print_report(ws.log(), cfg.logprobs, result.report);
        for (auto& d : result.docs) imported.add(std::move(d));
    }
    std::vector<ScoreRow> rows;
    std::size_t before_cutoff = 0, unscored = 0;
    for (const auto& paper : ws.corpus()) {
        if (cfg.cutoff && !(paper.pub_date > *cfg.cutoff)) {
            ++before_cutoff;
            continue;
        }
        try {
            const auto doc = cfg.model.empty() ? lm::score_document(imported, paper, cfg.model_id)
                                               : lm::score_document(ws.model(), paper, cfg.model_id);
            rows.push_back({doc.doc_id, cfg.model_id, doc.token_count(), doc.perplexity});
        } catch (const InvalidInput& e) {
            ++unscored;
            if (unscored <= 10) ws.log() << "not scored: " << e.what() << '\n';
        }
    }
    ws.log() << "scored " << rows.size() << " document(s)";
    if (cfg.cutoff) ws.log() << ", " << before_cutoff << " on or before the cutoff excluded";
    if (unscored) ws.log() << ", " << unscored << " unscoreable";
    ws.log() << '\n';
    auto out = ws.output("scores.csv");
    write_scores(out, std::move(rows));
}

inline void cmd_import(Workspace& ws) {
    const auto& cfg = ws.config();
    if (cfg.logprobs.empty()) throw UsageError("import-logprobs needs --logprobs");
    auto in = Workspace::open_input(cfg.logprobs);
    const auto result = lm::import_token_logprobs(in);
    detail::print_report(ws.log(), cfg.logprobs, result.report);
    std::vector<ScoreRow> rows;
    for (const auto& d : result.docs) {
        if (cfg.model_id_explicit && d.model_id != cfg.model_id) continue;
        rows.push_back({d.doc_id, d.model_id, d.token_count(), d.perplexity});
    }
    {
        auto out = ws.output("scores.csv");
        write_scores(out, std::move(rows));
    }
    auto out = ws.output("import_report.csv");
    io::CsvWriter csv(out, {"file", "lines", "loaded", "reason", "skipped"});
    detail::write_report_rows(csv, "logprobs", result.report);
}

inline void cmd_analyze(Workspace& ws, const std::string& name) {
    const auto* pipeline = find_pipeline(name);
    if (!pipeline) throw UsageError("unknown pipeline '" + name + "'; available: " + pipeline_names());
    pipeline->run(ws);
}

/// Runs every pipeline whose inputs were supplied, with charts. Returns false
/// when any attempted pipeline failed.
inline bool cmd_report(Workspace& ws) {
    if (!ws.has_corpus() || !ws.has_scores()) throw UsageError("report needs --corpus and --scores");
    const auto& cfg = ws.config();
    std::vector<std::array<std::string, 3>> status;
    bool ok = true;
    for (const auto& p : pipelines()) {
        std::string missing;
        if (p.needs_reviews && cfg.reviews.empty()) missing = "needs --reviews";
        if (p.needs_model && (cfg.model.empty() || cfg.synonyms.empty())) missing = "needs --model and --synonyms";
        if (!missing.empty()) {
            status.push_back({p.name, "skipped", missing});
            continue;
        }
        try {
            ws.log() << "running " << p.name << '\n';
            p.run(ws);
            status.push_back({p.name, "ok", ""});
        } catch (const Error& e) {
            ws.log() << p.name << ": " << e.what() << '\n';
            status.push_back({p.name, "failed", e.what()});
            ok = false;
        }
    }
    auto out = ws.output("report.csv");
    io::CsvWriter csv(out, {"pipeline", "status", "message"});
    for (const auto& row : status) {
        csv.cell(row[0]).cell(row[1]).cell(row[2]);
        csv.end_row();
    }
    return ok;
}

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Perplexity-based surprise analytics for scientific corpora", "surprise"};
    app.require_subcommand(1, 1);
    std::string config_path;
    app.add_option("--config", config_path, std::string("key = value config file (default: $") + config_env_var + ")");
    std::map<std::string, std::string> flag_values;
    std::map<std::string, CLI::Option*> flag_options;
    for (const auto& key : config_keys()) {
        flag_options[key.name] = app.add_option(std::string("--") + key.name, flag_values[key.name], key.help);
    }
    auto* ingest = app.add_subcommand("ingest", "validate papers/reviews and write a corpus snapshot");
    auto* train = app.add_subcommand("train-lm", "train the Kneser-Ney n-gram model");
    auto* score = app.add_subcommand("score", "score abstracts with a model or imported log-probabilities");
    auto* import = app.add_subcommand("import-logprobs", "recompute perplexities from logprobs.jsonl");
    auto* analyze = app.add_subcommand("analyze", "run one analysis pipeline");
    std::string pipeline;
    analyze->add_option("pipeline", pipeline, "one of: " + pipeline_names())->required();
    auto* report = app.add_subcommand("report", "run every applicable pipeline and draw charts");
    for (auto* sub : {ingest, train, score, import, analyze, report}) sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        std::map<std::string, std::string> values;
        if (config_path.empty()) {
            if (const char* env = std::getenv(config_env_var); env && *env) config_path = env;
        }
        if (!config_path.empty()) values = read_config_file(config_path);
        for (const auto& [key, option] : flag_options) {
            if (option->count()) values[key] = flag_values[key];
        }
        auto config = make_config(values);
        if (*report) config.svg = true;
        Workspace ws(std::move(config), err);
        bool ok = true;
        if (*ingest) cmd_ingest(ws);
        if (*train) cmd_train(ws);
        if (*score) cmd_score(ws);
        if (*import) cmd_import(ws);
        if (*analyze) cmd_analyze(ws, pipeline);
        if (*report) ok = cmd_report(ws);
        for (const auto& path : ws.written()) err << "wrote " << path << '\n';
        return ok ? exit_ok : exit_failure;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

} // namespace surprise::cli
