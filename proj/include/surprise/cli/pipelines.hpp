#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "surprise/analysis/binning.hpp"
#include "surprise/analysis/interdisciplinary.hpp"
#include "surprise/analysis/lexical.hpp"
#include "surprise/analysis/profiles.hpp"
#include "surprise/analysis/review.hpp"
#include "surprise/analysis/venue.hpp"
#include "surprise/cli/workspace.hpp"
#include "surprise/io/csv.hpp"
#include "surprise/io/svg.hpp"
#include "surprise/lm/stability.hpp"
#include "surprise/rng.hpp"
#include "surprise/stats/hypothesis.hpp"
#include "surprise/stats/regression.hpp"
#include "surprise/stats/resampling.hpp"

namespace surprise::cli {

/// Shared layout of every *_tests.csv file.
inline const std::vector<std::string>& tests_header() {
    static const std::vector<std::string> header{"analysis", "method",  "term",   "estimate", "std_error", "statistic",
                                                 "df",       "p_value", "ci_low", "ci_high",  "effect"};
    return header;
}

namespace detail {

inline std::string join_df(const std::vector<double>& df) {
    std::string out;
    for (std::size_t i = 0; i < df.size(); ++i) {
        if (i) out += ';';
        out += io::format_double(df[i]);
    }
    return out;
}

inline void test_row(io::CsvWriter& csv, const std::string& analysis, const stats::TestResult& t) {
    csv.cell(analysis).cell(t.method).cell("").cell("").cell("").cell(t.statistic).cell(join_df(t.df)).cell(t.p_value);
    if (t.ci) {
        csv.cell(t.ci->lo).cell(t.ci->hi);
    } else {
        csv.cell("").cell("");
    }
    csv.cell(t.effect_size);
    csv.end_row();
}

inline void value_row(io::CsvWriter& csv, const std::string& analysis, const std::string& method,
                      const std::string& term, double value) {
    csv.cell(analysis).cell(method).cell(term).cell(value);
    csv.end_row();
}

/// One row per coefficient, then the fit statistic and n.
inline void fit_rows(io::CsvWriter& csv, const std::string& analysis, const std::string& method,
                     const stats::RegressionFit& fit) {
    const bool ols = method == "ols";
    for (std::size_t j = 0; j < fit.coefficients.size(); ++j) {
        csv.cell(analysis).cell(method).cell(fit.names[j]).cell(fit.coefficients[j]).cell(fit.standard_errors[j]);
        csv.cell(fit.statistics[j]);
        if (ols) {
            csv.cell(fit.df_residual);
        } else {
            csv.cell("");
        }
        csv.cell(fit.p_values[j]).cell(fit.ci_95[j].lo).cell(fit.ci_95[j].hi);
        if (fit.exponentiated) csv.cell((*fit.exponentiated)[j]);
        csv.end_row();
    }
    value_row(csv, analysis, method, ols ? "r_squared" : "pseudo_r_squared", fit.fit_stat);
    if (fit.dispersion) value_row(csv, analysis, method, "alpha", *fit.dispersion);
    value_row(csv, analysis, method, "n", static_cast<double>(fit.n));
}

/// Percentile bootstrap interval of `statistic` within each bin; bin b uses
/// the substream derive_seed(derive_seed(seed, stream), b).
inline std::vector<stats::Interval> bin_bands(const std::vector<std::vector<double>>& per_bin,
                                              stats::Statistic statistic, const RunConfig& config,
                                              std::uint64_t stream) {
    std::vector<stats::Interval> out;
    const auto base = derive_seed(config.seed, stream);
    for (std::size_t b = 0; b < per_bin.size(); ++b) {
        if (per_bin[b].empty()) {
            out.push_back({0.0, 0.0});
        } else if (per_bin[b].size() == 1) {
            out.push_back({per_bin[b][0], per_bin[b][0]});
        } else {
            out.push_back(stats::bootstrap_ci(per_bin[b], statistic, config.bootstrap, derive_seed(base, b)));
        }
    }
    return out;
}

inline void maybe_line_chart(Workspace& ws, const std::string& name, const std::string& title,
                             const std::string& y_label, const std::vector<double>& y,
                             const std::vector<stats::Interval>& band = {}) {
    if (!ws.config().svg || y.empty()) return;
    auto out = ws.output(name);
    io::line_chart(out, {title, "perplexity bin", y_label}, y, band);
}

inline std::vector<std::vector<double>> values_by_bin(const analysis::QuantileBinning& binning,
                                                      const std::unordered_map<std::string, double>& values) {
    std::vector<std::vector<double>> out(binning.k());
    for (const auto& m : binning.members()) {
        const auto it = values.find(m.doc_id);
        if (it != values.end()) out[m.bin].push_back(it->second);
    }
    return out;
}

inline void share_tests(io::CsvWriter& csv, const std::string& analysis, const analysis::ExtremeShareProfile& p,
                        std::ostream& log) {
    test_row(csv, analysis, p.top_vs_bottom.test);
    if (p.logistic) {
        fit_rows(csv, analysis, "logistic", *p.logistic);
    } else {
        log << analysis << ": logistic regression skipped (" << p.logistic_note << ")\n";
    }
}

/// Level per binned paper for the configured fixed effects; absent when none.
inline std::optional<analysis::FixedEffects> fixed_effects(Workspace& ws) {
    const auto& kind = ws.config().fixed_effects;
    if (kind == "none") return std::nullopt;
    analysis::FixedEffects levels;
    for (const auto& m : ws.binning().members()) {
        const auto* paper = ws.corpus().find(m.doc_id);
        if (!paper) continue;
        if (kind == "month") {
            levels[m.doc_id] = corpus::format_date(paper->pub_date).substr(0, 7);
        } else {
            std::string joined;
            for (const auto& g : paper->field_groups) joined += (joined.empty() ? "" : "+") + g;
            levels[m.doc_id] = joined;
        }
    }
    return levels;
}

} // namespace detail

inline void run_jif(Workspace& ws) {
    const auto& table = ws.jif();
    auto out = ws.output("jif.csv");
    io::CsvWriter csv(out, {"journal_id", "target_year", "jif", "citation_numerator", "citable_denominator"});
    for (const auto& [id, m] : table.journals) {
        csv.cell(id).cell(table.target_year).cell(m.jif).cell(m.citation_numerator).cell(m.citable_denominator);
        csv.end_row();
    }
}

inline void run_venue(Workspace& ws) {
    const auto& cfg = ws.config();
    const auto& binning = ws.binning();
    const auto& table = ws.jif();
    const auto extremes = analysis::extreme_journals(table, cfg.jif_extreme);
    std::unordered_map<std::string, bool> top, bottom;
    for (const auto& m : binning.members()) {
        const auto* paper = ws.corpus().find(m.doc_id);
        if (!paper || !table.find(paper->journal_id)) continue;
        top[m.doc_id] = extremes.top.count(paper->journal_id) > 0;
        bottom[m.doc_id] = extremes.bottom.count(paper->journal_id) > 0;
    }
    const auto fe = detail::fixed_effects(ws);
    const auto* fe_ptr = fe ? &*fe : nullptr;
    const auto pt = analysis::extreme_share_profile(binning, top, cfg.extreme_bins, fe_ptr);
    const auto pb = analysis::extreme_share_profile(binning, bottom, cfg.extreme_bins, fe_ptr);
    if (pt.unflagged) ws.log() << "venue: " << pt.unflagged << " binned paper(s) without a journal JIF excluded\n";
    {
        auto out = ws.output("venue.csv");
        io::CsvWriter csv(out, {"bin", "members", "top_jif_count", "top_jif_share", "bottom_jif_count",
                                "bottom_jif_share"});
        for (std::size_t b = 0; b < binning.k(); ++b) {
            csv.cell(b + 1).cell(pt.bins[b].members).cell(pt.bins[b].flagged).cell(pt.bins[b].proportion);
            csv.cell(pb.bins[b].flagged).cell(pb.bins[b].proportion);
            csv.end_row();
        }
    }
    auto out = ws.output("venue_tests.csv");
    io::CsvWriter csv(out, tests_header());
    detail::share_tests(csv, "top_jif", pt, ws.log());
    detail::share_tests(csv, "bottom_jif", pb, ws.log());
    std::vector<double> ts, bs;
    for (std::size_t b = 0; b < binning.k(); ++b) {
        ts.push_back(pt.bins[b].proportion);
        bs.push_back(pb.bins[b].proportion);
    }
    detail::maybe_line_chart(ws, "venue_top.svg", "Share in top-JIF journals", "share", ts);
    detail::maybe_line_chart(ws, "venue_bottom.svg", "Share in bottom-JIF journals", "share", bs);
}

inline void run_extreme_share(Workspace& ws) {
    const auto& cfg = ws.config();
    const auto& binning = ws.binning();
    const auto rv = analysis::review_variability(ws.reviews(), binning, cfg.extreme_bins);
    const auto delays = rv.delay_map();
    if (delays.empty()) throw InvalidInput("extreme-share: no binned paper has both review dates");
    std::vector<double> sorted;
    for (const auto& [id, d] : delays) sorted.push_back(d);
    std::sort(sorted.begin(), sorted.end());
    const double long_cut = stats::quantile_sorted(sorted, 1.0 - cfg.delay_extreme);
    const double short_cut = stats::quantile_sorted(sorted, cfg.delay_extreme);
    std::unordered_map<std::string, bool> is_long, is_short;
    for (const auto& [id, d] : delays) {
        is_long[id] = d >= long_cut;
        is_short[id] = d <= short_cut;
    }
    const auto fe = detail::fixed_effects(ws);
    const auto* fe_ptr = fe ? &*fe : nullptr;
    const auto pl = analysis::extreme_share_profile(binning, is_long, cfg.extreme_bins, fe_ptr);
    const auto ps = analysis::extreme_share_profile(binning, is_short, cfg.extreme_bins, fe_ptr);
    {
        auto out = ws.output("extreme_share.csv");
        io::CsvWriter csv(out, {"bin", "members", "long_delay_count", "long_delay_share", "short_delay_count",
                                "short_delay_share"});
        for (std::size_t b = 0; b < binning.k(); ++b) {
            csv.cell(b + 1).cell(pl.bins[b].members).cell(pl.bins[b].flagged).cell(pl.bins[b].proportion);
            csv.cell(ps.bins[b].flagged).cell(ps.bins[b].proportion);
            csv.end_row();
        }
    }
    auto out = ws.output("extreme_share_tests.csv");
    io::CsvWriter csv(out, tests_header());
    detail::value_row(csv, "long_delay", "threshold", "days", long_cut);
    detail::share_tests(csv, "long_delay", pl, ws.log());
    detail::value_row(csv, "short_delay", "threshold", "days", short_cut);
    detail::share_tests(csv, "short_delay", ps, ws.log());
    std::vector<double> ls, ss;
    for (std::size_t b = 0; b < binning.k(); ++b) {
        ls.push_back(pl.bins[b].proportion);
        ss.push_back(ps.bins[b].proportion);
    }
    detail::maybe_line_chart(ws, "extreme_share_long.svg", "Share of long acceptance delays", "share", ls);
    detail::maybe_line_chart(ws, "extreme_share_short.svg", "Share of short acceptance delays", "share", ss);
}

inline void run_review(Workspace& ws) {
    const auto& cfg = ws.config();
    const auto& binning = ws.binning();
    const auto rv = analysis::review_variability(ws.reviews(), binning, cfg.extreme_bins);
    if (rv.unmatched) ws.log() << "review: " << rv.unmatched << " review bundle(s) without a score\n";
    {
        auto out = ws.output("review.csv");
        io::CsvWriter csv(out, {"doc_id", "bin", "perplexity", "disparity", "mean_rating", "mean_confidence",
                                "delay_days"});
        for (const auto& p : rv.papers) {
            csv.cell(p.doc_id).cell(p.bin + 1).cell(p.score).cell(p.disparity).cell(p.mean_rating);
            csv.cell(p.mean_confidence).cell(p.delay_days);
            csv.end_row();
        }
    }
    const auto disparity = detail::values_by_bin(binning, rv.disparity_map());
    const auto rating = detail::values_by_bin(binning, rv.rating_map());
    const auto confidence = detail::values_by_bin(binning, rv.confidence_map());
    const auto delay = detail::values_by_bin(binning, rv.delay_map());
    const auto band = detail::bin_bands(disparity, stats::Statistic::mean, cfg, 1);
    auto mean_or_empty = [](const std::vector<double>& v) { return v.empty() ? std::nullopt : std::optional(stats::mean(v)); };
    std::vector<double> means;
    {
        auto out = ws.output("review_bins.csv");
        io::CsvWriter csv(out, {"bin", "n", "mean_disparity", "disparity_ci_low", "disparity_ci_high", "mean_rating",
                                "mean_confidence", "mean_delay_days"});
        for (std::size_t b = 0; b < binning.k(); ++b) {
            const auto md = mean_or_empty(disparity[b]);
            csv.cell(b + 1).cell(disparity[b].size()).cell(md);
            if (md) {
                csv.cell(band[b].lo).cell(band[b].hi);
                means.push_back(*md);
            } else {
                csv.cell("").cell("");
            }
            csv.cell(mean_or_empty(rating[b])).cell(mean_or_empty(confidence[b])).cell(mean_or_empty(delay[b]));
            csv.end_row();
        }
    }
    auto out = ws.output("review_tests.csv");
    io::CsvWriter csv(out, tests_header());
    if (rv.disparity_welch) detail::test_row(csv, "disparity", *rv.disparity_welch);
    if (rv.rating_welch) detail::test_row(csv, "mean_rating", *rv.rating_welch);
    if (rv.confidence_welch) detail::test_row(csv, "mean_confidence", *rv.confidence_welch);
    if (means.size() == binning.k()) {
        detail::maybe_line_chart(ws, "review_disparity.svg", "Rating disparity", "max - min rating", means, band);
    }
}

inline void run_dispersion(Workspace& ws) {
    const auto& cfg = ws.config();
    const auto& binning = ws.binning();
    const auto rv = analysis::review_variability(ws.reviews(), binning, cfg.extreme_bins);
    const auto values = cfg.dispersion_value == "rating"       ? rv.rating_map()
                        : cfg.dispersion_value == "confidence" ? rv.confidence_map()
                                                               : rv.disparity_map();
    const auto p = analysis::dispersion_profile(binning, values, cfg.variance_bins, cfg.extreme_bins);
    std::vector<std::vector<double>> per_bin;
    for (const auto& b : p.bins) per_bin.push_back(b.values);
    const auto band = detail::bin_bands(per_bin, stats::Statistic::sd, cfg, 2);
    std::vector<double> sds;
    {
        auto out = ws.output("dispersion.csv");
        io::CsvWriter csv(out, {"bin", "n", "mean", "sd", "sd_ci_low", "sd_ci_high"});
        for (std::size_t b = 0; b < p.bins.size(); ++b) {
            csv.cell(b + 1).cell(p.bins[b].n).cell(p.bins[b].mean).cell(p.bins[b].sd).cell(band[b].lo).cell(band[b].hi);
            csv.end_row();
            sds.push_back(p.bins[b].sd);
        }
    }
    auto out = ws.output("dispersion_tests.csv");
    io::CsvWriter csv(out, tests_header());
    if (p.white) detail::test_row(csv, cfg.dispersion_value, *p.white);
    if (p.binned_variance) detail::fit_rows(csv, "binned_variance", "ols", *p.binned_variance);
    detail::value_row(csv, "binned_variance", "ols", "omitted_bins", static_cast<double>(p.omitted_variance_bins));
    if (p.levene) detail::test_row(csv, cfg.dispersion_value, *p.levene);
    if (p.fligner) detail::test_row(csv, cfg.dispersion_value, *p.fligner);
    detail::maybe_line_chart(ws, "dispersion.svg", "Standard deviation of " + cfg.dispersion_value, "SD", sds, band);
    if (cfg.svg) {
        auto svg = ws.output("dispersion_box.svg");
        std::vector<std::string> names;
        for (std::size_t b = 0; b < per_bin.size(); ++b) names.push_back(std::to_string(b + 1));
        io::box_chart(svg, {cfg.dispersion_value + " by perplexity bin", "perplexity bin", cfg.dispersion_value}, names,
                      per_bin);
    }
}

namespace detail {

inline std::pair<std::vector<std::string>, std::vector<std::string>> extreme_texts(Workspace& ws) {
    const auto& binning = ws.binning();
    const auto k = ws.config().extreme_bins;
    std::vector<std::string> high, low;
    for (const auto& m : binning.members()) {
        const auto* p = ws.corpus().find(m.doc_id);
        if (!p) continue;
        if (binning.in_top(m.bin, k)) high.push_back(p->title + "\n" + p->abstract);
        if (binning.in_bottom(m.bin, k)) low.push_back(p->title + "\n" + p->abstract);
    }
    return {high, low};
}

} // namespace detail

inline void run_word_ratio(Workspace& ws) {
    const auto& cfg = ws.config();
    const auto [high, low] = detail::extreme_texts(ws);
    std::vector<analysis::TermSet> sets;
    for (const auto& path : cfg.term_sets) {
        auto in = Workspace::open_input(path);
        const auto terms = analysis::read_term_list(in);
        sets.push_back({std::filesystem::path(path).stem().string(), {terms.begin(), terms.end()}});
    }
    const auto result = analysis::word_ratio_analysis(high, low, cfg.word_min_count, sets);
    {
        auto out = ws.output("word_ratio.csv");
        io::CsvWriter csv(out, {"word", "count_high", "count_low", "freq_high", "freq_low", "r", "display_value",
                                "orientation"});
        for (const auto& r : result.ratios) {
            csv.cell(r.word).cell(r.count_high).cell(r.count_low).cell(r.freq_high).cell(r.freq_low).cell(r.r);
            csv.cell(r.display_value).cell(analysis::to_string(r.orientation));
            csv.end_row();
        }
    }
    if (!result.term_sets) return;
    const auto& t = *result.term_sets;
    {
        auto out = ws.output("word_ratio_terms.csv");
        io::CsvWriter csv(out, {"term_set", "count_high", "count_low", "residual_high", "residual_low"});
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            csv.cell(t.rows[i]).cell(t.counts[i][0]).cell(t.counts[i][1]);
            csv.cell(t.result.residuals[i][0]).cell(t.result.residuals[i][1]);
            csv.end_row();
        }
    }
    auto out = ws.output("word_ratio_tests.csv");
    io::CsvWriter csv(out, tests_header());
    detail::test_row(csv, "term_sets", t.result.test);
}

inline void run_uncertainty(Workspace& ws) {
    const auto& cfg = ws.config();
    const auto& binning = ws.binning();
    std::vector<std::string> lexicon = analysis::default_uncertainty_lexicon();
    if (!cfg.lexicon.empty()) {
        auto in = Workspace::open_input(cfg.lexicon);
        lexicon = analysis::read_term_list(in);
    }
    std::vector<std::string> high, low;
    for (const auto& bundle : ws.reviews()) {
        const auto bin = binning.bin_of(bundle.doc_id);
        if (!bin) continue;
        if (binning.in_top(*bin, cfg.extreme_bins)) {
            high.insert(high.end(), bundle.comments.begin(), bundle.comments.end());
        } else if (binning.in_bottom(*bin, cfg.extreme_bins)) {
            low.insert(low.end(), bundle.comments.begin(), bundle.comments.end());
        }
    }
    const auto r = analysis::uncertainty_word_rate(high, low, lexicon);
    {
        auto out = ws.output("uncertainty.csv");
        io::CsvWriter csv(out, {"word", "count_high", "count_low", "rate_high", "rate_low"});
        for (const auto& [word, counts] : r.per_word) {
            csv.cell(word).cell(counts.first).cell(counts.second);
            csv.cell(static_cast<double>(counts.first) / static_cast<double>(r.tokens_high));
            csv.cell(static_cast<double>(counts.second) / static_cast<double>(r.tokens_low));
            csv.end_row();
        }
        csv.cell("ALL").cell(r.hits_high).cell(r.hits_low).cell(r.rate_high()).cell(r.rate_low());
        csv.end_row();
    }
    auto out = ws.output("uncertainty_tests.csv");
    io::CsvWriter csv(out, tests_header());
    detail::test_row(csv, "uncertainty_words", r.test.test);
}

inline void run_groups(Workspace& ws) {
    const auto& cfg = ws.config();
    const auto& binning = ws.binning();
    std::unordered_map<std::string, std::vector<std::string>> labels;
    for (const auto& m : binning.members()) {
        const auto* p = ws.corpus().find(m.doc_id);
        if (!p) continue;
        auto& l = labels[m.doc_id];
        if (cfg.group_by == "funders") {
            l.assign(p->funders.begin(), p->funders.end());
        } else if (cfg.group_by == "doc_type") {
            l.emplace_back(corpus::to_string(p->doc_type));
        } else if (cfg.group_by == "retracted") {
            if (p->retracted) l.emplace_back("retracted");
        } else if (!p->journal_id.empty()) {
            l.push_back(p->journal_id);
        }
    }
    const auto g = analysis::group_profiles(binning, labels);
    for (const auto& s : g.skipped) ws.log() << "groups: label '" << s << "' has fewer than 2 papers; skipped\n";
    {
        auto out = ws.output("groups.csv");
        io::CsvWriter csv(out, {"label", "papers", "bin", "share"});
        for (const auto& p : g.labels) {
            for (std::size_t b = 0; b < p.shares.size(); ++b) {
                csv.cell(p.label).cell(p.papers).cell(b + 1).cell(p.shares[b]);
                csv.end_row();
            }
        }
    }
    auto out = ws.output("groups_tests.csv");
    io::CsvWriter csv(out, tests_header());
    for (const auto& p : g.labels) {
        if (p.logistic) {
            detail::fit_rows(csv, p.label, "logistic", *p.logistic);
        } else {
            ws.log() << "groups: logistic regression for '" << p.label << "' skipped (" << p.logistic_note << ")\n";
        }
        if (p.mann_whitney) detail::test_row(csv, p.label, *p.mann_whitney);
    }
}

inline void run_interdisciplinarity(Workspace& ws) {
    const auto p = analysis::interdisciplinarity_profile(ws.corpus(), ws.citations(), ws.binning());
    if (p.unusable_links) {
        ws.log() << "interdisciplinarity: " << p.unusable_links << " link(s) to unknown papers ignored\n";
    }
    if (p.ungrouped_links) {
        ws.log() << "interdisciplinarity: " << p.ungrouped_links << " link(s) to papers without field groups counted as intra\n";
    }
    if (p.zero_intra_offsets) {
        ws.log() << "interdisciplinarity: " << p.zero_intra_offsets << " paper(s) with no intra references use offset log(0.5)\n";
    }
    {
        auto out = ws.output("interdisciplinarity.csv");
        io::CsvWriter csv(out, {"bin", "ref_inter", "ref_intra", "ref_ratio", "cit_inter", "cit_intra", "cit_ratio"});
        for (const auto& b : p.bins) {
            csv.cell(b.bin + 1).cell(b.references.inter).cell(b.references.intra).cell(b.references.ratio());
            csv.cell(b.citations.inter).cell(b.citations.intra).cell(b.citations.ratio());
            csv.end_row();
        }
    }
    auto out = ws.output("interdisciplinarity_tests.csv");
    io::CsvWriter csv(out, tests_header());
    if (p.references_fit) {
        detail::fit_rows(csv, "references", "negbin", *p.references_fit);
    } else {
        ws.log() << "interdisciplinarity: references fit skipped (" << p.references_note << ")\n";
    }
    if (p.citations_fit) {
        detail::fit_rows(csv, "citations", "negbin", *p.citations_fit);
    } else {
        ws.log() << "interdisciplinarity: citations fit skipped (" << p.citations_note << ")\n";
    }
    std::vector<double> ratios;
    for (const auto& b : p.bins) ratios.push_back(b.references.ratio().value_or(0.0));
    detail::maybe_line_chart(ws, "interdisciplinarity.svg", "Inter / intra references", "ratio", ratios);
}

inline void run_reference_age(Workspace& ws) {
    const auto p = analysis::reference_age_profile(ws.corpus(), ws.citations(), ws.binning(), &ws.jif());
    if (p.unresolved) ws.log() << "reference-age: " << p.unresolved << " unresolved reference(s) excluded\n";
    auto out = ws.output("reference_age.csv");
    io::CsvWriter csv(out, {"bin", "references", "mean_age", "mean_popularity", "with_jif", "mean_jif"});
    for (const auto& b : p.bins) {
        csv.cell(b.bin + 1).cell(b.references).cell(b.mean_age).cell(b.mean_popularity).cell(b.with_jif).cell(b.mean_jif);
        csv.end_row();
    }
}

inline void run_jif_citation(Workspace& ws) {
    const auto& cfg = ws.config();
    const auto p = analysis::jif_citation_by_bin(ws.binning(), analysis::paper_jif(ws.corpus(), ws.jif()),
                                                 analysis::citation_counts(ws.corpus(), ws.citations()),
                                                 cfg.lowess_frac);
    if (p.omitted_bins) ws.log() << "jif-citation: " << p.omitted_bins << " bin(s) without JIF omitted\n";
    {
        auto out = ws.output("jif_citation.csv");
        io::CsvWriter csv(out, {"bin", "n", "mean_jif", "mean_citations", "pearson_r", "r_squared", "p_value"});
        for (const auto& b : p.bins) {
            csv.cell(b.bin + 1).cell(b.n).cell(b.mean_jif).cell(b.mean_citations);
            if (b.pearson) {
                csv.cell(b.pearson->statistic).cell(b.r_squared).cell(b.pearson->p_value);
            }
            csv.end_row();
        }
    }
    {
        auto out = ws.output("jif_citation_lowess.csv");
        io::CsvWriter csv(out, {"bin", "jif", "citations_smoothed"});
        for (const auto& b : p.bins) {
            for (const auto& pt : b.lowess) {
                csv.cell(b.bin + 1).cell(pt.x).cell(pt.y);
                csv.end_row();
            }
        }
    }
    auto out = ws.output("jif_citation_tests.csv");
    io::CsvWriter csv(out, tests_header());
    if (p.quadratic) detail::fit_rows(csv, "citations", "ols", *p.quadratic);
    std::vector<double> jifs;
    for (const auto& b : p.bins) jifs.push_back(b.mean_jif);
    if (p.omitted_bins == 0) detail::maybe_line_chart(ws, "jif_citation.svg", "Mean journal JIF", "JIF", jifs);
}

inline void run_skewness(Workspace& ws) {
    std::vector<double> ppl;
    for (const auto& [id, s] : ws.scores()) ppl.push_back(s);
    auto out = ws.output("skewness_tests.csv");
    io::CsvWriter csv(out, tests_header());
    detail::test_row(csv, "perplexity", stats::skewness_z(ppl));
    detail::value_row(csv, "perplexity", "skewness", "n", static_cast<double>(ppl.size()));
}

inline void run_stability(Workspace& ws) {
    const auto& cfg = ws.config();
    std::vector<std::string> ids;
    for (const auto& [id, s] : ws.scores()) ids.push_back(id);
    Rng rng(derive_seed(cfg.seed, 3));
    for (std::size_t i = 0; i < ids.size() && i < cfg.stability_sample; ++i) {
        std::swap(ids[i], ids[i + rng.below(ids.size() - i)]);
    }
    ids.resize(std::min(ids.size(), cfg.stability_sample));
    std::vector<corpus::PaperRecord> sample;
    for (const auto& id : ids) {
        if (const auto* p = ws.corpus().find(id)) sample.push_back(*p);
    }
    const auto curve = lm::synonym_stability(ws.model(), sample, ws.synonyms(), cfg.stability_max_k,
                                             cfg.stability_reps, derive_seed(cfg.seed, 4));
    if (curve.skipped) ws.log() << "stability: " << curve.skipped << " document repetition(s) without a synonym skipped\n";
    {
        auto out = ws.output("stability.csv");
        io::CsvWriter csv(out, {"k", "observations", "mean_abs_delta"});
        for (std::size_t i = 0; i < curve.k.size(); ++i) {
            csv.cell(curve.k[i]).cell(curve.observations[i]).cell(curve.mean_abs_delta[i]);
            csv.end_row();
        }
    }
    auto out = ws.output("stability_tests.csv");
    io::CsvWriter csv(out, tests_header());
    if (curve.quadratic) detail::fit_rows(csv, "abs_delta", "ols", *curve.quadratic);
    detail::value_row(csv, "perplexity", "reference", "sd", curve.reference_sd);
    detail::value_row(csv, "abs_delta", "skipped", "document_repetitions", static_cast<double>(curve.skipped));
}

struct Pipeline {
    const char* name;
    const char* description;
    std::function<void(Workspace&)> run;
    bool needs_reviews = false;
    bool needs_model = false;
};

inline const std::vector<Pipeline>& pipelines() {
    static const std::vector<Pipeline> all{
        {"jif", "two-year journal impact factors", run_jif},
        {"venue", "shares of papers in top/bottom-JIF journals per bin", run_venue},
        {"extreme-share", "shares of extreme acceptance delays per bin", run_extreme_share, true},
        {"review", "rating disparity, mean rating and confidence per paper and bin", run_review, true},
        {"dispersion", "per-bin SD and heteroskedasticity tests of review values", run_dispersion, true},
        {"word-ratio", "word frequency ratios between top and bottom bins", run_word_ratio},
        {"uncertainty", "uncertainty-word rate in review comments", run_uncertainty, true},
        {"groups", "per-label bin shares and tests", run_groups},
        {"interdisciplinarity", "inter/intra reference and citation ratios", run_interdisciplinarity},
        {"reference-age", "reference age, popularity and JIF per bin", run_reference_age},
        {"jif-citation", "JIF and citations per bin with quadratic fit", run_jif_citation},
        {"skewness", "skewness test of the perplexity distribution", run_skewness},
        {"stability", "synonym-replacement stability curve", run_stability, false, true},
    };
    return all;
}

inline const Pipeline* find_pipeline(const std::string& name) {
    for (const auto& p : pipelines()) {
        if (name == p.name) return &p;
    }
    return nullptr;
}

inline std::string pipeline_names() {
    std::string out;
    for (const auto& p : pipelines()) {
        if (!out.empty()) out += ", ";
        out += p.name;
    }
    return out;
}

} // namespace surprise::cli
