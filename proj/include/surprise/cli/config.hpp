#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "surprise/corpus/types.hpp"

namespace surprise::cli {

/// Bad flags, bad configuration or missing inputs; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* config_env_var = "SURPRISE_CONFIG";

struct ConfigKey {
    const char* name;
    const char* default_value;
    const char* help;
};

inline const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys{
        {"papers", "", "papers.jsonl to ingest"},
        {"reviews", "", "reviews.jsonl"},
        {"corpus", "", "corpus snapshot written by ingest"},
        {"train", "", "papers file to train the n-gram model on (default: corpus)"},
        {"model", "", "trained n-gram model file"},
        {"logprobs", "", "logprobs.jsonl with externally computed token log-probabilities"},
        {"scores", "", "scores.csv written by score or import-logprobs"},
        {"synonyms", "", "synonyms.tsv for the stability pipeline"},
        {"lexicon", "", "uncertainty lexicon, one term per line"},
        {"term-sets", "", "comma-separated term-set files for word-ratio"},
        {"model-id", "ngram", "model id attached to scores, and selected from scores.csv"},
        {"cutoff", "", "knowledge cutoff YYYY-MM or YYYY-MM-DD; only later papers are scored"},
        {"bins", "10", "number of perplexity bins"},
        {"variance-bins", "20", "quantile bins for the binned-variance regression"},
        {"extreme-bins", "3", "bins pooled at each end for top-vs-bottom tests"},
        {"jif-extreme", "0.05", "fraction of journals in each JIF extreme"},
        {"delay-extreme", "0.10", "fraction of papers in each acceptance-delay extreme"},
        {"jif-year", "", "JIF target year (default: latest publication year)"},
        {"order", "3", "n-gram order"},
        {"discount", "0.75", "Kneser-Ney discount"},
        {"min-count", "2", "training frequency below which tokens become <unk>"},
        {"word-min-count", "20", "minimum count per group for word ratios"},
        {"fixed-effects", "none", "dummy block in the venue and delay logistic fits: none, month, field"},
        {"group-by", "funders", "label for the groups pipeline: funders, doc_type, retracted, journal"},
        {"dispersion-value", "rating", "value for the dispersion pipeline: rating, confidence, disparity"},
        {"lowess-frac", "0.6667", "LOWESS span for jif-citation"},
        {"bootstrap", "1000", "bootstrap resamples for chart bands"},
        {"stability-max-k", "5", "largest number of replaced words"},
        {"stability-reps", "10", "repetitions per document"},
        {"stability-sample", "1000", "documents sampled for the stability pipeline"},
        {"seed", "42", "seed for every stochastic step"},
        {"svg", "false", "also write SVG charts"},
        {"out", ".", "output directory"},
    };
    return keys;
}

/// Parses flat `key = value` text. '#' starts a comment line; keys may use
/// '_' or '-'.
inline std::map<std::string, std::string> parse_config(std::istream& in, const std::string& source = "config") {
    std::map<std::string, std::string> out;
    std::string line;
    int line_no = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw UsageError(source + ":" + std::to_string(line_no) + ": expected key = value");
        }
        auto key = trim(body.substr(0, eq));
        for (auto& c : key) {
            if (c == '_') c = '-';
        }
        bool known = false;
        for (const auto& k : config_keys()) known = known || key == k.name;
        if (!known) throw UsageError(source + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        out[key] = trim(body.substr(eq + 1));
    }
    return out;
}

struct RunConfig {
    std::string papers, reviews, corpus, train, model, logprobs, scores, synonyms, lexicon;
    std::vector<std::string> term_sets;
    std::string model_id = "ngram";
    /// True when model-id was given rather than defaulted.
    bool model_id_explicit = false;
    std::optional<corpus::Date> cutoff;
    std::size_t bins = 10;
    std::size_t variance_bins = 20;
    std::size_t extreme_bins = 3;
    double jif_extreme = 0.05;
    double delay_extreme = 0.10;
    std::optional<int> jif_year;
    int order = 3;
    double discount = 0.75;
    std::size_t min_count = 2;
    std::size_t word_min_count = 20;
    std::string fixed_effects = "none";
    std::string group_by = "funders";
    std::string dispersion_value = "rating";
    double lowess_frac = 0.6667;
    std::size_t bootstrap = 1000;
    int stability_max_k = 5;
    int stability_reps = 10;
    std::size_t stability_sample = 1000;
    std::uint64_t seed = 42;
    bool svg = false;
    std::filesystem::path out = ".";
};

namespace detail {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        T v{};
        if constexpr (std::is_floating_point_v<T>) {
            v = static_cast<T>(std::stod(value, &used));
        } else if constexpr (std::is_signed_v<T>) {
            v = static_cast<T>(std::stoll(value, &used));
        } else {
            if (!value.empty() && value[0] == '-') throw std::invalid_argument(value);
            v = static_cast<T>(std::stoull(value, &used));
        }
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::logic_error&) {
        throw UsageError("invalid value for " + key + ": '" + value + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no" || value.empty()) return false;
    throw UsageError("invalid value for " + key + ": '" + value + "'");
}

inline void check_path(const std::string& key, const std::string& path) {
    if (!path.empty() && !std::filesystem::exists(path)) throw UsageError(key + ": no such file: " + path);
}

} // namespace detail

/// Builds a RunConfig from defaults, then `values` (file merged with flags).
/// Every non-empty input path must exist.
inline RunConfig make_config(const std::map<std::string, std::string>& values) {
    std::map<std::string, std::string> v;
    for (const auto& k : config_keys()) v[k.name] = k.default_value;
    for (const auto& [key, value] : values) v[key] = value;

    RunConfig c;
    c.papers = v["papers"];
    c.reviews = v["reviews"];
    c.corpus = v["corpus"];
    c.train = v["train"];
    c.model = v["model"];
    c.logprobs = v["logprobs"];
    c.scores = v["scores"];
    c.synonyms = v["synonyms"];
    c.lexicon = v["lexicon"];
    for (const char* key : {"papers", "reviews", "corpus", "train", "model", "logprobs", "scores", "synonyms", "lexicon"}) {
        detail::check_path(key, v[key]);
    }
    std::string list = v["term-sets"];
    for (std::size_t start = 0; start < list.size();) {
        auto end = list.find(',', start);
        if (end == std::string::npos) end = list.size();
        if (end > start) {
            c.term_sets.push_back(list.substr(start, end - start));
            detail::check_path("term-sets", c.term_sets.back());
        }
        start = end + 1;
    }
    c.model_id = v["model-id"];
    c.model_id_explicit = values.count("model-id") > 0;
    if (c.model_id.empty()) throw UsageError("model-id must not be empty");
    if (!v["cutoff"].empty()) {
        c.cutoff = corpus::parse_cutoff(v["cutoff"]);
        if (!c.cutoff) throw UsageError("invalid cutoff date: '" + v["cutoff"] + "'");
    }
    c.bins = detail::parse_number<std::size_t>("bins", v["bins"]);
    c.variance_bins = detail::parse_number<std::size_t>("variance-bins", v["variance-bins"]);
    c.extreme_bins = detail::parse_number<std::size_t>("extreme-bins", v["extreme-bins"]);
    if (c.bins < 2) throw UsageError("bins must be at least 2");
    if (c.variance_bins < 3) throw UsageError("variance-bins must be at least 3");
    if (c.extreme_bins < 1 || 2 * c.extreme_bins > c.bins) throw UsageError("extreme-bins must lie in [1, bins / 2]");
    c.jif_extreme = detail::parse_number<double>("jif-extreme", v["jif-extreme"]);
    c.delay_extreme = detail::parse_number<double>("delay-extreme", v["delay-extreme"]);
    if (!(c.jif_extreme > 0.0 && c.jif_extreme <= 0.5)) throw UsageError("jif-extreme must lie in (0, 0.5]");
    if (!(c.delay_extreme > 0.0 && c.delay_extreme <= 0.5)) throw UsageError("delay-extreme must lie in (0, 0.5]");
    if (!v["jif-year"].empty()) c.jif_year = detail::parse_number<int>("jif-year", v["jif-year"]);
    c.order = detail::parse_number<int>("order", v["order"]);
    c.discount = detail::parse_number<double>("discount", v["discount"]);
    c.min_count = detail::parse_number<std::size_t>("min-count", v["min-count"]);
    if (c.order < 1) throw UsageError("order must be at least 1");
    if (!(c.discount > 0.0 && c.discount < 1.0)) throw UsageError("discount must lie in (0, 1)");
    c.word_min_count = detail::parse_number<std::size_t>("word-min-count", v["word-min-count"]);
    c.fixed_effects = v["fixed-effects"];
    if (c.fixed_effects != "none" && c.fixed_effects != "month" && c.fixed_effects != "field") {
        throw UsageError("fixed-effects must be one of none, month, field");
    }
    c.group_by = v["group-by"];
    if (c.group_by != "funders" && c.group_by != "doc_type" && c.group_by != "retracted" && c.group_by != "journal") {
        throw UsageError("group-by must be one of funders, doc_type, retracted, journal");
    }
    c.dispersion_value = v["dispersion-value"];
    if (c.dispersion_value != "rating" && c.dispersion_value != "confidence" && c.dispersion_value != "disparity") {
        throw UsageError("dispersion-value must be one of rating, confidence, disparity");
    }
    c.lowess_frac = detail::parse_number<double>("lowess-frac", v["lowess-frac"]);
    if (!(c.lowess_frac > 0.0 && c.lowess_frac <= 1.0)) throw UsageError("lowess-frac must lie in (0, 1]");
    c.bootstrap = detail::parse_number<std::size_t>("bootstrap", v["bootstrap"]);
    if (c.bootstrap < 100) throw UsageError("bootstrap must be at least 100");
    c.stability_max_k = detail::parse_number<int>("stability-max-k", v["stability-max-k"]);
    c.stability_reps = detail::parse_number<int>("stability-reps", v["stability-reps"]);
    c.stability_sample = detail::parse_number<std::size_t>("stability-sample", v["stability-sample"]);
    if (c.stability_max_k < 1 || c.stability_reps < 1) throw UsageError("stability-max-k and stability-reps must be >= 1");
    c.seed = detail::parse_number<std::uint64_t>("seed", v["seed"]);
    c.svg = detail::parse_bool("svg", v["svg"]);
    c.out = v["out"].empty() ? "." : v["out"];
    return c;
}

/// Reads a config file; a missing file is a usage error naming the path.
inline std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config: cannot read " + path);
    return parse_config(in, path);
}

} // namespace surprise::cli
