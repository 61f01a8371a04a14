#include "vnsum/vnsum.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vnsum/corpus.hpp"
#include "vnsum/error.hpp"
#include "vnsum/harness.hpp"
#include "vnsum/rouge.hpp"

namespace {

thread_local std::string g_last_error;

vnsum_status status_of(vnsum::Errc code) {
    using vnsum::Errc;
    switch (code) {
        case Errc::invalid_argument: return VNSUM_ERR_INVALID_ARGUMENT;
        case Errc::io: return VNSUM_ERR_IO;
        case Errc::parse: return VNSUM_ERR_PARSE;
        case Errc::missing_root: return VNSUM_ERR_MISSING_ROOT;
        case Errc::empty_cluster: return VNSUM_ERR_EMPTY_CLUSTER;
        case Errc::no_reference: return VNSUM_ERR_NO_REFERENCE;
        case Errc::encoding: return VNSUM_ERR_ENCODING;
        case Errc::empty_after_preprocess:
            return VNSUM_ERR_EMPTY_AFTER_PREPROCESS;
        case Errc::provider_failure: return VNSUM_ERR_PROVIDER_FAILURE;
        case Errc::zero_vector: return VNSUM_ERR_ZERO_VECTOR;
        case Errc::dim_mismatch: return VNSUM_ERR_DIM_MISMATCH;
        case Errc::missing_key: return VNSUM_ERR_MISSING_KEY;
        case Errc::empty_tokens: return VNSUM_ERR_EMPTY_TOKENS;
        case Errc::zero_norm: return VNSUM_ERR_ZERO_NORM;
        case Errc::length_mismatch: return VNSUM_ERR_LENGTH_MISMATCH;
        case Errc::alpha_out_of_range: return VNSUM_ERR_ALPHA_OUT_OF_RANGE;
        case Errc::k_too_large: return VNSUM_ERR_K_TOO_LARGE;
        case Errc::empty_extract: return VNSUM_ERR_EMPTY_EXTRACT;
        case Errc::endpoint_unreachable: return VNSUM_ERR_ENDPOINT_UNREACHABLE;
        case Errc::bad_response: return VNSUM_ERR_BAD_RESPONSE;
        case Errc::retries_exhausted: return VNSUM_ERR_RETRIES_EXHAUSTED;
        case Errc::empty_reference: return VNSUM_ERR_EMPTY_REFERENCE;
        case Errc::duplicate_alpha: return VNSUM_ERR_DUPLICATE_ALPHA;
    }
    return VNSUM_ERR_INTERNAL;
}

char* alloc_string(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (out == nullptr) return nullptr;
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

vnsum_status set_output(char** out, const std::string& text) {
    *out = alloc_string(text);
    if (*out == nullptr) {
        g_last_error = "out of memory";
        return VNSUM_ERR_INTERNAL;
    }
    return VNSUM_OK;
}

// Runs fn, translating exceptions into status codes + g_last_error.
template <typename Fn>
vnsum_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const vnsum::Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return VNSUM_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return VNSUM_ERR_INTERNAL;
    }
}

void require(bool condition, const char* message) {
    if (!condition) vnsum::raise(vnsum::Errc::invalid_argument, message);
}

nlohmann::json parse_options(const char* options_json) {
    if (options_json == nullptr || *options_json == '\0') {
        return nlohmann::json::object();
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(options_json);
    } catch (const nlohmann::json::exception& e) {
        vnsum::raise(vnsum::Errc::parse,
                     std::string("options: ") + e.what());
    }
    if (!doc.is_object()) {
        vnsum::raise(vnsum::Errc::invalid_argument,
                     "options must be a JSON object");
    }
    return doc;
}

void check_keys(const nlohmann::json& obj,
                const std::vector<std::string>& allowed,
                const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            vnsum::raise(vnsum::Errc::invalid_argument,
                         "unknown " + where + " key: " + key);
        }
    }
}

vnsum::NormConfig parse_norm(const nlohmann::json& obj) {
    check_keys(obj, {"lowercase", "strip_symbols", "strip_non_alnum"}, "norm");
    vnsum::NormConfig norm;
    norm.lowercase = obj.value("lowercase", norm.lowercase);
    norm.strip_symbols = obj.value("strip_symbols", norm.strip_symbols);
    norm.strip_non_alnum = obj.value("strip_non_alnum", norm.strip_non_alnum);
    return norm;
}

vnsum::RetryPolicy parse_retry(const nlohmann::json& obj,
                               vnsum::RetryPolicy base) {
    check_keys(obj, {"max_attempts", "initial_delay_ms", "multiplier"},
               "retry");
    base.max_attempts = obj.value("max_attempts", base.max_attempts);
    if (obj.contains("initial_delay_ms")) {
        base.initial_delay =
            std::chrono::milliseconds(obj["initial_delay_ms"].get<long>());
    }
    base.multiplier = obj.value("multiplier", base.multiplier);
    return base;
}

vnsum::EmbedderKind parse_embedder(const std::string& name) {
    if (name == "hash") return vnsum::EmbedderKind::hash;
    if (name == "remote") return vnsum::EmbedderKind::remote;
    if (name == "precomputed") return vnsum::EmbedderKind::precomputed;
    vnsum::raise(vnsum::Errc::invalid_argument,
                 "unknown embedder: " + name +
                     " (expected hash, remote or precomputed)");
}

vnsum::TableFormat parse_format(const std::string& name) {
    if (name == "markdown") return vnsum::TableFormat::markdown;
    if (name == "csv") return vnsum::TableFormat::csv;
    if (name == "json") return vnsum::TableFormat::json;
    vnsum::raise(vnsum::Errc::invalid_argument,
                 "unknown format: " + name +
                     " (expected markdown, csv or json)");
}

const std::vector<std::string>& run_config_keys() {
    static const std::vector<std::string> keys = {
        "alpha",       "k_max",       "seed",        "kmeans_restarts",
        "embedder",    "hash_dim",    "embed_url",   "vectors_path",
        "extractive_only", "llm_url", "llm_token",   "llm_model",
        "prompt",      "norm",        "abbreviations", "lexicon_path",
        "output_dir",  "workers",     "embed_retry", "llm_retry"};
    return keys;
}

vnsum::RunConfig parse_run_config(const nlohmann::json& obj) {
    vnsum::RunConfig cfg;
    cfg.alpha = obj.value("alpha", cfg.alpha);
    cfg.k_max = obj.value("k_max", cfg.k_max);
    cfg.seed = obj.value("seed", cfg.seed);
    cfg.kmeans_restarts = obj.value("kmeans_restarts", cfg.kmeans_restarts);
    if (obj.contains("embedder")) {
        cfg.embedder = parse_embedder(obj["embedder"].get<std::string>());
    }
    cfg.hash_dim = obj.value("hash_dim", cfg.hash_dim);
    cfg.embed_url = obj.value("embed_url", cfg.embed_url);
    cfg.vectors_path = obj.value("vectors_path", cfg.vectors_path);
    cfg.extractive_only = obj.value("extractive_only", cfg.extractive_only);
    cfg.llm_url = obj.value("llm_url", cfg.llm_url);
    cfg.llm_token = obj.value("llm_token", cfg.llm_token);
    cfg.llm_model = obj.value("llm_model", cfg.llm_model);
    if (obj.contains("prompt")) {
        const auto& jp = obj["prompt"];
        check_keys(jp, {"system", "template", "max_output_tokens",
                        "temperature"},
                   "prompt");
        cfg.prompt.system_text = jp.value("system", cfg.prompt.system_text);
        cfg.prompt.user_template =
            jp.value("template", cfg.prompt.user_template);
        cfg.prompt.max_output_tokens =
            jp.value("max_output_tokens", cfg.prompt.max_output_tokens);
        cfg.prompt.temperature = jp.value("temperature", cfg.prompt.temperature);
    }
    if (obj.contains("norm")) cfg.norm = parse_norm(obj["norm"]);
    if (obj.contains("abbreviations")) {
        cfg.abbreviations =
            obj["abbreviations"].get<std::vector<std::string>>();
    }
    cfg.lexicon_path = obj.value("lexicon_path", cfg.lexicon_path);
    cfg.output_dir = obj.value("output_dir", cfg.output_dir);
    cfg.workers = obj.value("workers", cfg.workers);
    if (obj.contains("embed_retry")) {
        cfg.embed_retry = parse_retry(obj["embed_retry"], cfg.embed_retry);
    }
    if (obj.contains("llm_retry")) {
        cfg.llm_retry = parse_retry(obj["llm_retry"], cfg.llm_retry);
    }
    return cfg;
}

nlohmann::ordered_json score_json(const vnsum::RougeScore& s) {
    nlohmann::ordered_json j;
    j["p"] = s.precision;
    j["r"] = s.recall;
    j["f1"] = s.f1;
    return j;
}

}  // namespace

extern "C" {

const char* vnsum_version(void) { return "1.0.0"; }

const char* vnsum_last_error(void) { return g_last_error.c_str(); }

const char* vnsum_status_name(vnsum_status status) {
    switch (status) {
        case VNSUM_OK: return "Ok";
        case VNSUM_ERR_PARTIAL_FAILURE: return "PartialFailure";
        case VNSUM_ERR_INTERNAL: return "Internal";
        default: break;
    }
    if (status >= VNSUM_ERR_INVALID_ARGUMENT &&
        status <= VNSUM_ERR_DUPLICATE_ALPHA) {
        return vnsum::errc_name(static_cast<vnsum::Errc>(status - 1));
    }
    return "Unknown";
}

vnsum_status vnsum_corpus_open(const char* root_dir, vnsum_corpus** out) {
    return guarded([&]() -> vnsum_status {
        require(root_dir != nullptr, "root_dir is null");
        require(out != nullptr, "out is null");
        auto corpus = std::make_unique<vnsum::Corpus>(
            vnsum::load_corpus(root_dir));
        *out = reinterpret_cast<vnsum_corpus*>(corpus.release());
        return VNSUM_OK;
    });
}

vnsum_status vnsum_corpus_parse_json(const char* json_text,
                                     vnsum_corpus** out) {
    return guarded([&]() -> vnsum_status {
        require(json_text != nullptr, "json_text is null");
        require(out != nullptr, "out is null");
        auto corpus = std::make_unique<vnsum::Corpus>(
            vnsum::parse_corpus_json(json_text));
        *out = reinterpret_cast<vnsum_corpus*>(corpus.release());
        return VNSUM_OK;
    });
}

size_t vnsum_corpus_cluster_count(const vnsum_corpus* corpus) {
    if (corpus == nullptr) return 0;
    return reinterpret_cast<const vnsum::Corpus*>(corpus)->clusters.size();
}

vnsum_status vnsum_corpus_to_json(const vnsum_corpus* corpus,
                                  char** out_json) {
    return guarded([&]() -> vnsum_status {
        require(corpus != nullptr, "corpus is null");
        require(out_json != nullptr, "out_json is null");
        const auto* c = reinterpret_cast<const vnsum::Corpus*>(corpus);
        return set_output(out_json, vnsum::corpus_to_json(*c));
    });
}

vnsum_status vnsum_corpus_validate(const vnsum_corpus* corpus,
                                   char** out_json) {
    return guarded([&]() -> vnsum_status {
        require(corpus != nullptr, "corpus is null");
        require(out_json != nullptr, "out_json is null");
        const auto* c = reinterpret_cast<const vnsum::Corpus*>(corpus);
        const auto findings = vnsum::validate_corpus(*c);
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& finding : findings) {
            nlohmann::ordered_json jf;
            jf["cluster_id"] = finding.cluster_id;
            jf["rule"] = finding.rule;
            jf["detail"] = finding.detail;
            j.push_back(std::move(jf));
        }
        return set_output(out_json, j.dump(2) + "\n");
    });
}

void vnsum_corpus_free(vnsum_corpus* corpus) {
    delete reinterpret_cast<vnsum::Corpus*>(corpus);
}

vnsum_status vnsum_summarize(const vnsum_corpus* corpus,
                             const char* options_json,
                             char** out_report_json) {
    return guarded([&]() -> vnsum_status {
        require(corpus != nullptr, "corpus is null");
        require(out_report_json != nullptr, "out_report_json is null");
        const auto obj = parse_options(options_json);
        check_keys(obj, run_config_keys(), "options");
        const vnsum::RunConfig cfg = parse_run_config(obj);
        const auto* c = reinterpret_cast<const vnsum::Corpus*>(corpus);
        const vnsum::RunReport report = vnsum::run_pipeline(*c, cfg);
        const vnsum_status status = set_output(
            out_report_json, vnsum::run_report_json(report));
        if (status != VNSUM_OK) return status;
        if (report.failed > 0) {
            g_last_error = std::to_string(report.failed) + " of " +
                           std::to_string(report.clusters.size()) +
                           " clusters failed";
            return VNSUM_ERR_PARTIAL_FAILURE;
        }
        return VNSUM_OK;
    });
}

vnsum_status vnsum_render_report(const char* report_json, const char* format,
                                 char** out_text) {
    return guarded([&]() -> vnsum_status {
        require(report_json != nullptr, "report_json is null");
        require(out_text != nullptr, "out_text is null");
        const vnsum::TableFormat table_format =
            parse_format(format != nullptr ? format : "markdown");
        const vnsum::ScoreTable table =
            vnsum::score_table_from_report_json(report_json);
        return set_output(out_text, vnsum::render_scores(table, table_format));
    });
}

vnsum_status vnsum_sweep(const vnsum_corpus* corpus, const char* options_json,
                         char** out_text) {
    return guarded([&]() -> vnsum_status {
        require(corpus != nullptr, "corpus is null");
        require(out_text != nullptr, "out_text is null");
        const auto obj = parse_options(options_json);
        auto allowed = run_config_keys();
        allowed.push_back("alphas");
        allowed.push_back("format");
        check_keys(obj, allowed, "options");
        const vnsum::RunConfig cfg = parse_run_config(obj);
        const std::vector<double> alphas =
            obj.contains("alphas")
                ? obj["alphas"].get<std::vector<double>>()
                : vnsum::default_sweep_alphas();
        const vnsum::TableFormat format =
            parse_format(obj.value("format", std::string("markdown")));
        const auto* c = reinterpret_cast<const vnsum::Corpus*>(corpus);
        const vnsum::SweepReport report = vnsum::sweep_alpha(*c, alphas, cfg);
        if (!cfg.output_dir.empty()) {
            vnsum::write_sweep_outputs(report, cfg.output_dir);
        }
        const vnsum_status status =
            set_output(out_text, vnsum::render_sweep(report, format));
        if (status != VNSUM_OK) return status;
        std::size_t failed = 0;
        for (const auto& row : report.rows) failed += row.failed_clusters;
        if (failed > 0) {
            g_last_error = std::to_string(failed) +
                           " cluster runs failed across the sweep";
            return VNSUM_ERR_PARTIAL_FAILURE;
        }
        return VNSUM_OK;
    });
}

vnsum_status vnsum_score(const char* candidate, const char* const* references,
                         size_t reference_count, const char* options_json,
                         char** out_json) {
    return guarded([&]() -> vnsum_status {
        require(candidate != nullptr, "candidate is null");
        require(references != nullptr || reference_count == 0,
                "references is null");
        require(out_json != nullptr, "out_json is null");
        const auto obj = parse_options(options_json);
        check_keys(obj, {"norm", "abbreviations", "lexicon_path"}, "options");
        vnsum::ScoringConfig scoring;
        if (obj.contains("norm")) scoring.norm = parse_norm(obj["norm"]);
        if (obj.contains("abbreviations")) {
            scoring.abbreviations =
                obj["abbreviations"].get<std::vector<std::string>>();
        }
        std::optional<vnsum::Lexicon> lexicon;
        if (obj.contains("lexicon_path")) {
            lexicon.emplace(vnsum::load_lexicon_file(
                obj["lexicon_path"].get<std::string>()));
            scoring.lexicon = &*lexicon;
        }
        std::vector<std::string> refs;
        refs.reserve(reference_count);
        for (size_t i = 0; i < reference_count; ++i) {
            require(references[i] != nullptr, "reference text is null");
            refs.emplace_back(references[i]);
        }
        const vnsum::RougeTriple triple =
            vnsum::score_cluster(candidate, refs, scoring);
        nlohmann::ordered_json j;
        j["r1"] = score_json(triple.r1);
        j["r2"] = score_json(triple.r2);
        j["rl"] = score_json(triple.rl);
        return set_output(out_json, j.dump(2) + "\n");
    });
}

vnsum_status vnsum_compare_baselines(const char* baselines_json,
                                     const char* report_json,
                                     char** out_markdown) {
    return guarded([&]() -> vnsum_status {
        require(out_markdown != nullptr, "out_markdown is null");
        const std::vector<vnsum::BaselineRow> baselines =
            baselines_json != nullptr
                ? vnsum::parse_baselines(baselines_json, "baselines")
                : vnsum::builtin_baselines();
        std::optional<vnsum::ScoreTable> ours;
        if (report_json != nullptr) {
            ours = vnsum::score_table_from_report_json(report_json);
        }
        return set_output(out_markdown,
                          vnsum::compare_baselines(
                              baselines, ours ? &*ours : nullptr));
    });
}

void vnsum_string_free(char* text) { std::free(text); }

}  // extern "C"
