// Command-line front end: ingest, summarize, score, sweep, compare.
// All engine work goes through the C API in vnsum/vnsum.h; this file only
// parses flags, shuttles JSON and maps statuses to exit codes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vnsum/vnsum.h"

namespace {

struct CorpusDeleter {
    void operator()(vnsum_corpus* corpus) const { vnsum_corpus_free(corpus); }
};
using CorpusPtr = std::unique_ptr<vnsum_corpus, CorpusDeleter>;

struct StringDeleter {
    void operator()(char* text) const { vnsum_string_free(text); }
};
using CString = std::unique_ptr<char, StringDeleter>;

// Exit codes: 0 full success, 1 runtime/partial failure, 2 usage error.
int exit_code_for(vnsum_status status) {
    switch (status) {
        case VNSUM_OK:
            return 0;
        case VNSUM_ERR_INVALID_ARGUMENT:
        case VNSUM_ERR_ALPHA_OUT_OF_RANGE:
        case VNSUM_ERR_DUPLICATE_ALPHA:
            return 2;
        default:
            return 1;
    }
}

int report_failure(vnsum_status status, const std::string& detail) {
    std::cerr << "error: " << detail << "\n";
    return exit_code_for(status);
}

bool slurp(const std::string& path, std::string& out, std::string& error) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        error = "cannot read file: " + path;
        return false;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    out = buffer.str();
    return true;
}

bool ends_with(const std::string& text, const std::string& suffix) {
    return text.size() >= suffix.size() &&
           text.compare(text.size() - suffix.size(), suffix.size(), suffix) ==
               0;
}

// Directory corpora come from vnsum_corpus_open; *.json files are parsed.
CorpusPtr open_corpus(const std::string& path, vnsum_status& status,
                      std::string& error) {
    vnsum_corpus* raw = nullptr;
    if (ends_with(path, ".json")) {
        std::string text;
        if (!slurp(path, text, error)) {
            status = VNSUM_ERR_IO;
            return nullptr;
        }
        status = vnsum_corpus_parse_json(text.c_str(), &raw);
    } else {
        status = vnsum_corpus_open(path.c_str(), &raw);
    }
    if (status != VNSUM_OK) {
        error = vnsum_last_error();
        return nullptr;
    }
    return CorpusPtr(raw);
}

// Flags shared by `summarize` and `sweep`, mirroring the engine options.
struct RunFlags {
    std::string corpus;
    double alpha = 0.2;
    int k_max = 10;
    std::uint64_t seed = 42;
    int restarts = 5;
    std::string embedder = "hash";
    std::size_t hash_dim = 64;
    std::string embed_url;
    std::string vectors;
    bool extractive_only = false;
    std::string llm_url;
    std::string llm_token;
    std::string llm_model = "vbd-llama2-7b-50b";
    bool keep_case = false;
    std::string strip_symbols = "%;:";
    bool keep_non_alnum = false;
    std::string abbrev_file;
    std::string lexicon;
    std::string out_dir = ".";
    int workers = 0;
    std::string format = "markdown";
};

void add_corpus_flag(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--corpus", f.corpus,
                    "Corpus directory or corpus JSON file")
        ->required()
        ->check(CLI::ExistingPath);
}

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_alpha) {
    if (with_alpha) {
        cmd->add_option("--alpha", f.alpha,
                        "Fraction of similarity columns kept, in (0, 1]")
            ->capture_default_str();
    }
    cmd->add_option("--k-max", f.k_max, "Largest k probed by the elbow scan")
        ->capture_default_str();
    cmd->add_option("--seed", f.seed, "Random seed for clustering")
        ->capture_default_str();
    cmd->add_option("--restarts", f.restarts, "k-means restarts per k")
        ->capture_default_str();
    cmd->add_option("--embedder", f.embedder,
                    "Sentence embedder: hash, remote or precomputed")
        ->check(CLI::IsMember({"hash", "remote", "precomputed"}))
        ->capture_default_str();
    cmd->add_option("--hash-dim", f.hash_dim,
                    "Vector width of the hash embedder")
        ->capture_default_str();
    cmd->add_option("--embed-url", f.embed_url,
                    "Remote embedding endpoint")
        ->envname("EMBED_URL");
    cmd->add_option("--vectors", f.vectors,
                    "Precomputed-vector JSONL file");
    cmd->add_flag("--extractive-only", f.extractive_only,
                  "Skip the LLM rewrite and score the extractive picks");
    cmd->add_option("--llm-url", f.llm_url, "Chat-completion endpoint")
        ->envname("LLM_URL");
    cmd->add_option("--llm-token", f.llm_token,
                    "Bearer token for the LLM endpoint")
        ->envname("LLM_TOKEN");
    cmd->add_option("--llm-model", f.llm_model, "Model name sent to the LLM")
        ->capture_default_str();
    cmd->add_flag("--keep-case", f.keep_case,
                  "Skip lowercasing during normalization");
    cmd->add_option("--strip-symbols", f.strip_symbols,
                    "Symbols removed during normalization")
        ->capture_default_str();
    cmd->add_flag("--keep-non-alnum", f.keep_non_alnum,
                  "Keep characters outside letters/digits/punctuation");
    cmd->add_option("--abbrev-file", f.abbrev_file,
                    "File with one protected abbreviation per line")
        ->check(CLI::ExistingFile);
    cmd->add_option("--lexicon", f.lexicon,
                    "Multi-syllable lexicon for word segmentation")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", f.out_dir, "Directory for output files")
        ->capture_default_str();
    cmd->add_option("--workers", f.workers,
                    "Concurrent clusters (0 = logical CPUs, capped at 8)")
        ->capture_default_str();
    cmd->add_option("--format", f.format,
                    "Table format for standard output")
        ->check(CLI::IsMember({"markdown", "csv", "json"}))
        ->capture_default_str();
}

bool read_abbreviations(const std::string& path, nlohmann::json& out,
                        std::string& error) {
    std::string text;
    if (!slurp(path, text, error)) return false;
    out = nlohmann::json::array();
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    return true;
}

bool build_options(const RunFlags& f, nlohmann::json& options,
                   std::string& error) {
    options = nlohmann::json::object();
    options["alpha"] = f.alpha;
    options["k_max"] = f.k_max;
    options["seed"] = f.seed;
    options["kmeans_restarts"] = f.restarts;
    options["embedder"] = f.embedder;
    options["hash_dim"] = f.hash_dim;
    if (!f.embed_url.empty()) options["embed_url"] = f.embed_url;
    if (!f.vectors.empty()) options["vectors_path"] = f.vectors;
    options["extractive_only"] = f.extractive_only;
    if (!f.llm_url.empty()) options["llm_url"] = f.llm_url;
    if (!f.llm_token.empty()) options["llm_token"] = f.llm_token;
    options["llm_model"] = f.llm_model;
    options["norm"] = {{"lowercase", !f.keep_case},
                       {"strip_symbols", f.strip_symbols},
                       {"strip_non_alnum", !f.keep_non_alnum}};
    if (!f.abbrev_file.empty()) {
        nlohmann::json abbreviations;
        if (!read_abbreviations(f.abbrev_file, abbreviations, error)) {
            return false;
        }
        options["abbreviations"] = abbreviations;
    }
    if (!f.lexicon.empty()) options["lexicon_path"] = f.lexicon;
    if (!f.out_dir.empty()) options["output_dir"] = f.out_dir;
    options["workers"] = f.workers;
    return true;
}

int run_summarize(const RunFlags& f) {
    std::string error;
    vnsum_status status = VNSUM_OK;
    const CorpusPtr corpus = open_corpus(f.corpus, status, error);
    if (!corpus) return report_failure(status, error);

    nlohmann::json options;
    if (!build_options(f, options, error)) {
        return report_failure(VNSUM_ERR_IO, error);
    }
    std::cerr << "summarize: corpus=" << f.corpus << " alpha=" << f.alpha
              << " seed=" << f.seed << " embedder=" << f.embedder
              << " clusters=" << vnsum_corpus_cluster_count(corpus.get())
              << "\n";

    char* report_raw = nullptr;
    status = vnsum_summarize(corpus.get(), options.dump().c_str(),
                             &report_raw);
    const CString report(report_raw);
    const std::string status_error = vnsum_last_error();
    if (status != VNSUM_OK && status != VNSUM_ERR_PARTIAL_FAILURE) {
        return report_failure(status, status_error);
    }

    char* table_raw = nullptr;
    const vnsum_status render_status =
        vnsum_render_report(report.get(), f.format.c_str(), &table_raw);
    const CString table(table_raw);
    if (render_status != VNSUM_OK) {
        return report_failure(render_status, vnsum_last_error());
    }
    std::cout << table.get();
    if (status == VNSUM_ERR_PARTIAL_FAILURE) {
        std::cerr << "warning: " << status_error << "\n";
        return 1;
    }
    return 0;
}

int run_sweep(const RunFlags& f, const std::vector<double>& alphas) {
    std::string error;
    vnsum_status status = VNSUM_OK;
    const CorpusPtr corpus = open_corpus(f.corpus, status, error);
    if (!corpus) return report_failure(status, error);

    nlohmann::json options;
    if (!build_options(f, options, error)) {
        return report_failure(VNSUM_ERR_IO, error);
    }
    if (!alphas.empty()) options["alphas"] = alphas;
    options["format"] = f.format;
    options.erase("alpha");  // the sweep grid replaces the single alpha
    options["extractive_only"] = true;

    std::cerr << "sweep: corpus=" << f.corpus << " seed=" << f.seed
              << " embedder=" << f.embedder << " alphas=";
    const auto grid = alphas.empty()
                          ? std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5}
                          : alphas;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::cerr << (i > 0 ? "," : "") << grid[i];
    }
    std::cerr << "\n";

    char* table_raw = nullptr;
    status = vnsum_sweep(corpus.get(), options.dump().c_str(), &table_raw);
    const CString table(table_raw);
    const std::string status_error = vnsum_last_error();
    if (status != VNSUM_OK && status != VNSUM_ERR_PARTIAL_FAILURE) {
        return report_failure(status, status_error);
    }
    std::cout << table.get();
    if (status == VNSUM_ERR_PARTIAL_FAILURE) {
        std::cerr << "warning: " << status_error << "\n";
        return 1;
    }
    return 0;
}

// Rounds every score component to 4 decimals for human consumption.
std::string humanize_scores(const std::string& raw_json) {
    auto parsed = nlohmann::ordered_json::parse(raw_json);
    for (auto& [variant, scores] : parsed.items()) {
        (void)variant;
        for (auto& [component, value] : scores.items()) {
            (void)component;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4f", value.get<double>());
            value = std::stod(buf);
        }
    }
    return parsed.dump(2) + "\n";
}

int run_score(const std::string& candidate_path,
              const std::vector<std::string>& reference_paths,
              const std::string& abbrev_file, const std::string& lexicon,
              bool raw) {
    std::string error;
    std::string candidate;
    if (!slurp(candidate_path, candidate, error)) {
        return report_failure(VNSUM_ERR_IO, error);
    }
    std::vector<std::string> references;
    for (const auto& path : reference_paths) {
        std::string text;
        if (!slurp(path, text, error)) {
            return report_failure(VNSUM_ERR_IO, error);
        }
        references.push_back(std::move(text));
    }
    std::vector<const char*> reference_ptrs;
    for (const auto& text : references) {
        reference_ptrs.push_back(text.c_str());
    }

    nlohmann::json options = nlohmann::json::object();
    if (!abbrev_file.empty()) {
        nlohmann::json abbreviations;
        if (!read_abbreviations(abbrev_file, abbreviations, error)) {
            return report_failure(VNSUM_ERR_IO, error);
        }
        options["abbreviations"] = abbreviations;
    }
    if (!lexicon.empty()) options["lexicon_path"] = lexicon;

    char* scores_raw = nullptr;
    const vnsum_status status = vnsum_score(
        candidate.c_str(), reference_ptrs.data(), reference_ptrs.size(),
        options.dump().c_str(), &scores_raw);
    const CString scores(scores_raw);
    if (status != VNSUM_OK) {
        return report_failure(status, vnsum_last_error());
    }
    std::cout << (raw ? std::string(scores.get())
                      : humanize_scores(scores.get()));
    return 0;
}

int run_compare(const std::string& baselines_path,
                const std::string& report_path) {
    std::string error;
    std::string baselines_text;
    if (!baselines_path.empty() &&
        !slurp(baselines_path, baselines_text, error)) {
        return report_failure(VNSUM_ERR_IO, error);
    }
    std::string report_text;
    if (!report_path.empty() && !slurp(report_path, report_text, error)) {
        return report_failure(VNSUM_ERR_IO, error);
    }

    char* table_raw = nullptr;
    const vnsum_status status = vnsum_compare_baselines(
        baselines_path.empty() ? nullptr : baselines_text.c_str(),
        report_path.empty() ? nullptr : report_text.c_str(), &table_raw);
    const CString table(table_raw);
    if (status != VNSUM_OK) {
        return report_failure(status, vnsum_last_error());
    }
    std::cout << table.get();
    return 0;
}

int run_validate(const std::string& corpus_path) {
    std::string error;
    vnsum_status status = VNSUM_OK;
    const CorpusPtr corpus = open_corpus(corpus_path, status, error);
    if (!corpus) return report_failure(status, error);

    char* findings_raw = nullptr;
    status = vnsum_corpus_validate(corpus.get(), &findings_raw);
    const CString findings(findings_raw);
    if (status != VNSUM_OK) {
        return report_failure(status, vnsum_last_error());
    }
    std::cout << findings.get();
    const auto parsed = nlohmann::json::parse(findings.get());
    return parsed.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vietnamese multi-document summarization toolkit"};
    app.name("vnsum");  // keeps help text independent of the invocation path
    app.set_version_flag("--version", vnsum_version());
    app.set_config("--config", "",
                   "Read flags from a TOML-style key=value file");
    app.require_subcommand(1);

    RunFlags summarize_flags;
    CLI::App* summarize =
        app.add_subcommand("summarize",
                           "Summarize every cluster of a corpus and score "
                           "the results");
    add_corpus_flag(summarize, summarize_flags);
    add_run_flags(summarize, summarize_flags, true);

    RunFlags sweep_flags;
    std::vector<double> sweep_alphas;
    CLI::App* sweep = app.add_subcommand(
        "sweep", "Run an extractive-only alpha sweep and tabulate scores");
    add_corpus_flag(sweep, sweep_flags);
    sweep->add_option("--alphas", sweep_alphas,
                      "Comma-separated alpha grid (default 0.1,...,0.5)")
        ->delimiter(',');
    add_run_flags(sweep, sweep_flags, false);

    std::string score_candidate;
    std::vector<std::string> score_references;
    std::string score_abbrev_file;
    std::string score_lexicon;
    bool score_raw = false;
    CLI::App* score = app.add_subcommand(
        "score", "Score a candidate text against reference summaries");
    score->add_option("--candidate", score_candidate, "Candidate text file")
        ->required()
        ->check(CLI::ExistingFile);
    score
        ->add_option("--reference", score_references,
                     "Reference text file (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    score
        ->add_option("--abbrev-file", score_abbrev_file,
                     "File with one protected abbreviation per line")
        ->check(CLI::ExistingFile);
    score
        ->add_option("--lexicon", score_lexicon,
                     "Multi-syllable lexicon for word segmentation")
        ->check(CLI::ExistingFile);
    score->add_flag("--raw", score_raw,
                    "Print full-precision scores instead of 4 decimals");

    std::string compare_baselines_path;
    std::string compare_report_path;
    CLI::App* compare = app.add_subcommand(
        "compare", "Render published baselines next to a run's mean scores");
    compare
        ->add_option("--baselines", compare_baselines_path,
                     "Baselines JSON file (default: built-in rows)")
        ->check(CLI::ExistingFile);
    compare
        ->add_option("--report", compare_report_path,
                     "scores.json from a previous run (adds the Our row)")
        ->check(CLI::ExistingFile);

    std::string validate_corpus_path;
    CLI::App* validate = app.add_subcommand(
        "validate", "Check a corpus for structural problems");
    validate
        ->add_option("--corpus", validate_corpus_path,
                     "Corpus directory or corpus JSON file")
        ->required()
        ->check(CLI::ExistingPath);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (summarize->parsed()) return run_summarize(summarize_flags);
    if (sweep->parsed()) return run_sweep(sweep_flags, sweep_alphas);
    if (score->parsed()) {
        return run_score(score_candidate, score_references, score_abbrev_file,
                         score_lexicon, score_raw);
    }
    if (compare->parsed()) {
        return run_compare(compare_baselines_path, compare_report_path);
    }
    if (validate->parsed()) return run_validate(validate_corpus_path);
    return 2;
}
