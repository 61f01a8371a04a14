#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vnsum/abstract.hpp"
#include "vnsum/corpus.hpp"
#include "vnsum/embed.hpp"
#include "vnsum/rouge.hpp"

namespace vnsum {

enum class EmbedderKind { hash, remote, precomputed };

const char* embedder_kind_name(EmbedderKind kind);

struct RunConfig {
    double alpha = 0.2;
    int k_max = 10;
    std::uint64_t seed = 42;
    int kmeans_restarts = 5;

    EmbedderKind embedder = EmbedderKind::hash;
    std::size_t hash_dim = 64;
    std::string embed_url;     // remote embedder endpoint
    std::string vectors_path;  // precomputed-vector JSONL file

    // When no LLM endpoint is configured (flag, config and environment all
    // empty) the run falls back to extractive-only output.
    bool extractive_only = false;
    std::string llm_url;
    std::string llm_token;
    std::string llm_model = "vbd-llama2-7b-50b";
    PromptSpec prompt = default_prompt_spec();

    NormConfig norm{};
    std::vector<std::string> abbreviations = default_abbreviations();
    std::string lexicon_path;

    std::string output_dir;  // empty = do not write files
    int workers = 0;         // 0 = min(logical CPUs, 8)

    RetryPolicy embed_retry{3, std::chrono::milliseconds(500), 2.0};
    RetryPolicy llm_retry{4, std::chrono::milliseconds(1000), 2.0};
};

// Fills environment-driven defaults (LLM_URL, LLM_TOKEN, EMBED_URL), resolves
// the extractive-only fallback and worker count, and validates invariants
// (alpha in (0,1] -> AlphaOutOfRange; k_max >= 2 -> InvalidArgument).
RunConfig finalize_config(RunConfig cfg);

struct ClusterOutcome {
    std::string cluster_id;
    bool ok = false;
    std::string error;           // failure text when !ok
    std::string extractive_text; // picks joined with ". "
    std::string summary_text;    // text that was scored and written
    std::string model_name;      // abstractive runs only
    int k = 0;
    std::size_t sentence_count = 0;
    RougeTriple scores;
};

struct RunReport {
    double alpha = 0.0;
    std::uint64_t seed = 0;
    bool extractive_only = true;
    std::string embedder_name;
    std::vector<ClusterOutcome> clusters;  // sorted by cluster_id
    ScoreTable scores;                     // successful clusters only
    std::size_t failed = 0;
};

// Runs preprocess -> embed -> similarity -> feature select -> elbow/k-means
// -> medoid selection -> optional LLM rewrite -> scoring for every cluster.
// Cluster failures are recorded in the report instead of aborting the run.
// When cfg.output_dir is set, writes summaries/<cluster_id>.txt and
// scores.json beneath it.
RunReport run_pipeline(const Corpus& corpus, const RunConfig& cfg);

std::string run_report_json(const RunReport& report);
void write_run_outputs(const RunReport& report, const std::string& out_dir);

struct SweepRow {
    double alpha = 0.0;
    RougeTriple scores;
    std::size_t failed_clusters = 0;
};

struct SweepReport {
    std::vector<SweepRow> rows;  // sorted by alpha ascending
    // Column key ("r1_p", ..., "rl_f1") -> index of the best row; ties
    // resolve toward the smaller alpha.
    std::map<std::string, std::size_t> best_rows;
};

// Column keys in rendering order.
const std::array<std::string, 9>& sweep_columns();

// Sorts rows, rejects duplicate alphas and computes best-per-column markers.
SweepReport make_sweep_report(std::vector<SweepRow> rows);

const std::vector<double>& default_sweep_alphas();  // {0.1 ... 0.5}

// One extractive-only run per alpha over the same corpus and seed.
SweepReport sweep_alpha(const Corpus& corpus, const std::vector<double>& alphas,
                        const RunConfig& base_cfg);

enum class TableFormat { markdown, csv, json };

// Percentages carry one decimal (paper style); markdown bolds the best cell
// per column whenever the table has at least two data rows.
std::string render_sweep(const SweepReport& report, TableFormat format);
std::string render_scores(const ScoreTable& table, TableFormat format);

void write_sweep_outputs(const SweepReport& report, const std::string& out_dir);

// Published baseline scores, stored as percentages; absent cells were not
// reported by the source. Column order matches sweep_columns() without alpha:
// R1 P/R/F1, R2 P/R/F1, RL P/R/F1.
struct BaselineRow {
    std::string label;
    std::string citation;
    std::array<std::optional<double>, 9> cells;

    friend bool operator==(const BaselineRow&, const BaselineRow&) = default;
};

const std::vector<BaselineRow>& builtin_baselines();
// origin names the source (a path, "<memory>", ...) in error messages.
std::vector<BaselineRow> parse_baselines(const std::string& json_text,
                                         const std::string& origin);
std::vector<BaselineRow> load_baselines(const std::string& path);

// Rebuilds the per-cluster score table from run_report_json output
// (successful clusters only).
ScoreTable score_table_from_report_json(const std::string& report_json);

// Markdown comparison of baseline rows and (optionally) our mean scores.
// Baseline numbers are reported values from their sources, never recomputed.
std::string compare_baselines(const std::vector<BaselineRow>& baselines,
                              const ScoreTable* ours);

}  // namespace vnsum
