/* C interface to the summarization library.
 *
 * Every function that can fail returns a vnsum_status; VNSUM_OK means
 * success.  On failure, vnsum_last_error() returns a thread-local
 * human-readable message describing what went wrong.  Strings returned
 * through char** out-parameters are heap-allocated and must be released
 * with vnsum_string_free().
 */
#ifndef VNSUM_H
#define VNSUM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define VNSUM_API __declspec(dllexport)
#else
#define VNSUM_API __attribute__((visibility("default")))
#endif

typedef enum vnsum_status {
    VNSUM_OK = 0,
    VNSUM_ERR_INVALID_ARGUMENT = 1,
    VNSUM_ERR_IO = 2,
    VNSUM_ERR_PARSE = 3,
    VNSUM_ERR_MISSING_ROOT = 4,
    VNSUM_ERR_EMPTY_CLUSTER = 5,
    VNSUM_ERR_NO_REFERENCE = 6,
    VNSUM_ERR_ENCODING = 7,
    VNSUM_ERR_EMPTY_AFTER_PREPROCESS = 8,
    VNSUM_ERR_PROVIDER_FAILURE = 9,
    VNSUM_ERR_ZERO_VECTOR = 10,
    VNSUM_ERR_DIM_MISMATCH = 11,
    VNSUM_ERR_MISSING_KEY = 12,
    VNSUM_ERR_EMPTY_TOKENS = 13,
    VNSUM_ERR_ZERO_NORM = 14,
    VNSUM_ERR_LENGTH_MISMATCH = 15,
    VNSUM_ERR_ALPHA_OUT_OF_RANGE = 16,
    VNSUM_ERR_K_TOO_LARGE = 17,
    VNSUM_ERR_EMPTY_EXTRACT = 18,
    VNSUM_ERR_ENDPOINT_UNREACHABLE = 19,
    VNSUM_ERR_BAD_RESPONSE = 20,
    VNSUM_ERR_RETRIES_EXHAUSTED = 21,
    VNSUM_ERR_EMPTY_REFERENCE = 22,
    VNSUM_ERR_DUPLICATE_ALPHA = 23,
    /* The run finished and produced a report, but at least one cluster
     * failed; the out-parameter is still populated. */
    VNSUM_ERR_PARTIAL_FAILURE = 100,
    VNSUM_ERR_INTERNAL = 101
} vnsum_status;

/* Opaque handle over a loaded corpus. */
typedef struct vnsum_corpus vnsum_corpus;

VNSUM_API const char* vnsum_version(void);

/* Thread-local message from the most recent failing call; empty string
 * when the last call on this thread succeeded. */
VNSUM_API const char* vnsum_last_error(void);

/* Stable name for a status value, e.g. "AlphaOutOfRange". */
VNSUM_API const char* vnsum_status_name(vnsum_status status);

/* Loads a corpus from a directory tree (one subdirectory per cluster,
 * "*.ref.txt" files are references). */
VNSUM_API vnsum_status vnsum_corpus_open(const char* root_dir,
                                         vnsum_corpus** out);

/* Parses a corpus from its JSON serialization. */
VNSUM_API vnsum_status vnsum_corpus_parse_json(const char* json_text,
                                               vnsum_corpus** out);

VNSUM_API size_t vnsum_corpus_cluster_count(const vnsum_corpus* corpus);

/* Serializes the corpus to canonical JSON. */
VNSUM_API vnsum_status vnsum_corpus_to_json(const vnsum_corpus* corpus,
                                            char** out_json);

/* Structural validation; *out_json receives a JSON array of findings
 * (empty array when the corpus is clean). */
VNSUM_API vnsum_status vnsum_corpus_validate(const vnsum_corpus* corpus,
                                             char** out_json);

VNSUM_API void vnsum_corpus_free(vnsum_corpus* corpus);

/* Runs the full pipeline.  options_json may be NULL or "{}" for defaults;
 * recognized keys: alpha, k_max, seed, kmeans_restarts, embedder
 * ("hash" | "remote" | "precomputed"), hash_dim, embed_url, vectors_path,
 * extractive_only, llm_url, llm_token, llm_model, prompt {system, template,
 * max_output_tokens, temperature}, norm {lowercase, strip_symbols,
 * strip_non_alnum}, abbreviations [..], lexicon_path, output_dir, workers,
 * embed_retry / llm_retry {max_attempts, initial_delay_ms, multiplier}.
 * *out_report_json receives the run report; when output_dir is set the
 * summaries/ and scores.json files are written under it. */
VNSUM_API vnsum_status vnsum_summarize(const vnsum_corpus* corpus,
                                       const char* options_json,
                                       char** out_report_json);

/* Renders the per-cluster score table of a run report produced by
 * vnsum_summarize.  format: "markdown", "csv" or "json". */
VNSUM_API vnsum_status vnsum_render_report(const char* report_json,
                                           const char* format,
                                           char** out_text);

/* One extractive-only run per alpha.  options_json follows vnsum_summarize
 * plus "alphas": [..] (default {0.1..0.5}) and "format" for the rendered
 * table returned in *out_text.  When output_dir is set, sweep.md and
 * sweep.csv are written under it. */
VNSUM_API vnsum_status vnsum_sweep(const vnsum_corpus* corpus,
                                   const char* options_json, char** out_text);

/* Scores one candidate text against reference texts.  options_json may
 * carry norm / abbreviations / lexicon_path.  *out_json receives
 * {"r1": {"p", "r", "f1"}, "r2": ..., "rl": ...} as fractions in [0, 1]. */
VNSUM_API vnsum_status vnsum_score(const char* candidate,
                                   const char* const* references,
                                   size_t reference_count,
                                   const char* options_json, char** out_json);

/* Renders the baseline-comparison table.  baselines_json is the content of
 * a baselines file (NULL for the built-in rows); report_json is a run
 * report whose mean scores become the "Our model" row (NULL for a
 * baselines-only table). */
VNSUM_API vnsum_status vnsum_compare_baselines(const char* baselines_json,
                                               const char* report_json,
                                               char** out_markdown);

VNSUM_API void vnsum_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* VNSUM_H */
