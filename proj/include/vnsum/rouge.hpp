#pragma once

#include <map>
#include <string>
#include <vector>

#include "vnsum/preprocess.hpp"

namespace vnsum {

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::string variant;  // "R1", "R2", "RL", ...

    friend bool operator==(const RougeScore&, const RougeScore&) = default;
};

// Scores for the three reported variants.
struct RougeTriple {
    RougeScore r1;
    RougeScore r2;
    RougeScore rl;

    friend bool operator==(const RougeTriple&, const RougeTriple&) = default;
};

// Per-cluster scores plus their component-wise arithmetic mean.
struct ScoreTable {
    std::vector<std::pair<std::string, RougeTriple>> per_cluster;
    RougeTriple mean;
    std::size_t cluster_count = 0;
};

ScoreTable make_score_table(
    std::vector<std::pair<std::string, RougeTriple>> per_cluster);

// All contiguous n-grams with multiplicity; empty when |tokens| < n.
std::map<std::vector<std::string>, int> ngrams(
    const std::vector<std::string>& tokens, int n);

// Clipped n-gram overlap: precision over candidate n-grams, recall over
// reference n-grams, F1 the harmonic mean. Zero denominators score 0.
RougeScore rouge_n(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, int n);

std::size_t lcs_len(const std::vector<std::string>& a,
                    const std::vector<std::string>& b);

// Summary-level longest common subsequence over the full token sequences.
RougeScore rouge_l(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference);

// Tokenization used for scoring; identical to the summarization pipeline's
// normalize -> sentence split -> tokenize path.
struct ScoringConfig {
    NormConfig norm{};
    std::vector<std::string> abbreviations = default_abbreviations();
    const Lexicon* lexicon = nullptr;
};

std::vector<std::string> score_tokens(const std::string& raw_text,
                                      const ScoringConfig& cfg);

// Scores a candidate against every reference and averages component-wise.
RougeTriple score_cluster(const std::string& candidate,
                          const std::vector<std::string>& references,
                          const ScoringConfig& cfg = {});

}  // namespace vnsum
