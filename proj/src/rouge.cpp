#include "vnsum/rouge.hpp"

#include <algorithm>

#include "vnsum/error.hpp"

namespace vnsum {

namespace {

double f1_of(double precision, double recall) {
    if (precision + recall <= 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

RougeScore mean_component_wise(const std::vector<RougeScore>& scores,
                               const std::string& variant) {
    RougeScore mean;
    mean.variant = variant;
    if (scores.empty()) return mean;
    for (const auto& s : scores) {
        mean.precision += s.precision;
        mean.recall += s.recall;
        mean.f1 += s.f1;
    }
    const auto n = static_cast<double>(scores.size());
    mean.precision /= n;
    mean.recall /= n;
    mean.f1 /= n;
    return mean;
}

}  // namespace

ScoreTable make_score_table(
    std::vector<std::pair<std::string, RougeTriple>> per_cluster) {
    ScoreTable table;
    table.per_cluster = std::move(per_cluster);
    table.cluster_count = table.per_cluster.size();
    std::vector<RougeScore> r1s, r2s, rls;
    for (const auto& [id, triple] : table.per_cluster) {
        r1s.push_back(triple.r1);
        r2s.push_back(triple.r2);
        rls.push_back(triple.rl);
    }
    table.mean.r1 = mean_component_wise(r1s, "R1");
    table.mean.r2 = mean_component_wise(r2s, "R2");
    table.mean.rl = mean_component_wise(rls, "RL");
    return table;
}

std::map<std::vector<std::string>, int> ngrams(
    const std::vector<std::string>& tokens, int n) {
    if (n < 1) raise(Errc::invalid_argument, "n-gram order must be >= 1");
    std::map<std::vector<std::string>, int> counts;
    if (tokens.size() < static_cast<std::size_t>(n)) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        counts[std::vector<std::string>(tokens.begin() + i,
                                        tokens.begin() + i + n)] += 1;
    }
    return counts;
}

RougeScore rouge_n(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, int n) {
    const auto cand_grams = ngrams(candidate, n);
    const auto ref_grams = ngrams(reference, n);

    long long overlap = 0;
    for (const auto& [gram, count] : cand_grams) {
        const auto it = ref_grams.find(gram);
        if (it != ref_grams.end()) {
            overlap += std::min(count, it->second);
        }
    }
    long long cand_total = 0;
    for (const auto& [gram, count] : cand_grams) cand_total += count;
    long long ref_total = 0;
    for (const auto& [gram, count] : ref_grams) ref_total += count;

    RougeScore score;
    score.variant = "R" + std::to_string(n);
    score.precision = cand_total > 0
                          ? static_cast<double>(overlap) / cand_total
                          : 0.0;
    score.recall =
        ref_total > 0 ? static_cast<double>(overlap) / ref_total : 0.0;
    score.f1 = f1_of(score.precision, score.recall);
    return score;
}

std::size_t lcs_len(const std::vector<std::string>& a,
                    const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1]) {
                cur[j] = prev[j - 1] + 1;
            } else {
                cur[j] = std::max(prev[j], cur[j - 1]);
            }
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

RougeScore rouge_l(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference) {
    const auto lcs = static_cast<double>(lcs_len(candidate, reference));
    RougeScore score;
    score.variant = "RL";
    score.precision =
        candidate.empty() ? 0.0 : lcs / static_cast<double>(candidate.size());
    score.recall =
        reference.empty() ? 0.0 : lcs / static_cast<double>(reference.size());
    score.f1 = f1_of(score.precision, score.recall);
    return score;
}

std::vector<std::string> score_tokens(const std::string& raw_text,
                                      const ScoringConfig& cfg) {
    std::vector<std::string> tokens;
    const std::string normalized = normalize(raw_text, cfg.norm);
    for (const auto& sentence :
         split_sentences(normalized, cfg.abbreviations)) {
        auto sentence_tokens = tokenize(sentence, cfg.lexicon);
        tokens.insert(tokens.end(),
                      std::make_move_iterator(sentence_tokens.begin()),
                      std::make_move_iterator(sentence_tokens.end()));
    }
    return tokens;
}

RougeTriple score_cluster(const std::string& candidate,
                          const std::vector<std::string>& references,
                          const ScoringConfig& cfg) {
    if (references.empty()) {
        raise(Errc::empty_reference, "scoring requires at least one reference");
    }
    const auto cand_tokens = score_tokens(candidate, cfg);
    std::vector<RougeScore> r1s, r2s, rls;
    for (const auto& reference : references) {
        const auto ref_tokens = score_tokens(reference, cfg);
        r1s.push_back(rouge_n(cand_tokens, ref_tokens, 1));
        r2s.push_back(rouge_n(cand_tokens, ref_tokens, 2));
        rls.push_back(rouge_l(cand_tokens, ref_tokens));
    }
    RougeTriple triple;
    triple.r1 = mean_component_wise(r1s, "R1");
    triple.r2 = mean_component_wise(r2s, "R2");
    triple.rl = mean_component_wise(rls, "RL");
    return triple;
}

}  // namespace vnsum
