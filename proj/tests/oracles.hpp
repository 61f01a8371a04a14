// Independent reference implementations used to cross-check the library.
// These deliberately use different algorithms from src/ (naive scans, a
// memoized recursive LCS, long-double accumulation) so agreement is
// meaningful.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct Pr {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

inline double f1_of(double p, double r) {
    return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

// Clipped n-gram overlap by naive enumeration: for every candidate n-gram,
// consume a matching reference n-gram if one is still unused.
inline Pr brute_rouge_n(const std::vector<std::string>& cand,
                        const std::vector<std::string>& ref, int n) {
    const std::size_t un = static_cast<std::size_t>(n);
    std::vector<std::vector<std::string>> cand_grams;
    for (std::size_t i = 0; i + un <= cand.size(); ++i) {
        cand_grams.emplace_back(cand.begin() + i, cand.begin() + i + un);
    }
    std::vector<std::vector<std::string>> ref_grams;
    for (std::size_t i = 0; i + un <= ref.size(); ++i) {
        ref_grams.emplace_back(ref.begin() + i, ref.begin() + i + un);
    }
    std::vector<bool> used(ref_grams.size(), false);
    std::size_t overlap = 0;
    for (const auto& gram : cand_grams) {
        for (std::size_t j = 0; j < ref_grams.size(); ++j) {
            if (!used[j] && ref_grams[j] == gram) {
                used[j] = true;
                overlap += 1;
                break;
            }
        }
    }
    Pr out;
    out.precision = cand_grams.empty()
                        ? 0.0
                        : static_cast<double>(overlap) / cand_grams.size();
    out.recall = ref_grams.empty()
                     ? 0.0
                     : static_cast<double>(overlap) / ref_grams.size();
    out.f1 = f1_of(out.precision, out.recall);
    return out;
}

namespace detail {
inline std::size_t lcs_rec(const std::vector<std::string>& a,
                           const std::vector<std::string>& b, std::size_t i,
                           std::size_t j,
                           std::map<std::pair<std::size_t, std::size_t>,
                                    std::size_t>& memo) {
    if (i == a.size() || j == b.size()) return 0;
    const auto key = std::make_pair(i, j);
    const auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::size_t best;
    if (a[i] == b[j]) {
        best = 1 + lcs_rec(a, b, i + 1, j + 1, memo);
    } else {
        best = std::max(lcs_rec(a, b, i + 1, j, memo),
                        lcs_rec(a, b, i, j + 1, memo));
    }
    memo.emplace(key, best);
    return best;
}
}  // namespace detail

inline std::size_t brute_lcs(const std::vector<std::string>& a,
                             const std::vector<std::string>& b) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    return detail::lcs_rec(a, b, 0, 0, memo);
}

inline Pr brute_rouge_l(const std::vector<std::string>& cand,
                        const std::vector<std::string>& ref) {
    const auto lcs = static_cast<double>(brute_lcs(cand, ref));
    Pr out;
    out.precision = cand.empty() ? 0.0 : lcs / static_cast<double>(cand.size());
    out.recall = ref.empty() ? 0.0 : lcs / static_cast<double>(ref.size());
    out.f1 = f1_of(out.precision, out.recall);
    return out;
}

// Cosine with long-double accumulation, one fused loop.
inline double brute_cosine(const std::vector<double>& u,
                           const std::vector<double>& v) {
    long double dot = 0.0L;
    long double nu = 0.0L;
    long double nv = 0.0L;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += static_cast<long double>(u[i]) * v[i];
        nu += static_cast<long double>(u[i]) * u[i];
        nv += static_cast<long double>(v[i]) * v[i];
    }
    return static_cast<double>(dot / (sqrtl(nu) * sqrtl(nv)));
}

}  // namespace oracle
