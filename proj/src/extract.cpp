#include "vnsum/extract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "vnsum/error.hpp"

namespace vnsum {

namespace {

double uniform01(std::mt19937_64& rng) {
    // 53 random bits -> [0, 1); avoids distribution classes, whose output
    // is not specified identically across standard libraries.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k,
                          std::uint64_t restart) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (k * 1000003ULL + restart + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<int> assign_nearest(const Matrix& X, const Matrix& C) {
    std::vector<int> assign(X.rows(), 0);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_c = 0;
        for (std::size_t c = 0; c < C.rows(); ++c) {
            const double d = squared_distance(X.row(i), C.row(c), X.cols());
            if (d < best) {
                best = d;
                best_c = static_cast<int>(c);
            }
        }
        assign[i] = best_c;
    }
    return assign;
}

// Donates the point farthest from its current centroid (ties -> lowest row
// index) to each empty cluster, never draining a singleton.
void repair_empty_clusters(const Matrix& X, const Matrix& C,
                           std::vector<int>& assign, int k) {
    for (int round = 0; round < 2 * k; ++round) {
        std::vector<int> counts(k, 0);
        for (const int a : assign) counts[a] += 1;
        int empty_cluster = -1;
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                empty_cluster = c;
                break;
            }
        }
        if (empty_cluster < 0) return;

        double far_d = -1.0;
        std::size_t far_i = 0;
        bool found = false;
        for (std::size_t i = 0; i < X.rows(); ++i) {
            if (counts[assign[i]] < 2) continue;
            const double d =
                squared_distance(X.row(i), C.row(assign[i]), X.cols());
            if (d > far_d) {
                far_d = d;
                far_i = i;
                found = true;
            }
        }
        if (!found) return;  // k > number of points; nothing left to donate
        assign[far_i] = empty_cluster;
    }
}

Matrix cluster_means(const Matrix& X, const std::vector<int>& assign, int k) {
    Matrix means(static_cast<std::size_t>(k), X.cols(), 0.0);
    std::vector<int> counts(k, 0);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        counts[assign[i]] += 1;
        for (std::size_t j = 0; j < X.cols(); ++j) {
            means.at(assign[i], j) += X.at(i, j);
        }
    }
    for (int c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;
        for (std::size_t j = 0; j < X.cols(); ++j) {
            means.at(c, j) /= counts[c];
        }
    }
    return means;
}

double total_wcss(const Matrix& X, const Matrix& C,
                  const std::vector<int>& assign) {
    double sum = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        sum += squared_distance(X.row(i), C.row(assign[i]), X.cols());
    }
    return sum;
}

struct LloydOutcome {
    std::vector<int> assignments;
    Matrix centroids;
    double wcss = 0.0;
};

// Lloyd iterations from the given centroids. Runs until the stated stopping
// rule (relative WCSS improvement < 1e-6 or 100 iterations) and then keeps
// going to an assignment fixed point (bounded) so the returned assignment is
// nearest-centroid-consistent with centroids that are exact cluster means.
LloydOutcome lloyd(const Matrix& X, Matrix centroids,
                   std::vector<double>* iteration_wcss) {
    const int k = static_cast<int>(centroids.rows());
    std::vector<int> assign = assign_nearest(X, centroids);
    repair_empty_clusters(X, centroids, assign, k);
    centroids = cluster_means(X, assign, k);
    double wcss = total_wcss(X, centroids, assign);
    if (iteration_wcss) iteration_wcss->push_back(wcss);

    double prev_wcss = wcss;
    bool past_stop_rule = false;
    int fixed_point_budget = 1000;
    for (int iter = 1; iter < 100 + 1000; ++iter) {
        std::vector<int> next = assign_nearest(X, centroids);
        repair_empty_clusters(X, centroids, next, k);
        if (next == assign) break;  // fixed point; invariants hold
        assign = std::move(next);
        centroids = cluster_means(X, assign, k);
        wcss = total_wcss(X, centroids, assign);
        if (iteration_wcss) iteration_wcss->push_back(wcss);

        if (!past_stop_rule) {
            const bool converged =
                wcss == 0.0 ||
                (prev_wcss > 0.0 && (prev_wcss - wcss) / prev_wcss < 1e-6) ||
                iter >= 99;
            if (converged) past_stop_rule = true;
            prev_wcss = wcss;
        } else if (--fixed_point_budget <= 0) {
            break;  // safety stop; only reachable on adversarial ties
        }
    }
    return {std::move(assign), std::move(centroids), wcss};
}

Matrix kmeanspp_init(const Matrix& X, int k, std::mt19937_64& rng) {
    const std::size_t n = X.rows();
    Matrix centroids(static_cast<std::size_t>(k), X.cols());
    std::vector<double> dist2(n, std::numeric_limits<double>::infinity());

    std::size_t first = static_cast<std::size_t>(rng() % n);
    for (std::size_t j = 0; j < X.cols(); ++j) {
        centroids.at(0, j) = X.at(first, j);
    }
    for (int c = 1; c < k; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            const double d =
                squared_distance(X.row(i), centroids.row(c - 1), X.cols());
            dist2[i] = std::min(dist2[i], d);
        }
        double total = 0.0;
        for (const double d : dist2) total += d;
        std::size_t pick = 0;
        if (total <= 0.0) {
            pick = static_cast<std::size_t>(rng() % n);
        } else {
            const double r = uniform01(rng) * total;
            double cum = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                cum += dist2[i];
                if (cum > r) {
                    pick = i;
                    break;
                }
            }
        }
        for (std::size_t j = 0; j < X.cols(); ++j) {
            centroids.at(c, j) = X.at(pick, j);
        }
    }
    return centroids;
}

ClusteringResult run_kmeans(const Matrix& X, int k, std::uint64_t seed,
                            std::vector<double>* iteration_wcss) {
    std::mt19937_64 rng(seed);
    LloydOutcome out = lloyd(X, kmeanspp_init(X, k, rng), iteration_wcss);
    ClusteringResult result;
    result.k = k;
    result.assignments = std::move(out.assignments);
    result.centroids = std::move(out.centroids);
    result.wcss = out.wcss;
    result.wcss_curve[k] = out.wcss;
    result.seed = seed;
    return result;
}

}  // namespace

double cosine_sim(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) {
        raise(Errc::length_mismatch,
              "cosine of vectors with lengths " + std::to_string(u.size()) +
                  " and " + std::to_string(v.size()));
    }
    if (u.empty()) raise(Errc::length_mismatch, "cosine of empty vectors");
    return cosine_similarity(u.data(), v.data(), u.size());
}

SimilarityMatrix similarity_matrix(const EmbeddingMatrix& E) {
    const std::size_t n = E.rows();
    const std::size_t d = E.dim();
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) {
        norms[i] = l2_norm(E.values.row(i), d);
        if (norms[i] == 0.0) {
            raise(Errc::zero_norm,
                  "embedding row " + std::to_string(i) + " has zero norm");
        }
    }
    SimilarityMatrix S;
    S.values = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double sim = dot(E.values.row(i), E.values.row(j), d) /
                               (norms[i] * norms[j]);
            S.values.at(i, j) = sim;
            S.values.at(j, i) = sim;
        }
    }
    return S;
}

FeatureMatrix feature_select(const SimilarityMatrix& S, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0) {
        raise(Errc::alpha_out_of_range,
              "alpha must be in (0, 1], got " + std::to_string(alpha));
    }
    const std::size_t n = S.size();
    if (n == 0) raise(Errc::invalid_argument, "empty similarity matrix");

    // The small epsilon keeps ceil() from overshooting when alpha*n is an
    // integer that floating-point rounds marginally upward.
    const auto p = static_cast<std::size_t>(std::max(
        1.0, std::ceil(alpha * static_cast<double>(n) - 1e-9)));

    std::vector<double> variance(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += S.values.at(i, j);
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = S.values.at(i, j) - mean;
            ss += d * d;
        }
        variance[j] = ss / static_cast<double>(n);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (variance[a] != variance[b]) return variance[a] > variance[b];
        return a < b;
    });

    FeatureMatrix F;
    F.selected_columns.assign(order.begin(),
                              order.begin() + static_cast<std::ptrdiff_t>(p));
    std::sort(F.selected_columns.begin(), F.selected_columns.end());
    F.values = Matrix(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t jj = 0; jj < p; ++jj) {
            F.values.at(i, jj) = S.values.at(i, F.selected_columns[jj]);
        }
    }
    return F;
}

ClusteringResult kmeans(const FeatureMatrix& F, int k, std::uint64_t seed,
                        std::vector<double>* iteration_wcss) {
    const std::size_t n = F.values.rows();
    if (k < 1) raise(Errc::invalid_argument, "k must be >= 1");
    if (static_cast<std::size_t>(k) > n) {
        raise(Errc::k_too_large, "k=" + std::to_string(k) + " exceeds n=" +
                                     std::to_string(n));
    }
    return run_kmeans(F.values, k, seed, iteration_wcss);
}

ElbowResult elbow_k(const FeatureMatrix& F, int k_max, std::uint64_t seed,
                    int restarts) {
    const std::size_t n = F.values.rows();
    if (n == 0) raise(Errc::invalid_argument, "elbow search on empty matrix");
    if (n >= 4 && k_max < 3) {
        raise(Errc::invalid_argument,
              "elbow search needs k_max >= 3 for n >= 4");
    }
    if (restarts < 1) restarts = 1;
    const int upper = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(std::max(k_max, 1)), n));

    ElbowResult result;
    ClusteringResult base = run_kmeans(F.values, 1, derive_seed(seed, 1, 0),
                                       nullptr);
    result.wcss_curve[1] = base.wcss;
    if (base.wcss <= 1e-12) {
        // All points coincide; larger k would only shuffle duplicates.
        result.k = 1;
        result.best = std::move(base);
        result.best.wcss_curve = result.wcss_curve;
        return result;
    }

    std::map<int, ClusteringResult> best_by_k;
    best_by_k[1] = std::move(base);
    for (int k = 2; k <= upper; ++k) {
        ClusteringResult best;
        bool have = false;
        for (int r = 0; r < restarts; ++r) {
            ClusteringResult cand =
                run_kmeans(F.values, k, derive_seed(seed, k, r), nullptr);
            if (!have || cand.wcss < best.wcss) {
                best = std::move(cand);
                have = true;
            }
        }
        // Warm start: previous best centroids plus the point farthest from
        // its centroid. Lloyd can only improve on that configuration, which
        // guarantees WCSS(k) <= WCSS(k-1) and a non-increasing curve.
        const ClusteringResult& prev = best_by_k.at(k - 1);
        Matrix warm(static_cast<std::size_t>(k), F.values.cols());
        for (int c = 0; c < k - 1; ++c) {
            for (std::size_t j = 0; j < F.values.cols(); ++j) {
                warm.at(c, j) = prev.centroids.at(c, j);
            }
        }
        double far_d = -1.0;
        std::size_t far_i = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = squared_distance(
                F.values.row(i), prev.centroids.row(prev.assignments[i]),
                F.values.cols());
            if (d > far_d) {
                far_d = d;
                far_i = i;
            }
        }
        for (std::size_t j = 0; j < F.values.cols(); ++j) {
            warm.at(k - 1, j) = F.values.at(far_i, j);
        }
        LloydOutcome warm_out = lloyd(F.values, std::move(warm), nullptr);
        if (!have || warm_out.wcss < best.wcss) {
            best.k = k;
            best.assignments = std::move(warm_out.assignments);
            best.centroids = std::move(warm_out.centroids);
            best.wcss = warm_out.wcss;
            best.wcss_curve = {{k, warm_out.wcss}};
            best.seed = seed;
        }
        result.wcss_curve[k] = best.wcss;
        best_by_k[k] = std::move(best);
    }

    if (n <= 3) {
        result.k = static_cast<int>(std::min<std::size_t>(n, 2));
    } else {
        // Discrete curvature over interior points of the curve.
        int best_k = 2;
        double best_curv = -std::numeric_limits<double>::infinity();
        for (int k = 2; k <= upper - 1; ++k) {
            const double curv = result.wcss_curve.at(k - 1) -
                                2.0 * result.wcss_curve.at(k) +
                                result.wcss_curve.at(k + 1);
            if (curv > best_curv) {
                best_curv = curv;
                best_k = k;
            }
        }
        result.k = best_k;
    }
    result.best = std::move(best_by_k.at(result.k));
    result.best.wcss_curve = result.wcss_curve;
    return result;
}

ExtractiveSummary select_sentences(const ClusteringResult& cl,
                                   const FeatureMatrix& F,
                                   const PreparedCluster& pc, double alpha) {
    const std::size_t n = F.values.rows();
    if (cl.assignments.size() != n || n != pc.sentences.size()) {
        raise(Errc::length_mismatch,
              "clustering, features and sentences disagree on row count");
    }
    ExtractiveSummary summary;
    summary.cluster_id = pc.cluster_id;
    summary.alpha = alpha;
    summary.k = cl.k;

    // Rows are in (doc_index, sent_index) order, so scanning ascending and
    // keeping strict improvements resolves medoid ties toward the smallest
    // (doc_index, sent_index) automatically.
    std::vector<std::ptrdiff_t> medoid(static_cast<std::size_t>(cl.k), -1);
    std::vector<double> medoid_d(static_cast<std::size_t>(cl.k),
                                 std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        const int c = cl.assignments[i];
        const double d =
            squared_distance(F.values.row(i), cl.centroids.row(c), F.values.cols());
        if (d < medoid_d[c]) {
            medoid_d[c] = d;
            medoid[c] = static_cast<std::ptrdiff_t>(i);
        }
    }

    std::vector<std::pair<std::size_t, int>> picks;  // (row, cluster id)
    for (int c = 0; c < cl.k; ++c) {
        if (medoid[c] < 0) {
            raise(Errc::invalid_argument,
                  "clustering has an empty cluster " + std::to_string(c));
        }
        picks.emplace_back(static_cast<std::size_t>(medoid[c]), c);
    }
    std::sort(picks.begin(), picks.end());
    for (const auto& [row, c] : picks) {
        summary.picks.push_back({pc.sentences[row], c});
    }
    return summary;
}

}  // namespace vnsum
