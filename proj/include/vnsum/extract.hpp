#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vnsum/embed.hpp"
#include "vnsum/matrix.hpp"
#include "vnsum/preprocess.hpp"

namespace vnsum {

// All-pairs cosine similarity between sentence embeddings. Symmetric with a
// unit diagonal; every entry lies in [-1, 1] up to rounding.
struct SimilarityMatrix {
    Matrix values;  // n x n

    std::size_t size() const { return values.rows(); }
};

// Columns of the similarity matrix kept for clustering: the top ceil(alpha*n)
// columns by variance.
struct FeatureMatrix {
    Matrix values;                             // n x p
    std::vector<std::size_t> selected_columns; // strictly increasing, < n
};

struct ClusteringResult {
    int k = 0;
    std::vector<int> assignments;   // length n, values in [0, k)
    Matrix centroids;               // k x p
    double wcss = 0.0;              // within-cluster sum of squares
    std::map<int, double> wcss_curve;  // k' -> WCSS, filled by the elbow search
    std::uint64_t seed = 0;
};

struct ExtractivePick {
    SentenceRecord sentence;
    int kmeans_cluster_id = 0;
};

// One medoid sentence per k-means cluster, in (doc_index, sent_index) order.
// Every pick is verbatim one of the prepared sentences.
struct ExtractiveSummary {
    std::string cluster_id;
    std::vector<ExtractivePick> picks;
    double alpha = 0.0;
    int k = 0;
};

double cosine_sim(const std::vector<double>& u, const std::vector<double>& v);

SimilarityMatrix similarity_matrix(const EmbeddingMatrix& E);

// Keeps the max(1, ceil(alpha*n)) columns with the largest variance;
// ties prefer the lower column index. Requires 0 < alpha <= 1.
FeatureMatrix feature_select(const SimilarityMatrix& S, double alpha);

// Seeded k-means++ initialization followed by Lloyd iterations. Empty
// clusters are repaired by donating the point farthest from its centroid.
// Deterministic in (F, k, seed). When iteration_wcss is non-null it receives
// the WCSS after every Lloyd update (a non-increasing sequence).
ClusteringResult kmeans(const FeatureMatrix& F, int k, std::uint64_t seed,
                        std::vector<double>* iteration_wcss = nullptr);

struct ElbowResult {
    int k = 0;
    std::map<int, double> wcss_curve;  // k' = 1..min(k_max, n)
    ClusteringResult best;             // best clustering found for chosen k
};

// Picks k by maximizing the discrete curvature of the WCSS curve,
// WCSS(k'-1) - 2*WCSS(k') + WCSS(k'+1), over interior k'. Each curve point is
// the best of `restarts` seeded runs plus a warm start grown from the
// previous k's best solution, which keeps the curve non-increasing.
// Degenerate rules: WCSS(1) ~ 0 -> k=1; n <= 3 -> k = min(n, 2).
ElbowResult elbow_k(const FeatureMatrix& F, int k_max, std::uint64_t seed,
                    int restarts = 5);

// Picks the medoid of every k-means cluster: the member row closest to the
// centroid in squared Euclidean distance, ties resolved toward the smallest
// (doc_index, sent_index).
ExtractiveSummary select_sentences(const ClusteringResult& cl,
                                   const FeatureMatrix& F,
                                   const PreparedCluster& pc, double alpha);

}  // namespace vnsum
