#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "vnsum/matrix.hpp"
#include "vnsum/preprocess.hpp"
#include "vnsum/retry.hpp"

namespace vnsum {

// One row per SentenceRecord, in PreparedCluster order. Rows are validated at
// construction; no row may be all-zero (cosine would be undefined).
struct EmbeddingMatrix {
    Matrix values;

    std::size_t rows() const { return values.rows(); }
    std::size_t dim() const { return values.cols(); }
};

// Validates dimensions (DimMismatch) and rejects all-zero rows (ZeroVector).
// expected_dim 0 means "take the first row's length".
EmbeddingMatrix make_embedding_matrix(
    const std::vector<std::vector<double>>& rows, std::size_t expected_dim = 0);

class EmbeddingProvider {
  public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string name() const = 0;
    // Declared output dimensionality; 0 when unknown until the first response.
    virtual std::size_t dim() const = 0;
    // One vector per record, aligned by index. Must be deterministic: the
    // same sentence always maps to the same vector within one instance.
    virtual std::vector<std::vector<double>> embed_batch(
        const std::vector<SentenceRecord>& records) = 0;
};

// Runs the provider over all sentences of the cluster and validates the
// result shape. Provider errors surface as ProviderFailure.
EmbeddingMatrix embed_sentences(EmbeddingProvider& provider,
                                const PreparedCluster& pc);

// Deterministic test embedder: hashed bag-of-tokens counts projected through
// a seeded random sign matrix, then L2-normalized. Order-insensitive in the
// token sequence; never all-zero for non-empty tokens.
std::vector<double> hash_embed(const std::vector<std::string>& tokens,
                               std::size_t dim, std::uint64_t seed);

class HashEmbedder final : public EmbeddingProvider {
  public:
    explicit HashEmbedder(std::size_t dim = 64, std::uint64_t seed = 0)
        : dim_(dim), seed_(seed) {}

    std::string name() const override { return "hash"; }
    std::size_t dim() const override { return dim_; }
    std::vector<std::vector<double>> embed_batch(
        const std::vector<SentenceRecord>& records) override;

  private:
    std::size_t dim_;
    std::uint64_t seed_;
};

// Remote embedding service speaking
//   POST {"inputs":[str,...]}  ->  {"vectors":[[float,...],...]}
// Requests are chunked and issued with at most max_in_flight concurrent
// calls; each chunk is retried per the policy before ProviderFailure.
struct RemoteEmbedderOptions {
    std::string url;              // e.g. http://127.0.0.1:8080/embed
    std::size_t expected_dim = 0; // 0 = accept the service's dimensionality
    std::size_t batch_size = 32;
    std::size_t max_in_flight = 4;
    RetryPolicy retry{};
    std::chrono::seconds timeout{30};
};

class RemoteEmbedder final : public EmbeddingProvider {
  public:
    explicit RemoteEmbedder(RemoteEmbedderOptions options);
    ~RemoteEmbedder() override;

    RemoteEmbedder(const RemoteEmbedder&) = delete;
    RemoteEmbedder& operator=(const RemoteEmbedder&) = delete;

    std::string name() const override { return "remote"; }
    std::size_t dim() const override { return dim_; }
    std::vector<std::vector<double>> embed_batch(
        const std::vector<SentenceRecord>& records) override;

  private:
    struct Gate;
    std::vector<std::vector<double>> post_chunk(
        const std::vector<std::string>& texts);

    RemoteEmbedderOptions options_;
    std::atomic<std::size_t> dim_;
    std::unique_ptr<Gate> gate_;
};

// Precomputed vectors as JSON Lines, one record per line:
//   {"cluster":str,"doc":int,"sent":int,"vec":[float,...]}
// Every sentence of pc must be covered (MissingKey otherwise); every stored
// vector must share one dimensionality (DimMismatch otherwise).
EmbeddingMatrix load_precomputed(const std::string& path,
                                 const PreparedCluster& pc);

}  // namespace vnsum
