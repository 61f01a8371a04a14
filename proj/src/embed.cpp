#include "vnsum/embed.hpp"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "http_util.hpp"
#include "vnsum/error.hpp"

namespace vnsum {

namespace {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t sign_stream_state(std::string_view token, std::uint64_t seed) {
    return fnv1a64(token) ^
           (0x9E3779B97F4A7C15ULL * (seed + 0x632BE59BD9B4E019ULL));
}

}  // namespace

EmbeddingMatrix make_embedding_matrix(
    const std::vector<std::vector<double>>& rows, std::size_t expected_dim) {
    if (rows.empty()) {
        raise(Errc::invalid_argument, "embedding matrix needs at least one row");
    }
    const std::size_t dim = expected_dim != 0 ? expected_dim : rows[0].size();
    if (dim == 0) {
        raise(Errc::dim_mismatch, "embedding row 0 has zero length");
    }
    Matrix values(rows.size(), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != dim) {
            raise(Errc::dim_mismatch,
                  "embedding row " + std::to_string(i) + " has length " +
                      std::to_string(rows[i].size()) + ", expected " +
                      std::to_string(dim));
        }
        bool all_zero = true;
        for (std::size_t j = 0; j < dim; ++j) {
            values.at(i, j) = rows[i][j];
            if (rows[i][j] != 0.0) all_zero = false;
        }
        if (all_zero) {
            raise(Errc::zero_vector,
                  "embedding row " + std::to_string(i) + " is all-zero");
        }
    }
    return EmbeddingMatrix{std::move(values)};
}

EmbeddingMatrix embed_sentences(EmbeddingProvider& provider,
                                const PreparedCluster& pc) {
    if (pc.sentences.empty()) {
        raise(Errc::invalid_argument,
              "cannot embed an empty prepared cluster");
    }
    std::vector<std::vector<double>> rows;
    try {
        rows = provider.embed_batch(pc.sentences);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        raise(Errc::provider_failure,
              "provider '" + provider.name() + "': " + e.what());
    }
    if (rows.size() != pc.sentences.size()) {
        raise(Errc::provider_failure,
              "provider '" + provider.name() + "' returned " +
                  std::to_string(rows.size()) + " rows for " +
                  std::to_string(pc.sentences.size()) + " sentences");
    }
    return make_embedding_matrix(rows, provider.dim());
}

std::vector<double> hash_embed(const std::vector<std::string>& tokens,
                               std::size_t dim, std::uint64_t seed) {
    if (dim < 1) raise(Errc::invalid_argument, "hash_embed requires dim >= 1");
    if (tokens.empty()) raise(Errc::empty_tokens, "hash_embed on zero tokens");

    // Aggregate per distinct token so the result is exactly invariant under
    // token permutation: the accumulator stays integral until normalization.
    std::map<std::string, long long> counts;
    for (const auto& t : tokens) counts[t] += 1;

    std::vector<long long> acc(dim, 0);
    for (const auto& [token, count] : counts) {
        std::uint64_t state = sign_stream_state(token, seed);
        for (std::size_t j = 0; j < dim; ++j) {
            const long long sign = (splitmix64_next(state) & 1) ? 1 : -1;
            acc[j] += count * sign;
        }
    }

    double sum_sq = 0.0;
    for (const long long v : acc) {
        sum_sq += static_cast<double>(v) * static_cast<double>(v);
    }
    if (sum_sq == 0.0) {
        // Cancellation across tokens: fall back to the sign pattern of the
        // lexicographically smallest token, which is never all-zero.
        std::uint64_t state = sign_stream_state(counts.begin()->first, seed);
        for (std::size_t j = 0; j < dim; ++j) {
            acc[j] = (splitmix64_next(state) & 1) ? 1 : -1;
        }
        sum_sq = static_cast<double>(dim);
    }
    const double norm = std::sqrt(sum_sq);
    std::vector<double> out(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        out[j] = static_cast<double>(acc[j]) / norm;
    }
    return out;
}

std::vector<std::vector<double>> HashEmbedder::embed_batch(
    const std::vector<SentenceRecord>& records) {
    std::vector<std::vector<double>> rows;
    rows.reserve(records.size());
    for (const auto& rec : records) {
        rows.push_back(hash_embed(rec.tokens, dim_, seed_));
    }
    return rows;
}

// Instance-wide bound on concurrent HTTP requests, shared by every thread
// using this provider.
struct RemoteEmbedder::Gate {
    explicit Gate(std::size_t slots) : available(slots) {}

    void acquire() {
        std::unique_lock<std::mutex> lock(mutex);
        cv.wait(lock, [this] { return available > 0; });
        --available;
    }
    void release() {
        {
            std::lock_guard<std::mutex> lock(mutex);
            ++available;
        }
        cv.notify_one();
    }

    std::mutex mutex;
    std::condition_variable cv;
    std::size_t available;
};

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderOptions options)
    : options_(std::move(options)), dim_(options_.expected_dim) {
    if (options_.url.empty()) {
        raise(Errc::invalid_argument, "remote embedder needs a URL");
    }
    if (options_.batch_size == 0) options_.batch_size = 1;
    if (options_.max_in_flight == 0) options_.max_in_flight = 1;
    gate_ = std::make_unique<Gate>(options_.max_in_flight);
}

RemoteEmbedder::~RemoteEmbedder() = default;

std::vector<std::vector<double>> RemoteEmbedder::post_chunk(
    const std::vector<std::string>& texts) {
    const auto [base, path] = split_url(options_.url);
    httplib::Client client(base);
    client.set_connection_timeout(options_.timeout.count(), 0);
    client.set_read_timeout(options_.timeout.count(), 0);
    client.set_write_timeout(options_.timeout.count(), 0);

    nlohmann::json body;
    body["inputs"] = texts;
    const auto res = client.Post(path, body.dump(), "application/json");
    if (!res) {
        raise(Errc::endpoint_unreachable,
              "POST " + options_.url + ": " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        raise(Errc::bad_response, "POST " + options_.url + ": HTTP status " +
                                      std::to_string(res->status));
    }
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::bad_response,
              std::string("embedding response is not JSON: ") + e.what());
    }
    if (!parsed.is_object() || !parsed.contains("vectors") ||
        !parsed["vectors"].is_array()) {
        raise(Errc::bad_response, "embedding response lacks a 'vectors' array");
    }
    std::vector<std::vector<double>> rows;
    for (const auto& jv : parsed["vectors"]) {
        if (!jv.is_array()) {
            raise(Errc::bad_response, "embedding vector entry is not an array");
        }
        rows.push_back(jv.get<std::vector<double>>());
    }
    if (rows.size() != texts.size()) {
        raise(Errc::bad_response,
              "embedding response has " + std::to_string(rows.size()) +
                  " vectors for " + std::to_string(texts.size()) + " inputs");
    }
    return rows;
}

std::vector<std::vector<double>> RemoteEmbedder::embed_batch(
    const std::vector<SentenceRecord>& records) {
    if (records.empty()) return {};

    std::vector<std::vector<std::string>> chunks;
    for (std::size_t i = 0; i < records.size(); i += options_.batch_size) {
        const std::size_t end =
            std::min(records.size(), i + options_.batch_size);
        std::vector<std::string> texts;
        texts.reserve(end - i);
        for (std::size_t j = i; j < end; ++j) texts.push_back(records[j].text);
        chunks.push_back(std::move(texts));
    }

    std::vector<std::vector<std::vector<double>>> chunk_rows(chunks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex err_mutex;
    std::exception_ptr first_error;

    const auto worker = [&] {
        while (!stop.load()) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= chunks.size()) break;
            try {
                gate_->acquire();
                struct Release {
                    Gate* gate;
                    ~Release() { gate->release(); }
                } release{gate_.get()};
                chunk_rows[idx] = with_retry(
                    options_.retry, [&] { return post_chunk(chunks[idx]); });
            } catch (const Error& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) {
                    first_error = std::make_exception_ptr(
                        Error(Errc::provider_failure,
                              "embedding endpoint " + options_.url + ": " +
                                  e.detail()));
                }
                stop.store(true);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                stop.store(true);
            }
        }
    };

    const std::size_t n_workers =
        std::min(options_.max_in_flight, chunks.size());
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);

    std::vector<std::vector<double>> rows;
    rows.reserve(records.size());
    for (auto& chunk : chunk_rows) {
        for (auto& row : chunk) rows.push_back(std::move(row));
    }
    for (const auto& row : rows) {
        std::size_t expected = 0;
        dim_.compare_exchange_strong(expected, row.size());
        const std::size_t declared = dim_.load();
        if (row.size() != declared) {
            raise(Errc::dim_mismatch,
                  "embedding service returned a length-" +
                      std::to_string(row.size()) + " vector, expected " +
                      std::to_string(declared));
        }
    }
    return rows;
}

EmbeddingMatrix load_precomputed(const std::string& path,
                                 const PreparedCluster& pc) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io, "cannot read vector file: " + path);

    using Key = std::tuple<std::string, int, int>;
    std::map<Key, std::vector<double>> stored;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            raise(Errc::parse, path + ":" + std::to_string(line_no) + ": " +
                                   e.what());
        }
        for (const char* key : {"cluster", "doc", "sent", "vec"}) {
            if (!rec.contains(key)) {
                raise(Errc::missing_key,
                      path + ":" + std::to_string(line_no) + ": record lacks '" +
                          key + "'");
            }
        }
        try {
            stored[{rec["cluster"].get<std::string>(), rec["doc"].get<int>(),
                    rec["sent"].get<int>()}] =
                rec["vec"].get<std::vector<double>>();
        } catch (const nlohmann::json::exception& e) {
            raise(Errc::parse, path + ":" + std::to_string(line_no) + ": " +
                                   e.what());
        }
    }

    std::vector<std::vector<double>> rows;
    rows.reserve(pc.sentences.size());
    for (const auto& s : pc.sentences) {
        const auto it =
            stored.find({s.cluster_id, s.doc_index, s.sent_index});
        if (it == stored.end()) {
            raise(Errc::missing_key,
                  "no stored vector for cluster '" + s.cluster_id + "' doc " +
                      std::to_string(s.doc_index) + " sent " +
                      std::to_string(s.sent_index));
        }
        rows.push_back(it->second);
    }
    return make_embedding_matrix(rows);
}

}  // namespace vnsum
