#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "temp_dir.hpp"
#include "vnsum/embed.hpp"
#include "vnsum/error.hpp"

using namespace vnsum;
using testutil::TempDir;
using testutil::write_file;

namespace {

SentenceRecord record(std::string text, std::vector<std::string> tokens,
                      std::string cluster = "c", int doc = 0, int sent = 0) {
    SentenceRecord rec;
    rec.cluster_id = std::move(cluster);
    rec.doc_index = doc;
    rec.sent_index = sent;
    rec.text = std::move(text);
    rec.tokens = std::move(tokens);
    return rec;
}

PreparedCluster two_sentence_cluster() {
    PreparedCluster pc;
    pc.cluster_id = "c";
    pc.sentences = {record("giá xăng tăng", {"giá", "xăng", "tăng"}),
                    record("trời mưa to", {"trời", "mưa", "to"}, "c", 0, 1)};
    return pc;
}

double l2_norm(const std::vector<double>& v) {
    double sum = 0.0;
    for (const double x : v) sum += x * x;
    return std::sqrt(sum);
}

// In-process HTTP endpoint serving POST /embed with the given handler.
struct MockServer {
    httplib::Server server;
    int port = 0;
    std::thread thread;

    explicit MockServer(httplib::Server::Handler handler) {
        server.Post("/embed", std::move(handler));
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;
    ~MockServer() {
        server.stop();
        thread.join();
    }

    std::string url() const {
        return "http://127.0.0.1:" + std::to_string(port) + "/embed";
    }
};

// Echo-style handler: vector i is [inputs[i].size(), position_in_request].
void identity_handler(const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    nlohmann::json vectors = nlohmann::json::array();
    std::size_t position = 0;
    for (const auto& input : body.at("inputs")) {
        vectors.push_back({static_cast<double>(
                               input.get<std::string>().size()),
                           static_cast<double>(position++)});
    }
    res.set_content(nlohmann::json{{"vectors", vectors}}.dump(),
                    "application/json");
}

RetryPolicy fast_retry(int max_attempts) {
    RetryPolicy policy;
    policy.max_attempts = max_attempts;
    policy.initial_delay = std::chrono::milliseconds(0);
    return policy;
}

}  // namespace

TEST_CASE("hash_embed emits unit-norm vectors of the requested size") {
    const std::vector<std::string> tokens = {"giá", "xăng", "tăng", "2.1"};
    for (const std::size_t dim : {std::size_t{1}, std::size_t{3},
                                  std::size_t{64}, std::size_t{257}}) {
        const std::vector<double> v = hash_embed(tokens, dim, 42);
        REQUIRE(v.size() == dim);
        CHECK(l2_norm(v) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("hash_embed is exactly invariant under token order") {
    std::mt19937 rng(7);
    std::vector<std::string> tokens = {"giá",  "xăng", "tăng", "giá",
                                       "trời", "mưa",  "giá",  "15"};
    const std::vector<double> base = hash_embed(tokens, 16, 3);
    for (int round = 0; round < 20; ++round) {
        std::shuffle(tokens.begin(), tokens.end(), rng);
        CHECK(hash_embed(tokens, 16, 3) == base);  // bitwise equality
    }
}

TEST_CASE("hash_embed is deterministic and seed-sensitive") {
    const std::vector<std::string> tokens = {"một", "hai", "ba"};
    CHECK(hash_embed(tokens, 32, 5) == hash_embed(tokens, 32, 5));
    CHECK(hash_embed(tokens, 32, 5) != hash_embed(tokens, 32, 6));
    CHECK(hash_embed({"một"}, 32, 5) != hash_embed({"hai"}, 32, 5));
}

TEST_CASE("hash_embed rejects degenerate inputs") {
    CHECK_THROWS_WITH_AS(hash_embed({}, 8, 0), doctest::Contains("EmptyTokens"),
                         Error);
    CHECK_THROWS_WITH_AS(hash_embed({"a"}, 0, 0),
                         doctest::Contains("InvalidArgument"), Error);
}

TEST_CASE("hash_embed falls back to a sign pattern when counts cancel") {
    // With dim=1 every single-token embedding is exactly +1 or -1, so a pair
    // with opposite signs cancels to zero and must trigger the fallback.
    const std::uint64_t seed = 11;
    std::string plus;
    std::string minus;
    for (int i = 0; i < 200 && (plus.empty() || minus.empty()); ++i) {
        const std::string token = "w" + std::to_string(i);
        const double sign = hash_embed({token}, 1, seed)[0];
        if (sign > 0 && plus.empty()) plus = token;
        if (sign < 0 && minus.empty()) minus = token;
    }
    REQUIRE_FALSE(plus.empty());
    REQUIRE_FALSE(minus.empty());

    const std::string smallest = std::min(plus, minus);
    const std::vector<double> expected = hash_embed({smallest}, 1, seed);
    CHECK(hash_embed({plus, minus}, 1, seed) == expected);
    CHECK(hash_embed({minus, plus}, 1, seed) == expected);
    CHECK(l2_norm(hash_embed({plus, minus}, 1, seed)) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hash_embed never returns an all-zero vector") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> n_tokens(1, 6);
    std::uniform_int_distribution<int> token_id(0, 3);
    for (int round = 0; round < 500; ++round) {
        std::vector<std::string> tokens;
        const int n = n_tokens(rng);
        for (int i = 0; i < n; ++i) {
            tokens.push_back("t" + std::to_string(token_id(rng)));
        }
        const std::vector<double> v = hash_embed(tokens, 2, 1);
        CHECK(l2_norm(v) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("make_embedding_matrix validates shape and content") {
    SUBCASE("happy path") {
        const EmbeddingMatrix m =
            make_embedding_matrix({{1.0, 0.0}, {0.5, -0.5}});
        REQUIRE(m.rows() == 2);
        REQUIRE(m.dim() == 2);
        CHECK(m.values.at(1, 0) == 0.5);
        CHECK(m.values.at(1, 1) == -0.5);
    }
    SUBCASE("explicit expected_dim wins over the first row") {
        CHECK_THROWS_WITH_AS(make_embedding_matrix({{1.0, 2.0}}, 3),
                             doctest::Contains("DimMismatch"), Error);
    }
    SUBCASE("ragged rows name the offending index") {
        CHECK_THROWS_WITH_AS(
            make_embedding_matrix({{1.0, 2.0}, {1.0, 2.0, 3.0}}),
            doctest::Contains("row 1"), Error);
    }
    SUBCASE("all-zero rows are rejected") {
        CHECK_THROWS_WITH_AS(make_embedding_matrix({{1.0, 0.0}, {0.0, 0.0}}),
                             doctest::Contains("ZeroVector"), Error);
    }
    SUBCASE("no rows at all") {
        CHECK_THROWS_WITH_AS(make_embedding_matrix({}),
                             doctest::Contains("InvalidArgument"), Error);
    }
    SUBCASE("zero-width rows") {
        CHECK_THROWS_WITH_AS(make_embedding_matrix({{}}),
                             doctest::Contains("DimMismatch"), Error);
    }
}

namespace {

class CountingProvider : public EmbeddingProvider {
  public:
    explicit CountingProvider(std::size_t rows_to_return)
        : rows_to_return_(rows_to_return) {}
    std::string name() const override { return "counting"; }
    std::size_t dim() const override { return 2; }
    std::vector<std::vector<double>> embed_batch(
        const std::vector<SentenceRecord>&) override {
        return std::vector<std::vector<double>>(rows_to_return_, {1.0, 0.0});
    }

  private:
    std::size_t rows_to_return_;
};

class ThrowingProvider : public EmbeddingProvider {
  public:
    std::string name() const override { return "flaky"; }
    std::size_t dim() const override { return 2; }
    std::vector<std::vector<double>> embed_batch(
        const std::vector<SentenceRecord>&) override {
        throw std::runtime_error("socket closed");
    }
};

}  // namespace

TEST_CASE("embed_sentences validates provider output") {
    const PreparedCluster pc = two_sentence_cluster();

    SUBCASE("hash provider end to end") {
        HashEmbedder provider(16, 42);
        const EmbeddingMatrix m = embed_sentences(provider, pc);
        REQUIRE(m.rows() == 2);
        REQUIRE(m.dim() == 16);
        const std::vector<double> direct =
            hash_embed(pc.sentences[0].tokens, 16, 42);
        for (std::size_t j = 0; j < 16; ++j) {
            CHECK(m.values.at(0, j) == direct[j]);
        }
    }
    SUBCASE("row-count mismatch becomes ProviderFailure") {
        CountingProvider provider(1);
        CHECK_THROWS_WITH_AS(embed_sentences(provider, pc),
                             doctest::Contains("returned 1 rows for 2"),
                             Error);
    }
    SUBCASE("non-domain exceptions are wrapped with the provider name") {
        ThrowingProvider provider;
        CHECK_THROWS_WITH_AS(embed_sentences(provider, pc),
                             doctest::Contains("flaky"), Error);
        CHECK_THROWS_WITH_AS(embed_sentences(provider, pc),
                             doctest::Contains("ProviderFailure"), Error);
    }
    SUBCASE("empty cluster is rejected up front") {
        HashEmbedder provider;
        CHECK_THROWS_WITH_AS(embed_sentences(provider, PreparedCluster{}),
                             doctest::Contains("InvalidArgument"), Error);
    }
}

TEST_CASE("remote embedder chunks requests and aligns rows") {
    std::atomic<int> requests{0};
    MockServer server([&](const httplib::Request& req, httplib::Response& res) {
        requests.fetch_add(1);
        identity_handler(req, res);
    });

    RemoteEmbedderOptions options;
    options.url = server.url();
    options.batch_size = 2;
    options.retry = fast_retry(1);

    RemoteEmbedder provider(options);
    CHECK(provider.dim() == 0);  // unknown until the first response

    std::vector<SentenceRecord> records;
    const std::vector<std::string> texts = {"a", "bb", "ccc", "dddd", "eeeee"};
    for (std::size_t i = 0; i < texts.size(); ++i) {
        records.push_back(record(texts[i], {texts[i]}, "c", 0,
                                 static_cast<int>(i)));
    }
    const auto rows = provider.embed_batch(records);
    CHECK(requests.load() == 3);  // 2 + 2 + 1
    REQUIRE(rows.size() == 5);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 2);
        CHECK(rows[i][0] == static_cast<double>(texts[i].size()));
        CHECK(rows[i][1] == static_cast<double>(i % 2));  // position in chunk
    }
    CHECK(provider.dim() == 2);  // inferred from the response
}

TEST_CASE("remote embedder retries transient failures per policy") {
    std::atomic<int> requests{0};
    MockServer server([&](const httplib::Request& req, httplib::Response& res) {
        if (requests.fetch_add(1) < 2) {
            res.status = 500;
            res.set_content("busy", "text/plain");
            return;
        }
        identity_handler(req, res);
    });

    RemoteEmbedderOptions options;
    options.url = server.url();
    options.retry = fast_retry(3);

    RemoteEmbedder provider(options);
    const auto rows = provider.embed_batch({record("xin chào", {"xin"})});
    CHECK(requests.load() == 3);  // two failures, then success
    REQUIRE(rows.size() == 1);
    CHECK(rows[0][0] == 9.0);  // "xin chào" is nine bytes in UTF-8
}

TEST_CASE("remote embedder reports the endpoint after retry exhaustion") {
    std::atomic<int> requests{0};
    MockServer server([&](const httplib::Request&, httplib::Response& res) {
        requests.fetch_add(1);
        res.status = 500;
    });

    RemoteEmbedderOptions options;
    options.url = server.url();
    options.retry = fast_retry(2);

    RemoteEmbedder provider(options);
    const std::vector<SentenceRecord> records = {record("a", {"a"})};
    CHECK_THROWS_WITH_AS(provider.embed_batch(records),
                         doctest::Contains(server.url().c_str()), Error);
    CHECK(requests.load() == 2);

    try {
        provider.embed_batch(records);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::provider_failure);
        CHECK(std::string(e.what()).find("2 attempts") != std::string::npos);
    }
}

TEST_CASE("remote embedder rejects malformed responses") {
    SUBCASE("HTTP error status") {
        std::atomic<int> requests{0};
        MockServer server(
            [&](const httplib::Request&, httplib::Response& res) {
                requests.fetch_add(1);
                res.status = 404;
            });
        RemoteEmbedderOptions options;
        options.url = server.url();
        options.retry = fast_retry(1);
        RemoteEmbedder provider(options);
        CHECK_THROWS_WITH_AS(provider.embed_batch({record("a", {"a"})}),
                             doctest::Contains("HTTP status 404"), Error);
        CHECK(requests.load() == 1);
    }
    SUBCASE("body is not JSON") {
        MockServer server(
            [&](const httplib::Request&, httplib::Response& res) {
                res.set_content("<html>oops</html>", "text/html");
            });
        RemoteEmbedderOptions options;
        options.url = server.url();
        options.retry = fast_retry(1);
        RemoteEmbedder provider(options);
        CHECK_THROWS_WITH_AS(provider.embed_batch({record("a", {"a"})}),
                             doctest::Contains("not JSON"), Error);
    }
    SUBCASE("missing vectors array") {
        MockServer server(
            [&](const httplib::Request&, httplib::Response& res) {
                res.set_content(R"({"embeddings": []})", "application/json");
            });
        RemoteEmbedderOptions options;
        options.url = server.url();
        options.retry = fast_retry(1);
        RemoteEmbedder provider(options);
        CHECK_THROWS_WITH_AS(provider.embed_batch({record("a", {"a"})}),
                             doctest::Contains("'vectors'"), Error);
    }
    SUBCASE("row count differs from input count") {
        MockServer server(
            [&](const httplib::Request&, httplib::Response& res) {
                res.set_content(R"({"vectors": [[1.0, 0.0], [0.0, 1.0]]})",
                                "application/json");
            });
        RemoteEmbedderOptions options;
        options.url = server.url();
        options.retry = fast_retry(1);
        RemoteEmbedder provider(options);
        CHECK_THROWS_WITH_AS(provider.embed_batch({record("a", {"a"})}),
                             doctest::Contains("2 vectors for 1"), Error);
    }
    SUBCASE("inconsistent dimensionality across rows") {
        MockServer server(
            [&](const httplib::Request&, httplib::Response& res) {
                res.set_content(R"({"vectors": [[1.0, 0.0], [1.0]]})",
                                "application/json");
            });
        RemoteEmbedderOptions options;
        options.url = server.url();
        options.retry = fast_retry(1);
        RemoteEmbedder provider(options);
        const std::vector<SentenceRecord> records = {
            record("a", {"a"}), record("b", {"b"}, "c", 0, 1)};
        CHECK_THROWS_WITH_AS(provider.embed_batch(records),
                             doctest::Contains("DimMismatch"), Error);
    }
}

TEST_CASE("remote embedder honors the concurrency ceiling") {
    std::atomic<int> in_flight{0};
    std::atomic<int> max_in_flight{0};
    MockServer server([&](const httplib::Request& req, httplib::Response& res) {
        const int now = in_flight.fetch_add(1) + 1;
        int seen = max_in_flight.load();
        while (now > seen && !max_in_flight.compare_exchange_weak(seen, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(25));
        identity_handler(req, res);
        in_flight.fetch_sub(1);
    });

    RemoteEmbedderOptions options;
    options.url = server.url();
    options.batch_size = 1;
    options.max_in_flight = 2;
    options.retry = fast_retry(1);

    RemoteEmbedder provider(options);
    std::vector<SentenceRecord> records;
    for (int i = 0; i < 6; ++i) {
        records.push_back(record("s" + std::to_string(i), {"s"}, "c", 0, i));
    }
    const auto rows = provider.embed_batch(records);
    CHECK(rows.size() == 6);
    CHECK(max_in_flight.load() <= 2);
    CHECK(max_in_flight.load() >= 1);
}

TEST_CASE("remote embedder requires a URL") {
    CHECK_THROWS_WITH_AS(RemoteEmbedder(RemoteEmbedderOptions{}),
                         doctest::Contains("URL"), Error);
}

namespace {

std::string vec_line(const std::string& cluster, int doc, int sent,
                     const std::vector<double>& vec) {
    nlohmann::json rec;
    rec["cluster"] = cluster;
    rec["doc"] = doc;
    rec["sent"] = sent;
    rec["vec"] = vec;
    return rec.dump() + "\n";
}

}  // namespace

TEST_CASE("load_precomputed maps stored vectors onto cluster order") {
    TempDir dir;
    PreparedCluster pc;
    pc.cluster_id = "c1";
    pc.sentences = {record("s0", {"s0"}, "c1", 0, 0),
                    record("s1", {"s1"}, "c1", 0, 1),
                    record("s2", {"s2"}, "c1", 1, 0)};

    SUBCASE("happy path with noise lines") {
        // Stored out of order, with a blank line, a CRLF line, and an entry
        // for a sentence the cluster does not contain.
        std::string body;
        body += vec_line("c1", 1, 0, {5.0, 6.0});
        body += "\n";
        std::string crlf = vec_line("c1", 0, 0, {1.0, 2.0});
        crlf.insert(crlf.size() - 1, "\r");
        body += crlf;
        body += vec_line("other", 0, 0, {9.0, 9.0});
        body += vec_line("c1", 0, 1, {3.0, 4.0});
        write_file(dir.path / "vecs.jsonl", body);

        const EmbeddingMatrix m =
            load_precomputed((dir.path / "vecs.jsonl").string(), pc);
        REQUIRE(m.rows() == 3);
        REQUIRE(m.dim() == 2);
        CHECK(m.values.at(0, 0) == 1.0);
        CHECK(m.values.at(1, 0) == 3.0);
        CHECK(m.values.at(2, 0) == 5.0);
    }
    SUBCASE("uncovered sentence") {
        write_file(dir.path / "vecs.jsonl", vec_line("c1", 0, 0, {1.0, 2.0}) +
                                                vec_line("c1", 0, 1,
                                                         {3.0, 4.0}));
        CHECK_THROWS_WITH_AS(
            load_precomputed((dir.path / "vecs.jsonl").string(), pc),
            doctest::Contains("cluster 'c1' doc 1 sent 0"), Error);
    }
    SUBCASE("malformed JSON names the line") {
        write_file(dir.path / "vecs.jsonl",
                   vec_line("c1", 0, 0, {1.0}) + "{not json\n");
        CHECK_THROWS_WITH_AS(
            load_precomputed((dir.path / "vecs.jsonl").string(), pc),
            doctest::Contains(":2:"), Error);
    }
    SUBCASE("record missing a required key") {
        write_file(dir.path / "vecs.jsonl",
                   R"({"cluster":"c1","doc":0,"sent":0})"
                   "\n");
        CHECK_THROWS_WITH_AS(
            load_precomputed((dir.path / "vecs.jsonl").string(), pc),
            doctest::Contains("record lacks 'vec'"), Error);
    }
    SUBCASE("stored vectors disagree on dimensionality") {
        write_file(dir.path / "vecs.jsonl",
                   vec_line("c1", 0, 0, {1.0, 2.0}) +
                       vec_line("c1", 0, 1, {3.0}) +
                       vec_line("c1", 1, 0, {5.0, 6.0}));
        CHECK_THROWS_WITH_AS(
            load_precomputed((dir.path / "vecs.jsonl").string(), pc),
            doctest::Contains("DimMismatch"), Error);
    }
    SUBCASE("unreadable file") {
        CHECK_THROWS_WITH_AS(
            load_precomputed((dir.path / "missing.jsonl").string(), pc),
            doctest::Contains("IoError"), Error);
    }
}
