#include "vnsum/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <thread>

#include <nlohmann/json.hpp>

#include "vnsum/error.hpp"
#include "vnsum/extract.hpp"

namespace fs = std::filesystem;

namespace vnsum {

namespace {

std::string env_or_empty(const char* name) {
    const char* value = std::getenv(name);
    return value != nullptr ? std::string(value) : std::string();
}

int default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

// Percentage with one decimal, the paper's table style.
std::string pct1_str(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
    return buf;
}

double pct1(double fraction) { return std::stod(pct1_str(fraction)); }

std::string alpha_str(double alpha) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", alpha);
    return buf;
}

// Baselines render exactly as their sources printed them: two decimals with
// a single redundant trailing zero dropped ("40.70" -> "40.7").
std::string baseline_cell_str(double pct) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", pct);
    std::string s = buf;
    if (s.back() == '0') s.pop_back();
    return s;
}

double triple_cell(const RougeTriple& t, std::size_t col) {
    switch (col) {
        case 0: return t.r1.precision;
        case 1: return t.r1.recall;
        case 2: return t.r1.f1;
        case 3: return t.r2.precision;
        case 4: return t.r2.recall;
        case 5: return t.r2.f1;
        case 6: return t.rl.precision;
        case 7: return t.rl.recall;
        default: return t.rl.f1;
    }
}

const std::array<std::string, 9>& column_headers() {
    static const std::array<std::string, 9> headers = {
        "R1 P", "R1 R", "R1 F1", "R2 P", "R2 R",
        "R2 F1", "RL P", "RL R", "RL F1"};
    return headers;
}

std::string markdown_table(const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows) {
    std::string out = "|";
    for (const auto& h : header) out += " " + h + " |";
    out += "\n|";
    for (std::size_t i = 0; i < header.size(); ++i) out += " --- |";
    out += "\n";
    for (const auto& row : rows) {
        out += "|";
        for (const auto& cell : row) out += " " + cell + " |";
        out += "\n";
    }
    return out;
}

nlohmann::ordered_json score_to_json(const RougeScore& s, bool as_pct) {
    nlohmann::ordered_json j;
    j["p"] = as_pct ? pct1(s.precision) : s.precision;
    j["r"] = as_pct ? pct1(s.recall) : s.recall;
    j["f1"] = as_pct ? pct1(s.f1) : s.f1;
    return j;
}

nlohmann::ordered_json triple_to_json(const RougeTriple& t, bool as_pct) {
    nlohmann::ordered_json j;
    j["r1"] = score_to_json(t.r1, as_pct);
    j["r2"] = score_to_json(t.r2, as_pct);
    j["rl"] = score_to_json(t.rl, as_pct);
    return j;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::io, "cannot write file: " + path.string());
    out << content;
    if (!out) raise(Errc::io, "write failure: " + path.string());
}

ClusterOutcome process_cluster(const DocumentCluster& dc, const RunConfig& cfg,
                               EmbeddingProvider* provider, LlmClient* llm,
                               const Lexicon* lexicon,
                               const ScoringConfig& scoring) {
    ClusterOutcome out;
    out.cluster_id = dc.cluster_id;
    try {
        const PreparedCluster pc =
            preprocess_cluster(dc, cfg.norm, lexicon, cfg.abbreviations);
        const EmbeddingMatrix E =
            cfg.embedder == EmbedderKind::precomputed
                ? load_precomputed(cfg.vectors_path, pc)
                : embed_sentences(*provider, pc);
        const SimilarityMatrix S = similarity_matrix(E);
        const FeatureMatrix F = feature_select(S, cfg.alpha);

        const std::size_t n = pc.sentences.size();
        int k_max = cfg.k_max;
        if (n >= 4) {
            k_max = std::min(k_max, static_cast<int>(n) - 1);
        }
        const ElbowResult elbow =
            elbow_k(F, k_max, cfg.seed, cfg.kmeans_restarts);
        const ExtractiveSummary es =
            select_sentences(elbow.best, F, pc, cfg.alpha);

        out.k = elbow.k;
        out.sentence_count = n;
        std::string joined;
        for (std::size_t i = 0; i < es.picks.size(); ++i) {
            if (i > 0) joined += ". ";
            joined += es.picks[i].sentence.text;
        }
        out.extractive_text = joined;

        if (cfg.extractive_only) {
            out.summary_text = std::move(joined);
        } else {
            const RenderedPrompt prompt = build_prompt(es, cfg.prompt);
            const AbstractiveSummary abs = llm->complete(prompt, cfg.prompt);
            out.summary_text = abs.text;
            out.model_name = abs.model_name;
        }
        out.scores = score_cluster(out.summary_text, dc.references, scoring);
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

}  // namespace

const char* embedder_kind_name(EmbedderKind kind) {
    switch (kind) {
        case EmbedderKind::hash: return "hash";
        case EmbedderKind::remote: return "remote";
        case EmbedderKind::precomputed: return "precomputed";
    }
    return "unknown";
}

RunConfig finalize_config(RunConfig cfg) {
    if (cfg.llm_url.empty()) cfg.llm_url = env_or_empty("LLM_URL");
    if (cfg.llm_token.empty()) cfg.llm_token = env_or_empty("LLM_TOKEN");
    if (cfg.embed_url.empty()) cfg.embed_url = env_or_empty("EMBED_URL");
    if (cfg.llm_url.empty()) cfg.extractive_only = true;

    if (!(cfg.alpha > 0.0) || cfg.alpha > 1.0) {
        raise(Errc::alpha_out_of_range,
              "alpha must be in (0, 1], got " + std::to_string(cfg.alpha));
    }
    if (cfg.k_max < 2) {
        raise(Errc::invalid_argument, "k_max must be >= 2");
    }
    if (cfg.kmeans_restarts < 1) {
        raise(Errc::invalid_argument, "kmeans_restarts must be >= 1");
    }
    if (cfg.hash_dim < 1) {
        raise(Errc::invalid_argument, "hash embedder dimension must be >= 1");
    }
    if (cfg.embedder == EmbedderKind::remote && cfg.embed_url.empty()) {
        raise(Errc::invalid_argument,
              "remote embedder needs an endpoint (--embed-url or EMBED_URL)");
    }
    if (cfg.embedder == EmbedderKind::precomputed && cfg.vectors_path.empty()) {
        raise(Errc::invalid_argument,
              "precomputed embedder needs a vector file (--vectors)");
    }
    validate_prompt_spec(cfg.prompt);
    if (cfg.workers <= 0) cfg.workers = default_workers();
    return cfg;
}

RunReport run_pipeline(const Corpus& corpus, const RunConfig& raw_cfg) {
    const RunConfig cfg = finalize_config(raw_cfg);

    std::optional<Lexicon> lexicon_storage;
    const Lexicon* lexicon = nullptr;
    if (!cfg.lexicon_path.empty()) {
        lexicon_storage.emplace(load_lexicon_file(cfg.lexicon_path));
        lexicon = &*lexicon_storage;
    }

    std::unique_ptr<EmbeddingProvider> provider;
    switch (cfg.embedder) {
        case EmbedderKind::hash:
            provider = std::make_unique<HashEmbedder>(cfg.hash_dim, cfg.seed);
            break;
        case EmbedderKind::remote: {
            RemoteEmbedderOptions options;
            options.url = cfg.embed_url;
            options.retry = cfg.embed_retry;
            provider = std::make_unique<RemoteEmbedder>(std::move(options));
            break;
        }
        case EmbedderKind::precomputed:
            break;  // loaded per cluster from cfg.vectors_path
    }

    std::unique_ptr<LlmClient> llm;
    if (!cfg.extractive_only) {
        LlmClientOptions options;
        options.url = cfg.llm_url;
        options.token = cfg.llm_token;
        options.model = cfg.llm_model;
        options.retry = cfg.llm_retry;
        llm = std::make_unique<LlmClient>(std::move(options));
    }

    ScoringConfig scoring;
    scoring.norm = cfg.norm;
    scoring.abbreviations = cfg.abbreviations;
    scoring.lexicon = lexicon;

    std::vector<ClusterOutcome> outcomes(corpus.clusters.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= corpus.clusters.size()) break;
            outcomes[idx] =
                process_cluster(corpus.clusters[idx], cfg, provider.get(),
                                llm.get(), lexicon, scoring);
        }
    };
    const std::size_t n_workers = std::min<std::size_t>(
        static_cast<std::size_t>(cfg.workers),
        std::max<std::size_t>(corpus.clusters.size(), 1));
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    std::stable_sort(outcomes.begin(), outcomes.end(),
                     [](const ClusterOutcome& a, const ClusterOutcome& b) {
                         return a.cluster_id < b.cluster_id;
                     });

    RunReport report;
    report.alpha = cfg.alpha;
    report.seed = cfg.seed;
    report.extractive_only = cfg.extractive_only;
    report.embedder_name = embedder_kind_name(cfg.embedder);
    report.clusters = std::move(outcomes);

    std::vector<std::pair<std::string, RougeTriple>> per_cluster;
    for (const auto& outcome : report.clusters) {
        if (outcome.ok) {
            per_cluster.emplace_back(outcome.cluster_id, outcome.scores);
        } else {
            report.failed += 1;
        }
    }
    report.scores = make_score_table(std::move(per_cluster));

    if (!cfg.output_dir.empty()) {
        write_run_outputs(report, cfg.output_dir);
    }
    return report;
}

std::string run_report_json(const RunReport& report) {
    nlohmann::ordered_json j;
    j["alpha"] = report.alpha;
    j["seed"] = report.seed;
    j["mode"] = report.extractive_only ? "extractive" : "abstractive";
    j["embedder"] = report.embedder_name;
    j["cluster_count"] = report.clusters.size();
    j["failed"] = report.failed;
    j["clusters"] = nlohmann::ordered_json::array();
    for (const auto& outcome : report.clusters) {
        nlohmann::ordered_json jc;
        jc["id"] = outcome.cluster_id;
        jc["ok"] = outcome.ok;
        if (outcome.ok) {
            jc["k"] = outcome.k;
            jc["sentences"] = outcome.sentence_count;
            if (!outcome.model_name.empty()) {
                jc["model"] = outcome.model_name;
            }
            jc["scores"] = triple_to_json(outcome.scores, false);
        } else {
            jc["error"] = outcome.error;
        }
        j["clusters"].push_back(std::move(jc));
    }
    if (report.scores.cluster_count > 0) {
        j["mean"] = triple_to_json(report.scores.mean, false);
    } else {
        j["mean"] = nullptr;
    }
    return j.dump(2) + "\n";
}

void write_run_outputs(const RunReport& report, const std::string& out_dir) {
    const fs::path root(out_dir);
    std::error_code ec;
    fs::create_directories(root / "summaries", ec);
    if (ec) {
        raise(Errc::io, "cannot create output directory: " +
                            (root / "summaries").string());
    }
    for (const auto& outcome : report.clusters) {
        if (!outcome.ok) continue;
        write_text_file(root / "summaries" / (outcome.cluster_id + ".txt"),
                        outcome.summary_text + "\n");
    }
    write_text_file(root / "scores.json", run_report_json(report));
}

const std::array<std::string, 9>& sweep_columns() {
    static const std::array<std::string, 9> columns = {
        "r1_p", "r1_r", "r1_f1", "r2_p", "r2_r",
        "r2_f1", "rl_p", "rl_r", "rl_f1"};
    return columns;
}

SweepReport make_sweep_report(std::vector<SweepRow> rows) {
    std::sort(rows.begin(), rows.end(),
              [](const SweepRow& a, const SweepRow& b) {
                  return a.alpha < b.alpha;
              });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].alpha == rows[i - 1].alpha) {
            raise(Errc::duplicate_alpha,
                  "alpha " + alpha_str(rows[i].alpha) + " appears twice");
        }
    }
    SweepReport report;
    report.rows = std::move(rows);
    if (!report.rows.empty()) {
        for (std::size_t col = 0; col < sweep_columns().size(); ++col) {
            std::size_t best = 0;
            for (std::size_t r = 1; r < report.rows.size(); ++r) {
                if (triple_cell(report.rows[r].scores, col) >
                    triple_cell(report.rows[best].scores, col)) {
                    best = r;
                }
            }
            report.best_rows[sweep_columns()[col]] = best;
        }
    }
    return report;
}

const std::vector<double>& default_sweep_alphas() {
    static const std::vector<double> alphas = {0.1, 0.2, 0.3, 0.4, 0.5};
    return alphas;
}

SweepReport sweep_alpha(const Corpus& corpus, const std::vector<double>& alphas,
                        const RunConfig& base_cfg) {
    if (alphas.empty()) {
        raise(Errc::invalid_argument, "sweep needs at least one alpha");
    }
    for (const double alpha : alphas) {
        if (!(alpha > 0.0) || alpha > 1.0) {
            raise(Errc::alpha_out_of_range,
                  "alpha must be in (0, 1], got " + std::to_string(alpha));
        }
    }
    std::vector<double> sorted(alphas);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] == sorted[i - 1]) {
            raise(Errc::duplicate_alpha,
                  "alpha " + alpha_str(sorted[i]) + " appears twice");
        }
    }

    std::vector<SweepRow> rows;
    for (const double alpha : sorted) {
        RunConfig cfg = base_cfg;
        cfg.alpha = alpha;
        cfg.extractive_only = true;
        cfg.output_dir.clear();
        const RunReport report = run_pipeline(corpus, cfg);
        SweepRow row;
        row.alpha = alpha;
        row.scores = report.scores.mean;
        row.failed_clusters = report.failed;
        rows.push_back(std::move(row));
    }
    return make_sweep_report(std::move(rows));
}

std::string render_sweep(const SweepReport& report, TableFormat format) {
    if (format == TableFormat::markdown) {
        std::vector<std::string> header = {"Alpha"};
        header.insert(header.end(), column_headers().begin(),
                      column_headers().end());
        std::vector<std::vector<std::string>> rows;
        const bool bold = report.rows.size() >= 2;
        for (std::size_t r = 0; r < report.rows.size(); ++r) {
            std::vector<std::string> cells = {alpha_str(report.rows[r].alpha)};
            for (std::size_t col = 0; col < 9; ++col) {
                std::string cell = pct1_str(triple_cell(report.rows[r].scores, col));
                if (bold &&
                    report.best_rows.at(sweep_columns()[col]) == r) {
                    cell = "**" + cell + "**";
                }
                cells.push_back(std::move(cell));
            }
            rows.push_back(std::move(cells));
        }
        return markdown_table(header, rows);
    }
    if (format == TableFormat::csv) {
        std::string out = "alpha";
        for (const auto& col : sweep_columns()) out += "," + col;
        out += "\n";
        for (const auto& row : report.rows) {
            out += alpha_str(row.alpha);
            for (std::size_t col = 0; col < 9; ++col) {
                out += "," + pct1_str(triple_cell(row.scores, col));
            }
            out += "\n";
        }
        return out;
    }
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
        nlohmann::ordered_json jr;
        jr["alpha"] = row.alpha;
        auto scores = triple_to_json(row.scores, true);
        jr["r1"] = scores["r1"];
        jr["r2"] = scores["r2"];
        jr["rl"] = scores["rl"];
        jr["failed_clusters"] = row.failed_clusters;
        j["rows"].push_back(std::move(jr));
    }
    j["best"] = nlohmann::ordered_json::object();
    for (const auto& [column, row_index] : report.best_rows) {
        j["best"][column] = report.rows[row_index].alpha;
    }
    return j.dump(2) + "\n";
}

std::string render_scores(const ScoreTable& table, TableFormat format) {
    if (format == TableFormat::markdown) {
        std::vector<std::string> header = {"Cluster"};
        header.insert(header.end(), column_headers().begin(),
                      column_headers().end());
        std::vector<std::vector<std::string>> rows;
        const bool bold = table.per_cluster.size() >= 2;
        // Best per column among cluster rows; the mean row never competes.
        std::array<std::size_t, 9> best{};
        for (std::size_t col = 0; col < 9; ++col) {
            for (std::size_t r = 1; r < table.per_cluster.size(); ++r) {
                if (triple_cell(table.per_cluster[r].second, col) >
                    triple_cell(table.per_cluster[best[col]].second, col)) {
                    best[col] = r;
                }
            }
        }
        for (std::size_t r = 0; r < table.per_cluster.size(); ++r) {
            std::vector<std::string> cells = {table.per_cluster[r].first};
            for (std::size_t col = 0; col < 9; ++col) {
                std::string cell =
                    pct1_str(triple_cell(table.per_cluster[r].second, col));
                if (bold && best[col] == r) cell = "**" + cell + "**";
                cells.push_back(std::move(cell));
            }
            rows.push_back(std::move(cells));
        }
        if (table.cluster_count > 0) {
            std::vector<std::string> cells = {"Mean"};
            for (std::size_t col = 0; col < 9; ++col) {
                cells.push_back(pct1_str(triple_cell(table.mean, col)));
            }
            rows.push_back(std::move(cells));
        }
        return markdown_table(header, rows);
    }
    if (format == TableFormat::csv) {
        std::string out = "cluster";
        for (const auto& col : sweep_columns()) out += "," + col;
        out += "\n";
        for (const auto& [id, triple] : table.per_cluster) {
            out += id;
            for (std::size_t col = 0; col < 9; ++col) {
                out += "," + pct1_str(triple_cell(triple, col));
            }
            out += "\n";
        }
        if (table.cluster_count > 0) {
            out += "mean";
            for (std::size_t col = 0; col < 9; ++col) {
                out += "," + pct1_str(triple_cell(table.mean, col));
            }
            out += "\n";
        }
        return out;
    }
    nlohmann::ordered_json j;
    j["clusters"] = nlohmann::ordered_json::array();
    for (const auto& [id, triple] : table.per_cluster) {
        nlohmann::ordered_json jc;
        jc["id"] = id;
        auto scores = triple_to_json(triple, true);
        jc["r1"] = scores["r1"];
        jc["r2"] = scores["r2"];
        jc["rl"] = scores["rl"];
        j["clusters"].push_back(std::move(jc));
    }
    if (table.cluster_count > 0) {
        j["mean"] = triple_to_json(table.mean, true);
    } else {
        j["mean"] = nullptr;
    }
    return j.dump(2) + "\n";
}

void write_sweep_outputs(const SweepReport& report, const std::string& out_dir) {
    const fs::path root(out_dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) raise(Errc::io, "cannot create output directory: " + out_dir);
    write_text_file(root / "sweep.md",
                    render_sweep(report, TableFormat::markdown));
    write_text_file(root / "sweep.csv", render_sweep(report, TableFormat::csv));
}

const std::vector<BaselineRow>& builtin_baselines() {
    static const std::vector<BaselineRow> rows = {
        {"Thanh et al. (2022)",
         "graph-based hybrid extractive-abstractive model, reported results",
         {61.77, 79.96, 68.63, 31.36, 40.7, 34.89, 29.3, 38.5, 32.74}},
        {"MART",
         "reported by Nguyen et al. (2018)",
         {std::nullopt, 70.2, 49.8, std::nullopt, 49.6, 41.6, std::nullopt,
          std::nullopt, std::nullopt}},
        {"KL",
         "reported by Nguyen et al. (2018)",
         {std::nullopt, 65.1, 60.2, std::nullopt, 38.0, 40.4, std::nullopt,
          std::nullopt, std::nullopt}},
        {"LSA",
         "reported by Nguyen et al. (2018)",
         {std::nullopt, 62.5, 49.2, std::nullopt, 36.0, 39.2, std::nullopt,
          std::nullopt, std::nullopt}},
    };
    return rows;
}

std::vector<BaselineRow> parse_baselines(const std::string& json_text,
                                         const std::string& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::parse, origin + ": " + e.what());
    }
    if (!doc.contains("baselines") || !doc["baselines"].is_array()) {
        raise(Errc::missing_key, origin + " lacks a 'baselines' array");
    }
    static const char* variants[3] = {"r1", "r2", "rl"};
    static const char* components[3] = {"p", "r", "f1"};
    std::vector<BaselineRow> rows;
    for (const auto& jr : doc["baselines"]) {
        BaselineRow row;
        if (!jr.contains("label") || !jr["label"].is_string()) {
            raise(Errc::missing_key, origin + ": baseline row lacks 'label'");
        }
        row.label = jr["label"].get<std::string>();
        row.citation = jr.value("citation", std::string());
        const auto scores = jr.value("scores", nlohmann::json::object());
        for (std::size_t v = 0; v < 3; ++v) {
            for (std::size_t c = 0; c < 3; ++c) {
                if (scores.contains(variants[v]) &&
                    scores[variants[v]].contains(components[c])) {
                    row.cells[v * 3 + c] =
                        scores[variants[v]][components[c]].get<double>();
                }
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<BaselineRow> load_baselines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io, "cannot read baselines file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_baselines(text, path);
}

ScoreTable score_table_from_report_json(const std::string& report_json) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(report_json);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::parse, std::string("run report: ") + e.what());
    }
    if (!doc.contains("clusters") || !doc["clusters"].is_array()) {
        raise(Errc::missing_key, "run report lacks a 'clusters' array");
    }
    std::vector<std::pair<std::string, RougeTriple>> per_cluster;
    for (const auto& jc : doc["clusters"]) {
        if (!jc.value("ok", false)) continue;
        if (!jc.contains("id") || !jc.contains("scores")) {
            raise(Errc::missing_key,
                  "run report cluster entry lacks 'id' or 'scores'");
        }
        const auto& js = jc["scores"];
        RougeTriple triple;
        const auto read = [&](const char* key, const char* variant) {
            if (!js.contains(key)) {
                raise(Errc::missing_key,
                      std::string("run report scores lack '") + key + "'");
            }
            RougeScore s;
            s.precision = js[key].at("p").get<double>();
            s.recall = js[key].at("r").get<double>();
            s.f1 = js[key].at("f1").get<double>();
            s.variant = variant;
            return s;
        };
        triple.r1 = read("r1", "R1");
        triple.r2 = read("r2", "R2");
        triple.rl = read("rl", "RL");
        per_cluster.emplace_back(jc["id"].get<std::string>(), triple);
    }
    return make_score_table(std::move(per_cluster));
}

std::string compare_baselines(const std::vector<BaselineRow>& baselines,
                              const ScoreTable* ours) {
    struct DisplayRow {
        std::string label;
        std::array<std::optional<double>, 9> values;
        bool is_ours = false;
    };
    std::vector<DisplayRow> display;
    for (const auto& baseline : baselines) {
        display.push_back({baseline.label, baseline.cells, false});
    }
    if (ours != nullptr && ours->cluster_count > 0) {
        DisplayRow row;
        row.label = "Our model";
        row.is_ours = true;
        for (std::size_t col = 0; col < 9; ++col) {
            row.values[col] = pct1(triple_cell(ours->mean, col));
        }
        display.push_back(std::move(row));
    }

    // Best per column among rows that report a value; ties go to the row
    // listed first. Columns with fewer than two values get no marker.
    std::array<std::ptrdiff_t, 9> best;
    best.fill(-1);
    for (std::size_t col = 0; col < 9; ++col) {
        std::size_t present = 0;
        for (std::size_t r = 0; r < display.size(); ++r) {
            if (!display[r].values[col]) continue;
            present += 1;
            if (best[col] < 0 ||
                *display[r].values[col] >
                    *display[static_cast<std::size_t>(best[col])].values[col]) {
                best[col] = static_cast<std::ptrdiff_t>(r);
            }
        }
        if (present < 2) best[col] = -1;
    }

    std::vector<std::string> header = {"Model"};
    header.insert(header.end(), column_headers().begin(),
                  column_headers().end());
    std::vector<std::vector<std::string>> rows;
    for (std::size_t r = 0; r < display.size(); ++r) {
        std::vector<std::string> cells = {display[r].label};
        for (std::size_t col = 0; col < 9; ++col) {
            std::string cell = "-";
            if (display[r].values[col]) {
                cell = display[r].is_ours
                           ? pct1_str(*display[r].values[col] / 100.0)
                           : baseline_cell_str(*display[r].values[col]);
                if (best[col] == static_cast<std::ptrdiff_t>(r)) {
                    cell = "**" + cell + "**";
                }
            }
            cells.push_back(std::move(cell));
        }
        rows.push_back(std::move(cells));
    }

    std::string out = markdown_table(header, rows);
    out += "\nBaseline rows are the values reported by their sources, not "
           "recomputed here:\n";
    for (const auto& baseline : baselines) {
        out += "- " + baseline.label;
        if (!baseline.citation.empty()) out += ": " + baseline.citation;
        out += "\n";
    }
    return out;
}

}  // namespace vnsum
