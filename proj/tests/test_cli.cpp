#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "temp_dir.hpp"

using testutil::TempDir;
using testutil::read_file;
using testutil::write_file;

namespace {

std::string g_cli;

const std::string kMiniCorpus =
    std::string(VNSUM_SOURCE_DIR) + "/data/mini_corpus";

std::string golden(const std::string& name) {
    return read_file(std::string(VNSUM_SOURCE_DIR) + "/tests/data/" + name);
}

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args) {
    TempDir capture;
    const std::string out_file = (capture.path / "stdout").string();
    const std::string err_file = (capture.path / "stderr").string();
    const std::string command =
        g_cli + " " + args + " > " + out_file + " 2> " + err_file;
    const int status = std::system(command.c_str());

    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_file(capture.path / "stdout");
    result.err = read_file(capture.path / "stderr");
    return result;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

constexpr const char* kMixedCorpusJson = R"json({"clusters": [
    {"id": "bad", "documents": ["%%% ;;;"], "references": ["tham khảo."]},
    {"id": "good",
     "documents": ["Trời mưa to ở miền Trung. Nước sông dâng cao. Dân sơ tán khẩn cấp."],
     "references": ["Mưa to, dân sơ tán."]}
]})json";

}  // namespace

TEST_CASE("help output matches the golden files") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("--help").out == golden("help_root.golden"));
    for (const std::string sub :
         {"summarize", "sweep", "score", "compare", "validate"}) {
        const RunResult result = run_cli(sub + " --help");
        CHECK(result.exit_code == 0);
        CHECK(result.out == golden("help_" + sub + ".golden"));
        CHECK(result.err.empty());
    }
}

TEST_CASE("version flag prints the library version") {
    const RunResult result = run_cli("--version");
    CHECK(result.exit_code == 0);
    CHECK(result.out == "1.0.0\n");
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("").exit_code == 2);                       // no subcommand
    CHECK(run_cli("summarize").exit_code == 2);              // missing corpus
    CHECK(run_cli("frobnicate").exit_code == 2);             // bad subcommand

    const RunResult unknown =
        run_cli("summarize --corpus " + kMiniCorpus + " --bogus");
    CHECK(unknown.exit_code == 2);
    CHECK(unknown.err.find("--bogus") != std::string::npos);
    CHECK(unknown.out.empty());

    const RunResult missing = run_cli("summarize --corpus /nonexistent/dir");
    CHECK(missing.exit_code == 2);
}

TEST_CASE("summarize renders a score table and writes run outputs") {
    TempDir out;
    const RunResult result =
        run_cli("summarize --corpus " + kMiniCorpus +
                " --extractive-only --seed 7 --out " + out.str());
    CHECK(result.exit_code == 0);
    CHECK(result.err.find("summarize: corpus=" + kMiniCorpus +
                          " alpha=0.2 seed=7 embedder=hash clusters=3") !=
          std::string::npos);
    CHECK(result.out.find("| Cluster | R1 P |") != std::string::npos);
    CHECK(result.out.find("| bao_lut |") != std::string::npos);
    CHECK(result.out.find("| gia_xang |") != std::string::npos);
    CHECK(result.out.find("| sea_games |") != std::string::npos);
    CHECK(result.out.find("| Mean |") != std::string::npos);

    const auto report =
        nlohmann::json::parse(read_file(out.path / "scores.json"));
    CHECK(report["mode"] == "extractive");
    CHECK(report["seed"] == 7);
    CHECK(report["clusters"].size() == 3);
    for (const char* id : {"bao_lut", "gia_xang", "sea_games"}) {
        const std::string summary =
            read_file(out.path / "summaries" / (std::string(id) + ".txt"));
        CHECK_FALSE(summary.empty());
        CHECK(summary.back() == '\n');
    }
}

TEST_CASE("summarize is byte-identical across reruns with one seed") {
    TempDir first_dir;
    TempDir second_dir;
    const std::string base = "summarize --corpus " + kMiniCorpus +
                             " --extractive-only --seed 7 --out ";
    const RunResult first = run_cli(base + first_dir.str());
    const RunResult second = run_cli(base + second_dir.str());
    CHECK(first.exit_code == 0);
    CHECK(second.exit_code == 0);
    CHECK(first.out == second.out);
    CHECK(read_file(first_dir.path / "scores.json") ==
          read_file(second_dir.path / "scores.json"));

    TempDir reseeded_dir;
    const RunResult reseeded =
        run_cli("summarize --corpus " + kMiniCorpus +
                " --extractive-only --seed 8 --out " + reseeded_dir.str());
    CHECK(reseeded.exit_code == 0);
    CHECK(nlohmann::json::parse(
              read_file(reseeded_dir.path / "scores.json"))["seed"] == 8);
}

TEST_CASE("summarize validates alpha from the command line") {
    TempDir out;
    const RunResult result =
        run_cli("summarize --corpus " + kMiniCorpus + " --alpha 1.5 --out " +
                out.str());
    CHECK(result.exit_code == 2);
    CHECK(result.err.find("error:") != std::string::npos);
    CHECK(result.err.find("alpha must be in (0, 1]") != std::string::npos);
    CHECK(result.out.empty());
}

TEST_CASE("summarize emits csv and json tables on request") {
    TempDir out;
    const std::string base = "summarize --corpus " + kMiniCorpus +
                             " --extractive-only --seed 7 --out " + out.str();
    const RunResult csv = run_cli(base + " --format csv");
    CHECK(csv.exit_code == 0);
    CHECK(csv.out.rfind("cluster,r1_p,r1_r,r1_f1,", 0) == 0);
    CHECK(csv.out.find("\nmean,") != std::string::npos);

    const RunResult json = run_cli(base + " --format json");
    CHECK(json.exit_code == 0);
    const auto parsed = nlohmann::json::parse(json.out);
    CHECK(parsed["clusters"].size() == 3);
    CHECK_FALSE(parsed["mean"].is_null());

    CHECK(run_cli(base + " --format yaml").exit_code == 2);
}

TEST_CASE("summarize accepts a corpus JSON file and reports partial failure") {
    TempDir dir;
    const auto corpus_file = dir.path / "corpus.json";
    write_file(corpus_file, kMixedCorpusJson);
    TempDir out;

    const RunResult result =
        run_cli("summarize --corpus " + corpus_file.string() +
                " --extractive-only --out " + out.str());
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("warning: 1 of 2 clusters failed") !=
          std::string::npos);
    CHECK(result.out.find("| good |") != std::string::npos);

    const auto report =
        nlohmann::json::parse(read_file(out.path / "scores.json"));
    CHECK(report["failed"] == 1);
}

TEST_CASE("flags read from a config file sit between defaults and flags") {
    TempDir dir;
    const auto config = dir.path / "run.toml";
    write_file(config, "[summarize]\nalpha=0.3\nseed=9\n");
    TempDir out;

    const RunResult from_config =
        run_cli("--config " + config.string() + " summarize --corpus " +
                kMiniCorpus + " --extractive-only --out " + out.str());
    CHECK(from_config.exit_code == 0);
    CHECK(from_config.err.find("alpha=0.3 seed=9") != std::string::npos);

    const RunResult overridden =
        run_cli("--config " + config.string() + " summarize --corpus " +
                kMiniCorpus + " --extractive-only --alpha 0.4 --out " +
                out.str());
    CHECK(overridden.exit_code == 0);
    CHECK(overridden.err.find("alpha=0.4 seed=9") != std::string::npos);
}

TEST_CASE("sweep tabulates one row per alpha and writes sweep files") {
    TempDir out;
    const RunResult result =
        run_cli("sweep --corpus " + kMiniCorpus +
                " --alphas 0.1,0.2,0.3 --seed 7 --out " + out.str());
    CHECK(result.exit_code == 0);
    CHECK(result.err.find("sweep: corpus=" + kMiniCorpus +
                          " seed=7 embedder=hash alphas=0.1,0.2,0.3") !=
          std::string::npos);
    CHECK(result.out.find("| Alpha | R1 P |") != std::string::npos);
    CHECK(count_of(result.out, "\n| 0.") == 3);
    CHECK(read_file(out.path / "sweep.md") == result.out);

    const std::string csv = read_file(out.path / "sweep.csv");
    CHECK(csv.rfind("alpha,r1_p", 0) == 0);
    CHECK(count_of(csv, "\n0.") == 3);

    TempDir again_dir;
    const RunResult again =
        run_cli("sweep --corpus " + kMiniCorpus +
                " --alphas 0.1,0.2,0.3 --seed 7 --out " + again_dir.str());
    CHECK(again.out == result.out);
}

TEST_CASE("sweep rejects duplicate alphas as a usage error") {
    TempDir out;
    const RunResult result = run_cli("sweep --corpus " + kMiniCorpus +
                                     " --alphas 0.2,0.2 --out " + out.str());
    CHECK(result.exit_code == 2);
    CHECK(result.err.find("alpha 0.2 appears twice") != std::string::npos);
}

TEST_CASE("score prints rounded scores unless --raw is given") {
    TempDir dir;
    const auto candidate = dir.path / "candidate.txt";
    const auto reference = dir.path / "reference.txt";
    write_file(candidate, "xe máy tốt\n");
    write_file(reference, "xe máy hỏng\n");

    const std::string base = "score --candidate " + candidate.string() +
                             " --reference " + reference.string();
    const RunResult rounded = run_cli(base);
    CHECK(rounded.exit_code == 0);
    const auto parsed = nlohmann::json::parse(rounded.out);
    CHECK(parsed["r1"]["p"] == 0.6667);
    CHECK(parsed["r1"]["f1"] == 0.6667);
    CHECK(parsed["r2"]["f1"] == 0.5);
    CHECK(parsed["rl"]["f1"] == 0.6667);

    const RunResult raw = run_cli(base + " --raw");
    CHECK(raw.exit_code == 0);
    CHECK(raw.out.find("0.6666666666666666") != std::string::npos);
    CHECK(nlohmann::json::parse(raw.out)["r1"]["p"] == 2.0 / 3.0);

    // A second reference is averaged in component-wise.
    const auto other = dir.path / "other.txt";
    write_file(other, "trời nắng đẹp\n");
    const RunResult two = run_cli(base + " --reference " + other.string());
    CHECK(two.exit_code == 0);
    CHECK(nlohmann::json::parse(two.out)["r1"]["p"] == 0.3333);

    CHECK(run_cli("score --candidate " + candidate.string()).exit_code == 2);
    CHECK(run_cli("score --candidate /nonexistent --reference " +
                  reference.string())
              .exit_code == 2);
}

TEST_CASE("compare renders baselines with and without our scores") {
    const RunResult plain = run_cli("compare");
    CHECK(plain.exit_code == 0);
    CHECK(plain.out.find("| Model | R1 P |") != std::string::npos);
    CHECK(plain.out.find("| Thanh et al. (2022) |") != std::string::npos);
    CHECK(plain.out.find("34.89") != std::string::npos);
    CHECK(plain.out.find("| MART |") != std::string::npos);
    CHECK(plain.out.find("| KL |") != std::string::npos);
    CHECK(plain.out.find("| LSA |") != std::string::npos);
    CHECK(plain.out.find("Our model") == std::string::npos);

    TempDir out;
    CHECK(run_cli("summarize --corpus " + kMiniCorpus +
                  " --extractive-only --seed 7 --out " + out.str())
              .exit_code == 0);
    const RunResult with_ours =
        run_cli("compare --report " + (out.path / "scores.json").string());
    CHECK(with_ours.exit_code == 0);
    CHECK(with_ours.out.find("| Our model |") != std::string::npos);

    TempDir dir;
    const auto custom = dir.path / "baselines.json";
    write_file(custom, R"json({"baselines": [
        {"label": "Other system", "citation": "someone",
         "scores": {"r1": {"f1": 50.0}}}
    ]})json");
    const RunResult customized =
        run_cli("compare --baselines " + custom.string());
    CHECK(customized.exit_code == 0);
    CHECK(customized.out.find("| Other system |") != std::string::npos);
    CHECK(customized.out.find("Thanh") == std::string::npos);
}

TEST_CASE("validate reports findings and exits nonzero when they exist") {
    const RunResult clean = run_cli("validate --corpus " + kMiniCorpus);
    CHECK(clean.exit_code == 0);
    CHECK(nlohmann::json::parse(clean.out).empty());

    TempDir dir;
    const auto corpus_file = dir.path / "corpus.json";
    write_file(corpus_file, R"json({"clusters": [
        {"id": "x", "documents": ["   "], "references": ["r"]},
        {"id": "x", "documents": ["nội dung."], "references": ["r"]}
    ]})json");
    const RunResult dirty = run_cli("validate --corpus " +
                                    corpus_file.string());
    CHECK(dirty.exit_code == 1);
    const auto findings = nlohmann::json::parse(dirty.out);
    REQUIRE(findings.size() == 2);
    CHECK(findings[0]["rule"] == "empty document body");
    CHECK(findings[1]["rule"] == "duplicate cluster_id");

    CHECK(run_cli("validate --corpus /nonexistent").exit_code == 2);
}

int main(int argc, char** argv) {
    std::vector<char*> args;
    for (int i = 0; i < argc; ++i) {
        if (std::string(argv[i]) == "--cli" && i + 1 < argc) {
            g_cli = argv[++i];
            continue;
        }
        args.push_back(argv[i]);
    }
    if (g_cli.empty()) {
        std::fprintf(stderr, "usage: %s --cli <path-to-vnsum-binary>\n",
                     argv[0]);
        return 2;
    }
    // The runs must not pick up an ambient endpoint configuration.
    ::unsetenv("LLM_URL");
    ::unsetenv("LLM_TOKEN");
    ::unsetenv("EMBED_URL");

    doctest::Context context(static_cast<int>(args.size()), args.data());
    return context.run();
}
