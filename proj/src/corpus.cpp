#include "vnsum/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vnsum/error.hpp"
#include "vnsum/text.hpp"

namespace fs = std::filesystem;

namespace vnsum {

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) raise(Errc::io, "cannot read file: " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) raise(Errc::io, "read failure: " + p.string());
    return buf.str();
}

std::string read_utf8_file(const fs::path& p) {
    std::string data = read_file(p);
    if (!text::is_valid_utf8(data)) {
        raise(Errc::encoding, "file is not valid UTF-8: " + p.string());
    }
    return data;
}

bool is_reference_file(const std::string& filename) {
    constexpr std::string_view suffix = ".ref.txt";
    return filename.size() > suffix.size() &&
           filename.compare(filename.size() - suffix.size(), suffix.size(),
                            suffix) == 0;
}

std::string trimmed(const std::string& s) { return text::squeeze_spaces(s); }

}  // namespace

Corpus load_corpus(const std::string& root_path,
                   std::vector<ValidationFinding>* warnings) {
    const fs::path root(root_path);
    std::error_code ec;
    if (!fs::exists(root, ec) || !fs::is_directory(root, ec)) {
        raise(Errc::missing_root, "corpus root is not a directory: " + root_path);
    }

    std::vector<fs::path> cluster_dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) cluster_dirs.push_back(entry.path());
    }
    std::sort(cluster_dirs.begin(), cluster_dirs.end());

    Corpus corpus;
    corpus.source_path = root_path;

    if (cluster_dirs.empty() && warnings != nullptr) {
        warnings->push_back({"", "no clusters",
                             "corpus root contains no cluster directories"});
    }

    for (const auto& dir : cluster_dirs) {
        DocumentCluster cluster;
        cluster.cluster_id = dir.filename().string();

        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file()) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end(),
                  [](const fs::path& a, const fs::path& b) {
                      return a.filename().string() < b.filename().string();
                  });

        for (const auto& file : files) {
            if (is_reference_file(file.filename().string())) {
                cluster.references.push_back(read_utf8_file(file));
            } else {
                Document doc;
                doc.doc_index = static_cast<int>(cluster.documents.size());
                doc.body = read_utf8_file(file);
                cluster.documents.push_back(std::move(doc));
            }
        }

        if (cluster.documents.empty()) {
            raise(Errc::empty_cluster,
                  "cluster '" + cluster.cluster_id + "' has no documents");
        }
        if (cluster.references.empty()) {
            raise(Errc::no_reference,
                  "cluster '" + cluster.cluster_id + "' has no reference files");
        }
        corpus.clusters.push_back(std::move(cluster));
    }
    return corpus;
}

Corpus parse_corpus_json(const std::string& json_text) {
    if (!text::is_valid_utf8(json_text)) {
        raise(Errc::encoding, "corpus JSON is not valid UTF-8");
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::parse, std::string("corpus JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("clusters")) {
        raise(Errc::missing_key, "corpus JSON lacks a 'clusters' array");
    }
    const auto& clusters = doc["clusters"];
    if (!clusters.is_array()) {
        raise(Errc::parse, "'clusters' must be an array");
    }

    Corpus corpus;
    for (const auto& jc : clusters) {
        if (!jc.is_object()) raise(Errc::parse, "cluster entry must be an object");
        for (const char* key : {"id", "documents", "references"}) {
            if (!jc.contains(key)) {
                raise(Errc::missing_key,
                      std::string("cluster entry lacks '") + key + "'");
            }
        }
        DocumentCluster cluster;
        if (!jc["id"].is_string()) raise(Errc::parse, "cluster 'id' must be a string");
        cluster.cluster_id = jc["id"].get<std::string>();
        if (!jc["documents"].is_array() || !jc["references"].is_array()) {
            raise(Errc::parse,
                  "cluster 'documents' and 'references' must be arrays");
        }
        for (const auto& jd : jc["documents"]) {
            if (!jd.is_string()) raise(Errc::parse, "document body must be a string");
            Document d;
            d.doc_index = static_cast<int>(cluster.documents.size());
            d.body = jd.get<std::string>();
            cluster.documents.push_back(std::move(d));
        }
        for (const auto& jr : jc["references"]) {
            if (!jr.is_string()) raise(Errc::parse, "reference must be a string");
            cluster.references.push_back(jr.get<std::string>());
        }
        if (cluster.documents.empty()) {
            raise(Errc::empty_cluster,
                  "cluster '" + cluster.cluster_id + "' has no documents");
        }
        if (cluster.references.empty()) {
            raise(Errc::no_reference,
                  "cluster '" + cluster.cluster_id + "' has no references");
        }
        corpus.clusters.push_back(std::move(cluster));
    }
    return corpus;
}

Corpus load_corpus_json(const std::string& file_path) {
    Corpus c = parse_corpus_json(read_file(file_path));
    c.source_path = file_path;
    return c;
}

std::string corpus_to_json(const Corpus& c) {
    nlohmann::ordered_json doc;
    doc["clusters"] = nlohmann::ordered_json::array();
    for (const auto& cluster : c.clusters) {
        nlohmann::ordered_json jc;
        jc["id"] = cluster.cluster_id;
        auto docs = nlohmann::ordered_json::array();
        for (const auto& d : cluster.documents) docs.push_back(d.body);
        jc["documents"] = std::move(docs);
        jc["references"] = cluster.references;
        doc["clusters"].push_back(std::move(jc));
    }
    return doc.dump(2) + "\n";
}

std::vector<ValidationFinding> validate_corpus(const Corpus& c) {
    std::vector<ValidationFinding> findings;
    std::set<std::string> seen_ids;
    for (const auto& cluster : c.clusters) {
        if (!seen_ids.insert(cluster.cluster_id).second) {
            findings.push_back({cluster.cluster_id, "duplicate cluster_id",
                                "cluster_id appears more than once"});
        }
        if (cluster.documents.empty()) {
            findings.push_back({cluster.cluster_id, "no documents",
                                "cluster has an empty document list"});
        }
        if (cluster.references.empty()) {
            findings.push_back({cluster.cluster_id, "no references",
                                "cluster has no reference summaries"});
        }
        for (const auto& doc : cluster.documents) {
            if (doc.doc_index != static_cast<int>(&doc - cluster.documents.data())) {
                findings.push_back({cluster.cluster_id, "doc_index mismatch",
                                    "doc_index does not equal sequence position"});
            }
            if (trimmed(doc.body).empty()) {
                findings.push_back({cluster.cluster_id, "empty document body",
                                    "document " + std::to_string(doc.doc_index) +
                                        " is empty after trimming"});
            }
        }
    }
    return findings;
}

Corpus load_corpus_any(const std::string& path,
                       std::vector<ValidationFinding>* warnings) {
    std::error_code ec;
    if (fs::is_directory(fs::path(path), ec)) {
        return load_corpus(path, warnings);
    }
    return load_corpus_json(path);
}

}  // namespace vnsum
