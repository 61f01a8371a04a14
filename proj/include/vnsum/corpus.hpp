#pragma once

#include <string>
#include <vector>

namespace vnsum {

struct Document {
    int doc_index = 0;   // position within the parent cluster
    std::string body;    // raw UTF-8 text

    friend bool operator==(const Document&, const Document&) = default;
};

struct DocumentCluster {
    std::string cluster_id;
    std::vector<Document> documents;
    std::vector<std::string> references;

    friend bool operator==(const DocumentCluster&, const DocumentCluster&) = default;
};

// A finding is data, not a failure: validation never throws.
struct ValidationFinding {
    std::string cluster_id;  // empty when the finding concerns the whole corpus
    std::string rule;        // short name of the violated rule
    std::string detail;

    friend bool operator==(const ValidationFinding&, const ValidationFinding&) = default;
};

struct Corpus {
    std::vector<DocumentCluster> clusters;
    std::string source_path;

    // source_path is provenance metadata; equality is structural.
    friend bool operator==(const Corpus& a, const Corpus& b) {
        return a.clusters == b.clusters;
    }
};

// Loads a corpus from a directory tree: one subdirectory per cluster, files
// named `<k>.ref.txt` are reference summaries, every other regular file is a
// document body. Documents and references are each taken in lexicographic
// filename order. When `warnings` is non-null, non-fatal observations (such as
// a root with no cluster directories) are appended to it.
Corpus load_corpus(const std::string& root_path,
                   std::vector<ValidationFinding>* warnings = nullptr);

// Single-file JSON corpus:
//   {"clusters":[{"id":str,"documents":[str,...],"references":[str,...]}]}
Corpus parse_corpus_json(const std::string& json_text);
Corpus load_corpus_json(const std::string& file_path);

// Canonical JSON serialization of the corpus (inverse of parse_corpus_json).
std::string corpus_to_json(const Corpus& c);

// Checks DocumentCluster/Corpus invariants; empty result means all hold.
std::vector<ValidationFinding> validate_corpus(const Corpus& c);

// Convenience: directory when the path is a directory, JSON file otherwise.
Corpus load_corpus_any(const std::string& path,
                       std::vector<ValidationFinding>* warnings = nullptr);

}  // namespace vnsum
