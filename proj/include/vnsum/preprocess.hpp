#pragma once

#include <map>
#include <string>
#include <vector>

#include "vnsum/corpus.hpp"

namespace vnsum {

struct NormConfig {
    bool lowercase = true;
    // Characters deleted outright. Must never contain the sentence
    // terminators `.` `!` `?` — they are needed later for splitting.
    std::string strip_symbols = "%;:";
    // When set, every remaining symbol outside the allowed set (letters
    // including diacritics, digits, whitespace, sentence terminators and
    // commas) is removed as well.
    bool strip_non_alnum = true;
};

struct SentenceRecord {
    std::string cluster_id;
    int doc_index = 0;
    int sent_index = 0;
    std::string text;                 // normalized sentence
    std::vector<std::string> tokens;  // partition of the non-space characters

    friend bool operator==(const SentenceRecord&, const SentenceRecord&) = default;
};

struct PreparedCluster {
    std::string cluster_id;
    // Document-major order, strictly increasing in (doc_index, sent_index).
    std::vector<SentenceRecord> sentences;
};

// Multi-word lexicon for dictionary-based word segmentation. Entries are
// phrases whose syllables are space-separated, e.g. "học sinh".
class Lexicon {
  public:
    Lexicon() = default;
    explicit Lexicon(const std::vector<std::string>& entries);

    bool empty() const { return by_first_.empty(); }

    // Longest entry matching tokens[pos..]; returns the number of syllables
    // covered, or 0 when no entry matches.
    std::size_t longest_match(const std::vector<std::string>& tokens,
                              std::size_t pos) const;

  private:
    // first syllable -> full syllable sequences, longest first
    std::map<std::string, std::vector<std::vector<std::string>>> by_first_;
};

// UTF-8 file with one multi-word entry per line, syllables space-separated.
Lexicon load_lexicon_file(const std::string& path);

const std::vector<std::string>& default_abbreviations();

// UTF-8 file with one abbreviation per line (e.g. "tp.").
std::vector<std::string> load_abbreviation_file(const std::string& path);

// Lowercases (optionally), deletes configured symbols, collapses whitespace
// runs to single spaces and trims. Idempotent.
std::string normalize(const std::string& input, const NormConfig& cfg);

// Splits at `.` `!` `?` boundaries, removing the terminator. A period inside
// a decimal number (digit.digit) or ending a listed abbreviation does not
// terminate a sentence. Empty fragments are dropped.
std::vector<std::string> split_sentences(
    const std::string& input,
    const std::vector<std::string>& abbreviations = default_abbreviations());

// Without a lexicon: whitespace-delimited syllables. With one: greedy
// longest-match left-to-right, joining matched phrases with `_`.
std::vector<std::string> tokenize(const std::string& sentence,
                                  const Lexicon* lexicon = nullptr);

// normalize -> split_sentences -> tokenize for every document, dropping
// sentences with zero tokens. sent_index restarts at 0 for each document.
PreparedCluster preprocess_cluster(
    const DocumentCluster& dc, const NormConfig& cfg,
    const Lexicon* lexicon = nullptr,
    const std::vector<std::string>& abbreviations = default_abbreviations());

}  // namespace vnsum
