#include "vnsum/preprocess.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "vnsum/error.hpp"
#include "vnsum/text.hpp"

namespace vnsum {

namespace {

std::set<char32_t> decode_symbol_set(const std::string& symbols) {
    std::set<char32_t> out;
    std::size_t pos = 0;
    char32_t cp = 0;
    while (pos < symbols.size()) {
        const std::size_t n = text::decode_utf8(symbols, pos, cp);
        if (n == 0) {
            raise(Errc::encoding, "strip_symbols is not valid UTF-8");
        }
        out.insert(cp);
        pos += n;
    }
    return out;
}

bool is_terminator(char32_t cp) {
    return cp == U'.' || cp == U'!' || cp == U'?';
}

std::string trim_ends(std::string_view s) {
    std::size_t begin = 0;
    char32_t cp = 0;
    while (begin < s.size()) {
        const std::size_t n = text::decode_utf8(s, begin, cp);
        if (n == 0 || !text::is_space(cp)) break;
        begin += n;
    }
    std::size_t end = s.size();
    while (end > begin) {
        // Walk back over one trailing codepoint at a time.
        std::size_t start = end - 1;
        while (start > begin &&
               (static_cast<unsigned char>(s[start]) & 0xC0) == 0x80) {
            --start;
        }
        if (text::decode_utf8(s, start, cp) == 0 || !text::is_space(cp)) break;
        end = start;
    }
    return std::string(s.substr(begin, end - begin));
}

// Decoded view of a string: codepoints plus their byte offsets.
struct Decoded {
    std::vector<char32_t> cps;
    std::vector<std::size_t> offsets;  // offsets.size() == cps.size() + 1
};

Decoded decode_all(const std::string& s) {
    Decoded d;
    std::size_t pos = 0;
    char32_t cp = 0;
    while (pos < s.size()) {
        std::size_t n = text::decode_utf8(s, pos, cp);
        if (n == 0) {
            cp = static_cast<unsigned char>(s[pos]);
            n = 1;
        }
        d.offsets.push_back(pos);
        d.cps.push_back(cp);
        pos += n;
    }
    d.offsets.push_back(pos);
    return d;
}

}  // namespace

Lexicon::Lexicon(const std::vector<std::string>& entries) {
    for (const auto& entry : entries) {
        auto syllables = text::split_whitespace(entry);
        if (syllables.size() < 2) continue;  // single syllables add nothing
        by_first_[syllables.front()].push_back(std::move(syllables));
    }
    for (auto& [first, seqs] : by_first_) {
        std::stable_sort(seqs.begin(), seqs.end(),
                         [](const auto& a, const auto& b) {
                             return a.size() > b.size();
                         });
    }
}

std::size_t Lexicon::longest_match(const std::vector<std::string>& tokens,
                                   std::size_t pos) const {
    const auto it = by_first_.find(tokens[pos]);
    if (it == by_first_.end()) return 0;
    for (const auto& seq : it->second) {
        if (pos + seq.size() > tokens.size()) continue;
        if (std::equal(seq.begin(), seq.end(), tokens.begin() + pos)) {
            return seq.size();
        }
    }
    return 0;
}

Lexicon load_lexicon_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io, "cannot read lexicon file: " + path);
    std::vector<std::string> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!text::is_valid_utf8(line)) {
            raise(Errc::encoding, "lexicon file is not valid UTF-8: " + path);
        }
        if (!text::squeeze_spaces(line).empty()) entries.push_back(line);
    }
    return Lexicon(entries);
}

const std::vector<std::string>& default_abbreviations() {
    static const std::vector<std::string> abbrevs = {"tp.", "ts.", "gs.",
                                                     "mr.", "dr."};
    return abbrevs;
}

std::vector<std::string> load_abbreviation_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io, "cannot read abbreviation file: " + path);
    std::vector<std::string> abbrevs;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!text::is_valid_utf8(line)) {
            raise(Errc::encoding,
                  "abbreviation file is not valid UTF-8: " + path);
        }
        const std::string entry = text::squeeze_spaces(line);
        if (!entry.empty()) abbrevs.push_back(entry);
    }
    return abbrevs;
}

std::string normalize(const std::string& input, const NormConfig& cfg) {
    if (!text::is_valid_utf8(input)) {
        raise(Errc::encoding, "normalize: input is not valid UTF-8");
    }
    const auto strip = decode_symbol_set(cfg.strip_symbols);
    for (const char32_t cp : strip) {
        if (is_terminator(cp)) {
            raise(Errc::invalid_argument,
                  "strip_symbols must not contain sentence terminators");
        }
    }

    std::string out;
    out.reserve(input.size());
    std::size_t pos = 0;
    char32_t cp = 0;
    while (pos < input.size()) {
        const std::size_t n = text::decode_utf8(input, pos, cp);
        pos += n;
        if (cfg.lowercase) cp = text::to_lower(cp);
        if (strip.count(cp) > 0) continue;
        if (cfg.strip_non_alnum) {
            const bool allowed = text::is_letter(cp) || text::is_digit(cp) ||
                                 text::is_space(cp) || is_terminator(cp) ||
                                 cp == U',';
            if (!allowed) continue;
        }
        text::append_utf8(out, cp);
    }
    return text::squeeze_spaces(out);
}

std::vector<std::string> split_sentences(
    const std::string& input, const std::vector<std::string>& abbreviations) {
    // Pre-decode abbreviations so the boundary test can look at codepoints.
    std::vector<std::vector<char32_t>> abbrev_cps;
    for (const auto& a : abbreviations) {
        abbrev_cps.push_back(decode_all(text::lowercase(a)).cps);
    }

    const Decoded d = decode_all(input);
    const auto& cps = d.cps;

    std::vector<std::string> sentences;
    std::string current;
    const auto flush = [&] {
        std::string s = trim_ends(current);
        if (!s.empty()) sentences.push_back(std::move(s));
        current.clear();
    };

    for (std::size_t i = 0; i < cps.size(); ++i) {
        const char32_t cp = cps[i];
        if (!is_terminator(cp)) {
            current.append(input, d.offsets[i], d.offsets[i + 1] - d.offsets[i]);
            continue;
        }
        bool protects = false;
        if (cp == U'.') {
            // Decimal guard: digit on both sides of the period.
            if (i > 0 && i + 1 < cps.size() && text::is_digit(cps[i - 1]) &&
                text::is_digit(cps[i + 1])) {
                protects = true;
            }
            // Abbreviation guard: the text ending at this period (inclusive)
            // spells a listed abbreviation starting at a word boundary.
            if (!protects) {
                for (const auto& abbrev : abbrev_cps) {
                    if (abbrev.empty() || abbrev.size() > i + 1) continue;
                    const std::size_t start = i + 1 - abbrev.size();
                    bool match = true;
                    for (std::size_t j = 0; j < abbrev.size(); ++j) {
                        if (text::to_lower(cps[start + j]) != abbrev[j]) {
                            match = false;
                            break;
                        }
                    }
                    if (match &&
                        (start == 0 || !text::is_letter(cps[start - 1]))) {
                        protects = true;
                        break;
                    }
                }
            }
        }
        if (protects) {
            current.append(input, d.offsets[i], d.offsets[i + 1] - d.offsets[i]);
        } else {
            flush();
        }
    }
    flush();
    return sentences;
}

std::vector<std::string> tokenize(const std::string& sentence,
                                  const Lexicon* lexicon) {
    std::vector<std::string> syllables = text::split_whitespace(sentence);
    if (lexicon == nullptr || lexicon->empty()) return syllables;

    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (pos < syllables.size()) {
        const std::size_t covered = lexicon->longest_match(syllables, pos);
        if (covered >= 2) {
            std::string joined = syllables[pos];
            for (std::size_t j = 1; j < covered; ++j) {
                joined += '_';
                joined += syllables[pos + j];
            }
            tokens.push_back(std::move(joined));
            pos += covered;
        } else {
            tokens.push_back(syllables[pos]);
            pos += 1;
        }
    }
    return tokens;
}

PreparedCluster preprocess_cluster(
    const DocumentCluster& dc, const NormConfig& cfg, const Lexicon* lexicon,
    const std::vector<std::string>& abbreviations) {
    PreparedCluster prepared;
    prepared.cluster_id = dc.cluster_id;
    for (const auto& doc : dc.documents) {
        int sent_index = 0;
        const std::string normalized = normalize(doc.body, cfg);
        for (const auto& sentence : split_sentences(normalized, abbreviations)) {
            auto tokens = tokenize(sentence, lexicon);
            if (tokens.empty()) continue;
            SentenceRecord rec;
            rec.cluster_id = dc.cluster_id;
            rec.doc_index = doc.doc_index;
            rec.sent_index = sent_index++;
            rec.text = sentence;
            rec.tokens = std::move(tokens);
            prepared.sentences.push_back(std::move(rec));
        }
    }
    if (prepared.sentences.empty()) {
        raise(Errc::empty_after_preprocess,
              "cluster '" + dc.cluster_id +
                  "' has no sentences after preprocessing");
    }
    return prepared;
}

}  // namespace vnsum
