#include "vnsum/text.hpp"

#include <cctype>

namespace vnsum::text {

std::size_t decode_utf8(std::string_view s, std::size_t pos, char32_t& cp) {
    if (pos >= s.size()) return 0;
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) {
        cp = b0;
        return 1;
    }
    std::size_t len = 0;
    char32_t acc = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        acc = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        acc = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        acc = b0 & 0x07;
    } else {
        return 0;  // stray continuation byte or invalid lead
    }
    if (pos + len > s.size()) return 0;
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) return 0;
        acc = (acc << 6) | (b & 0x3F);
    }
    // Reject overlong encodings, UTF-16 surrogates and out-of-range values.
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (acc < kMin[len]) return 0;
    if (acc >= 0xD800 && acc <= 0xDFFF) return 0;
    if (acc > 0x10FFFF) return 0;
    cp = acc;
    return len;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_valid_utf8(std::string_view s) {
    std::size_t pos = 0;
    char32_t cp = 0;
    while (pos < s.size()) {
        const std::size_t n = decode_utf8(s, pos, cp);
        if (n == 0) return false;
        pos += n;
    }
    return true;
}

char32_t to_lower(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 32;
    // Latin-1 Supplement uppercase block, skipping the multiplication sign.
    if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 32;
    // Latin Extended-A: case pairs alternate even/odd.
    if (cp >= 0x0100 && cp <= 0x0137 && (cp % 2 == 0)) return cp + 1;
    if (cp >= 0x0139 && cp <= 0x0148 && (cp % 2 == 1)) return cp + 1;
    if (cp >= 0x014A && cp <= 0x0177 && (cp % 2 == 0)) return cp + 1;
    if (cp == 0x0178) return 0x00FF;
    if (cp == 0x0179 || cp == 0x017B || cp == 0x017D) return cp + 1;
    // Latin Extended-B horn vowels used by Vietnamese.
    if (cp == 0x01A0) return 0x01A1;
    if (cp == 0x01AF) return 0x01B0;
    // Latin Extended Additional (precomposed Vietnamese letters).
    if (cp >= 0x1E00 && cp <= 0x1EFF && (cp % 2 == 0)) return cp + 1;
    return cp;
}

bool is_letter(char32_t cp) {
    if ((cp >= U'A' && cp <= U'Z') || (cp >= U'a' && cp <= U'z')) return true;
    if (cp >= 0x00C0 && cp <= 0x00FF && cp != 0x00D7 && cp != 0x00F7) return true;
    if (cp >= 0x0100 && cp <= 0x024F) return true;
    if (cp >= 0x1E00 && cp <= 0x1EFF) return true;
    return false;
}

bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

bool is_space(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
           cp == U'\f' || cp == U'\v' || cp == 0x00A0;
}

std::string lowercase(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t pos = 0;
    char32_t cp = 0;
    while (pos < s.size()) {
        const std::size_t n = decode_utf8(s, pos, cp);
        if (n == 0) {
            // Caller is expected to have validated; pass the byte through.
            out.push_back(s[pos]);
            pos += 1;
            continue;
        }
        append_utf8(out, to_lower(cp));
        pos += n;
    }
    return out;
}

std::vector<std::string> split_whitespace(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    std::size_t pos = 0;
    char32_t cp = 0;
    while (pos < s.size()) {
        std::size_t n = decode_utf8(s, pos, cp);
        if (n == 0) {
            cp = static_cast<unsigned char>(s[pos]);
            n = 1;
        }
        if (is_space(cp)) {
            if (!cur.empty()) {
                out.push_back(std::move(cur));
                cur.clear();
            }
        } else {
            cur.append(s.substr(pos, n));
        }
        pos += n;
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string join(std::span<const std::string> parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

std::string squeeze_spaces(std::string_view s) {
    const auto parts = split_whitespace(s);
    return join(parts, " ");
}

}  // namespace vnsum::text
