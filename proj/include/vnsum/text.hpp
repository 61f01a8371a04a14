#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vnsum::text {

// Decodes the UTF-8 sequence starting at s[pos] into cp and returns the number
// of bytes consumed. Returns 0 on malformed input (overlong forms, surrogates,
// truncated sequences, values above U+10FFFF).
std::size_t decode_utf8(std::string_view s, std::size_t pos, char32_t& cp);

void append_utf8(std::string& out, char32_t cp);

bool is_valid_utf8(std::string_view s);

// Simple lowercase mapping over ASCII, Latin-1 Supplement, Latin Extended-A/B
// and Latin Extended Additional. That covers every precomposed Vietnamese
// letter; other codepoints pass through unchanged.
char32_t to_lower(char32_t cp);

// Letter/digit classification over the same Latin blocks.
bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_space(char32_t cp);

std::string lowercase(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);

std::string join(std::span<const std::string> parts, std::string_view sep);

// Collapses whitespace runs to single spaces and trims the ends.
std::string squeeze_spaces(std::string_view s);

}  // namespace vnsum::text
