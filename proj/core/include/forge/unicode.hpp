#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace forge::unicode {

inline constexpr char32_t kReplacement = 0xFFFD;

enum class CharClass {
  Whitespace,   // White_Space property
  Punctuation,  // general categories P* and S*
  Format,       // controls, format characters, surrogates, unassigned
  Word,         // letters, marks, numbers
};

CharClass classify(char32_t cp);
bool is_whitespace(char32_t cp);
bool is_punct_or_symbol(char32_t cp);

// Decodes UTF-8; invalid sequences decode to U+FFFD.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

// Returns the byte offset of the first invalid sequence, if any. Encoded
// surrogates are invalid.
std::optional<std::size_t> find_invalid_utf8(std::string_view bytes);

// Calls fn(cp, byte_offset, byte_length) for each codepoint.
template <class Fn>
void for_each_codepoint(std::string_view text, Fn&& fn);

// Maximal runs of non-whitespace, in order, as views into text.
std::vector<std::string_view> split_whitespace(std::string_view text);
std::string_view trim(std::string_view text);
std::string_view trim_right(std::string_view text);
std::string remove_whitespace(std::string_view text);

// "U+06CC" notation.
std::optional<char32_t> parse_codepoint(std::string_view notation);
std::string format_codepoint(char32_t cp);

namespace detail {
// Decodes one codepoint at text[pos]; advances pos. Invalid input yields
// kReplacement and consumes one byte.
char32_t next(std::string_view text, std::size_t& pos);
}  // namespace detail

template <class Fn>
void for_each_codepoint(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const char32_t cp = detail::next(text, pos);
    fn(cp, start, pos - start);
  }
}

}  // namespace forge::unicode
