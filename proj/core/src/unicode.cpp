#include "forge/unicode.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <charconv>

#include <fmt/format.h>

namespace forge::unicode {

namespace {

constexpr std::uint32_t kPunctMask = U_GC_P_MASK | U_GC_S_MASK;
constexpr std::uint32_t kWordMask = U_GC_L_MASK | U_GC_M_MASK | U_GC_N_MASK;

bool ascii_space(unsigned char c) { return c == ' ' || (c >= 0x09 && c <= 0x0D); }

}  // namespace

bool is_whitespace(char32_t cp) {
  if (cp < 0x80) return ascii_space(static_cast<unsigned char>(cp));
  return u_isUWhiteSpace(static_cast<UChar32>(cp));
}

bool is_punct_or_symbol(char32_t cp) {
  return (U_GET_GC_MASK(static_cast<UChar32>(cp)) & kPunctMask) != 0;
}

CharClass classify(char32_t cp) {
  if (is_whitespace(cp)) return CharClass::Whitespace;
  const std::uint32_t mask = U_GET_GC_MASK(static_cast<UChar32>(cp));
  if (mask & kPunctMask) return CharClass::Punctuation;
  if (mask & kWordMask) return CharClass::Word;
  return CharClass::Format;
}

namespace detail {

char32_t next(std::string_view text, std::size_t& pos) {
  const auto c = static_cast<unsigned char>(text[pos]);
  if (c < 0x80) {
    ++pos;
    return c;
  }
  UChar32 cp = 0;
  auto i = static_cast<std::int32_t>(pos);
  const auto length = static_cast<std::int32_t>(text.size());
  U8_NEXT(reinterpret_cast<const std::uint8_t*>(text.data()), i, length, cp);
  if (cp < 0) {
    pos += 1;
    return kReplacement;
  }
  pos = static_cast<std::size_t>(i);
  return static_cast<char32_t>(cp);
}

}  // namespace detail

std::u32string decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t pos = 0;
  while (pos < utf8.size()) out.push_back(detail::next(utf8, pos));
  return out;
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

std::string encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size() * 2);
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

std::optional<std::size_t> find_invalid_utf8(std::string_view bytes) {
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    if (static_cast<unsigned char>(bytes[pos]) < 0x80) {
      ++pos;
      continue;
    }
    UChar32 cp = 0;
    auto i = static_cast<std::int32_t>(pos);
    U8_NEXT(reinterpret_cast<const std::uint8_t*>(bytes.data()), i,
            static_cast<std::int32_t>(bytes.size()), cp);
    // U8_NEXT rejects surrogates and overlong forms.
    if (cp < 0) return pos;
    pos = static_cast<std::size_t>(i);
  }
  return std::nullopt;
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  std::size_t start = std::string_view::npos;
  while (pos < text.size()) {
    const std::size_t at = pos;
    const char32_t cp = detail::next(text, pos);
    if (is_whitespace(cp)) {
      if (start != std::string_view::npos) {
        tokens.push_back(text.substr(start, at - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = at;
    }
  }
  if (start != std::string_view::npos) tokens.push_back(text.substr(start));
  return tokens;
}

std::string_view trim_right(std::string_view text) {
  std::size_t end = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = detail::next(text, pos);
    if (!is_whitespace(cp)) end = pos;
  }
  return text.substr(0, end);
}

std::string_view trim(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t probe = pos;
    if (!is_whitespace(detail::next(text, probe))) break;
    pos = probe;
  }
  return trim_right(text.substr(pos));
}

std::string remove_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for_each_codepoint(text, [&](char32_t cp, std::size_t off, std::size_t len) {
    if (!is_whitespace(cp)) out.append(text.substr(off, len));
  });
  return out;
}

std::optional<char32_t> parse_codepoint(std::string_view notation) {
  if (notation.size() < 3 || (notation[0] != 'U' && notation[0] != 'u') || notation[1] != '+') {
    return std::nullopt;
  }
  const std::string_view hex = notation.substr(2);
  if (hex.size() > 6) return std::nullopt;
  std::uint32_t value = 0;
  const auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), value, 16);
  if (ec != std::errc{} || ptr != hex.data() + hex.size()) return std::nullopt;
  if (value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF)) return std::nullopt;
  return static_cast<char32_t>(value);
}

std::string format_codepoint(char32_t cp) {
  return fmt::format("U+{:04X}", static_cast<std::uint32_t>(cp));
}

}  // namespace forge::unicode
