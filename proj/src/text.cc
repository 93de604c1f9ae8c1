#include "clozeqa/text.h"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <cstdint>

namespace clozeqa::text {
namespace {

// ICU's UTF-8 macros index with int32_t; strings beyond 2 GiB are not a
// supported input.
using Index = int32_t;

UChar32 decode_at(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return U_SENTINEL;
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  UChar32 c;
  Index i = static_cast<Index>(pos);
  U8_NEXT(p, i, static_cast<Index>(s.size()), c);
  return c;
}

UChar32 decode_before(std::string_view s, std::size_t pos) {
  if (pos == 0 || pos > s.size()) return U_SENTINEL;
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  UChar32 c;
  Index i = static_cast<Index>(pos);
  U8_PREV(p, 0, i, c);
  return c;
}

bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t n = 0;
  U8_APPEND_UNSAFE(buf, n, c);
  out.append(buf, static_cast<std::size_t>(n));
}

template <typename Map>
std::string map_code_points(std::string_view s, Map&& map) {
  std::string out;
  out.reserve(s.size());
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const Index n = static_cast<Index>(s.size());
  Index i = 0;
  while (i < n) {
    const Index begin = i;
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c < 0) {
      out.append(s.data() + begin, static_cast<std::size_t>(i - begin));
      continue;
    }
    map(out, c, s.substr(begin, static_cast<std::size_t>(i - begin)));
  }
  return out;
}

}  // namespace

bool is_valid_utf8(std::string_view s) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const Index n = static_cast<Index>(s.size());
  Index i = 0;
  while (i < n) {
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c < 0) return false;
  }
  return true;
}

std::size_t count_code_points(std::string_view s) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const Index n = static_cast<Index>(s.size());
  Index i = 0;
  std::size_t count = 0;
  while (i < n) {
    UChar32 c;
    U8_NEXT(p, i, n, c);
    ++count;
  }
  return count;
}

bool is_alnum_at(std::string_view s, std::size_t pos) {
  const UChar32 c = decode_at(s, pos);
  return c >= 0 && u_isalnum(c);
}

bool is_alnum_before(std::string_view s, std::size_t pos) {
  const UChar32 c = decode_before(s, pos);
  return c >= 0 && u_isalnum(c);
}

bool splits_alnum_run(std::string_view s, std::size_t pos) {
  if (pos == 0 || pos >= s.size()) return false;
  if (is_continuation(static_cast<unsigned char>(s[pos]))) return true;
  return is_alnum_before(s, pos) && is_alnum_at(s, pos);
}

std::string fold_case_preserving_offsets(std::string_view s) {
  return map_code_points(
      s, [](std::string& out, UChar32 c, std::string_view original) {
        const UChar32 lower = u_tolower(c);
        if (lower != c && U8_LENGTH(lower) == U8_LENGTH(c)) {
          append_utf8(out, lower);
        } else {
          out.append(original);
        }
      });
}

std::string to_lower(std::string_view s) {
  return map_code_points(s, [](std::string& out, UChar32 c, std::string_view) {
    append_utf8(out, u_tolower(c));
  });
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_ascii_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_ascii_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<ByteRange> whitespace_tokens(std::string_view s) {
  std::vector<ByteRange> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_ascii_space(static_cast<unsigned char>(s[i]))) {
      ++i;
    }
    if (i >= s.size()) break;
    const std::size_t start = i;
    while (i < s.size() && !is_ascii_space(static_cast<unsigned char>(s[i]))) {
      ++i;
    }
    tokens.push_back({start, i});
  }
  return tokens;
}

std::size_t code_point_to_byte_offset(std::string_view s, std::size_t cp) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const Index n = static_cast<Index>(s.size());
  Index i = 0;
  for (std::size_t k = 0; k < cp; ++k) {
    if (i >= n) return std::string_view::npos;
    UChar32 c;
    U8_NEXT(p, i, n, c);
  }
  return static_cast<std::size_t>(i);
}

}  // namespace clozeqa::text
