#ifndef CLOZEQA_TEXT_H_
#define CLOZEQA_TEXT_H_

// UTF-8 helpers shared by the gazetteer, matcher, augmenter and metric.
// All offsets are byte offsets.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace clozeqa::text {

struct ByteRange {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const ByteRange&, const ByteRange&) = default;
};

inline bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_valid_utf8(std::string_view s);

// Number of code points; ill-formed bytes count one each.
std::size_t count_code_points(std::string_view s);

// True if the code point starting at `pos` is a letter or digit.
bool is_alnum_at(std::string_view s, std::size_t pos);

// True if the code point ending right before `pos` is a letter or digit.
bool is_alnum_before(std::string_view s, std::size_t pos);

// True if `pos` splits an alphanumeric run, i.e. the code points on both
// sides of the offset are alphanumeric. Offsets that fall inside a multi-byte
// sequence also count as "inside".
bool splits_alnum_run(std::string_view s, std::size_t pos);

// Per-code-point lowercase mapping that never changes the byte length of the
// string, so offsets into the folded text are valid offsets into the source.
// Code points whose lowercase form has a different UTF-8 length are kept.
std::string fold_case_preserving_offsets(std::string_view s);

// Unicode simple lowercase mapping.
std::string to_lower(std::string_view s);

// Trims ASCII whitespace from both ends.
std::string_view trim(std::string_view s);

// Maximal runs of non-whitespace bytes.
std::vector<ByteRange> whitespace_tokens(std::string_view s);

// Converts code point offsets to byte offsets. Returns npos for offsets past
// the end of the string.
std::size_t code_point_to_byte_offset(std::string_view s, std::size_t cp);

}  // namespace clozeqa::text

#endif  // CLOZEQA_TEXT_H_
