#include "clozeqa/text.h"

#include <gtest/gtest.h>

namespace clozeqa::text {
namespace {

TEST(Text, AlnumBoundariesAscii) {
  const std::string_view s = "Art, Artificial";
  EXPECT_FALSE(splits_alnum_run(s, 0));
  EXPECT_FALSE(splits_alnum_run(s, 3));  // "Art|,"
  EXPECT_TRUE(splits_alnum_run(s, 8));   // "Ar|tificial"
  EXPECT_FALSE(splits_alnum_run(s, s.size()));
}

TEST(Text, AlnumBoundariesUnicode) {
  // "Zürich" is one run; "é" is two bytes.
  const std::string s = "Z\xC3\xBCrich caf\xC3\xA9";
  EXPECT_TRUE(splits_alnum_run(s, 1));   // Z|ü
  EXPECT_TRUE(splits_alnum_run(s, 2));   // inside the ü sequence
  EXPECT_TRUE(splits_alnum_run(s, 3));   // ü|r
  EXPECT_FALSE(splits_alnum_run(s, 7));  // "Zürich| "
  EXPECT_TRUE(is_alnum_before(s, s.size()));
}

TEST(Text, CaseFoldKeepsByteLength) {
  const std::string s = "EARTH \xC3\x89tat \xE1\xBA\x9E";  // É, ẞ
  const std::string folded = fold_case_preserving_offsets(s);
  EXPECT_EQ(folded.size(), s.size());
  EXPECT_EQ(folded.substr(0, 5), "earth");
  EXPECT_EQ(folded.substr(6, 2), "\xC3\xA9");
}

TEST(Text, CodePointOffsets) {
  const std::string s = "a\xC3\xA9z";
  EXPECT_EQ(code_point_to_byte_offset(s, 0), 0u);
  EXPECT_EQ(code_point_to_byte_offset(s, 2), 3u);
  EXPECT_EQ(code_point_to_byte_offset(s, 3), 4u);
  EXPECT_EQ(code_point_to_byte_offset(s, 4), std::string_view::npos);
  EXPECT_EQ(count_code_points(s), 3u);
}

TEST(Text, WhitespaceTokens) {
  const auto toks = whitespace_tokens("  a bb\tccc \n");
  ASSERT_EQ(toks.size(), 3u);
  EXPECT_EQ(toks[0], (ByteRange{2, 3}));
  EXPECT_EQ(toks[1], (ByteRange{4, 6}));
  EXPECT_EQ(toks[2], (ByteRange{7, 10}));
  EXPECT_TRUE(whitespace_tokens("   ").empty());
}

TEST(Text, Utf8Validation) {
  EXPECT_TRUE(is_valid_utf8("plain \xE2\x82\xAC"));
  EXPECT_FALSE(is_valid_utf8("bad \xC3"));
  EXPECT_FALSE(is_valid_utf8("\xFF"));
}

}  // namespace
}  // namespace clozeqa::text
