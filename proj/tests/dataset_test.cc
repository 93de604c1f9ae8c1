#include "clozeqa/dataset.h"

#include <gtest/gtest.h>
#include <zlib.h>

#include <fstream>
#include <set>

#include "clozeqa/error.h"
#include "clozeqa/random.h"
#include "oracles.h"

namespace clozeqa {
namespace {

using testing::TempDir;

constexpr std::string_view kHeader = R"({"header": {"dataset": "SQuAD", "split": "train"}})";

std::vector<QAExample> numbered(std::size_t n) {
  std::vector<QAExample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].qid = "q" + std::to_string(i);
    out[i].gold_answers = {"a"};
  }
  return out;
}

TEST(SplitMix64, ReferenceStream) {
  // First outputs of the reference generator for seed 1234567.
  SplitMix64 rng(1234567);
  EXPECT_EQ(rng.next(), 6457827717110365317ull);
  EXPECT_EQ(rng.next(), 3203168211198807973ull);
  EXPECT_EQ(rng.next(), 9817491932198370423ull);
  EXPECT_EQ(rng.next(), 4593380528125082431ull);
  EXPECT_EQ(rng.next(), 16408922859458223821ull);
}

TEST(ParseMrqa, ContextWithTwoQuestions) {
  const std::string content = std::string(kHeader) + "\n" + R"({"context": "Spain won the cup.", "qas": [
      {"qid": "a1", "question": "Who won?", "answers": ["Spain"],
       "detected_answers": [{"text": "Spain", "char_spans": [[0, 4]]}]},
      {"qid": "a2", "question": "What was won?", "answers": ["the cup", "cup"]}]})";
  // JSON-lines: one record per line.
  std::string one_line;
  for (char c : content.substr(kHeader.size() + 1)) {
    if (c != '\n') one_line.push_back(c);
  }
  const MrqaDataset ds = parse_mrqa(std::string(kHeader) + "\n" + one_line + "\n");
  EXPECT_EQ(ds.name, "SQuAD");
  ASSERT_EQ(ds.examples.size(), 2u);
  EXPECT_EQ(ds.examples[0].context, ds.examples[1].context);
  EXPECT_EQ(ds.examples[0].answer_char_spans, (std::vector<text::ByteRange>{{0, 5}}));
  EXPECT_EQ(ds.examples[1].gold_answers.size(), 2u);
  EXPECT_EQ(ds.stats.warnings(), 0u);
}

TEST(ParseMrqa, EmptyInputIsMissingHeader) {
  try {
    parse_mrqa("");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_STREQ(e.what(), "missing header");
  }
  EXPECT_THROW(parse_mrqa(R"({"context": "x", "qas": []})"), FormatError);
}

TEST(ParseMrqa, MismatchedSpanDroppedExampleKept) {
  const std::string body = std::string(kHeader) + "\n" +
      R"({"context": "Spain won", "qas": [{"qid": "a", "question": "q", "answers": ["Spain"], "detected_answers": [{"text": "Spain", "char_spans": [[1, 5]]}]}]})" + "\n";
  const MrqaDataset ds = parse_mrqa(body);
  ASSERT_EQ(ds.examples.size(), 1u);
  EXPECT_TRUE(ds.examples[0].answer_char_spans.empty());
  EXPECT_EQ(ds.stats.dropped_spans, 1u);
}

TEST(ParseMrqa, CodePointSpansBecomeByteRanges) {
  // "Café Zürich": Zürich starts at code point 5, byte 6.
  const std::string body = std::string(kHeader) + "\n" +
      R"({"context": "Café Zürich", "qas": [{"qid": "z", "question": "where", "answers": ["Zürich"], "detected_answers": [{"text": "Zürich", "char_spans": [[5, 10]]}]}]})" + "\n";
  const MrqaDataset ds = parse_mrqa(body);
  ASSERT_EQ(ds.examples.size(), 1u);
  ASSERT_EQ(ds.examples[0].answer_char_spans.size(), 1u);
  EXPECT_EQ(ds.examples[0].answer_char_spans[0], (text::ByteRange{6, 13}));
}

TEST(ParseMrqa, IncompleteRecordsSkippedAndCounted) {
  const std::string body = std::string(kHeader) + "\n" +
      R"({"qas": []})" + "\n" +
      "not json\n" +
      R"({"context": "c", "qas": [{"qid": "x", "answers": ["a"]}, {"qid": "y", "question": "q", "answers": []}, {"qid": "z", "question": "q", "answers": ["c"]}]})" + "\n" +
      R"({"context": "c", "qas": [{"qid": "z", "question": "again", "answers": ["c"]}]})" + "\n";
  const MrqaDataset ds = parse_mrqa(body);
  ASSERT_EQ(ds.examples.size(), 1u);
  EXPECT_EQ(ds.examples[0].qid, "z");
  EXPECT_EQ(ds.stats.skipped_records, 2u);
  EXPECT_EQ(ds.stats.skipped_questions, 2u);
  EXPECT_EQ(ds.stats.duplicate_qids, 1u);
}

TEST(LoadMrqa, GzipDetectedByMagic) {
  TempDir dir;
  const std::string body = std::string(kHeader) + "\n" +
      R"({"context": "Earth spins.", "qas": [{"qid": "g1", "question": "What spins?", "answers": ["Earth"]}]})" + "\n";
  const auto path = dir / "train.data";  // no .gz suffix on purpose
  gzFile f = gzopen(path.c_str(), "wb");
  ASSERT_NE(f, nullptr);
  gzwrite(f, body.data(), static_cast<unsigned>(body.size()));
  gzclose(f);
  const MrqaDataset ds = load_mrqa(path);
  ASSERT_EQ(ds.examples.size(), 1u);
  EXPECT_EQ(ds.examples[0].question, "What spins?");

  const auto plain = dir / "plain.jsonl";
  std::ofstream(plain) << body;
  EXPECT_EQ(load_mrqa(plain).examples.size(), 1u);
  EXPECT_THROW(load_mrqa(dir / "absent.jsonl"), IoError);
}

TEST(SampleFewShot, KAtLeastNReturnsAll) {
  const auto ex = numbered(10);
  const auto split = sample_few_shot(ex, 20, 123);
  EXPECT_EQ(split.selected_qids.size(), 10u);
  std::set<std::string> unique(split.selected_qids.begin(), split.selected_qids.end());
  EXPECT_EQ(unique.size(), 10u);
}

TEST(SampleFewShot, ExhaustiveIsPermutation) {
  const auto idx = sample_indices(5, 5, 7);
  std::vector<std::size_t> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(SampleFewShot, FrozenReferenceSequence) {
  // Independent reference: tests/oracles/frozen_values.py
  const std::vector<std::size_t> expected = {13, 83, 86, 9, 2, 27, 87, 45,
                                             65, 28, 5, 99, 42, 38, 46, 95};
  EXPECT_EQ(sample_indices(100, 16, 42), expected);
  const auto split = sample_few_shot(numbered(100), 16, 42);
  EXPECT_EQ(split.selected_qids.front(), "q13");
  EXPECT_EQ(split.selected_qids.back(), "q95");
}

TEST(SampleFewShot, NestedAcrossSizes) {
  for (const std::uint64_t seed : kDefaultSeeds) {
    std::vector<std::size_t> previous;
    for (const std::size_t k : kFewShotSizes) {
      const auto idx = sample_indices(500, k, seed);
      ASSERT_EQ(idx.size(), k);
      EXPECT_TRUE(std::equal(previous.begin(), previous.end(), idx.begin()));
      previous = idx;
    }
  }
}

TEST(SampleFewShot, DeterministicAndDuplicateFree) {
  const auto ex = numbered(300);
  const auto a = sample_few_shot(ex, 64, 9);
  const auto b = sample_few_shot(ex, 64, 9);
  EXPECT_EQ(a.selected_qids, b.selected_qids);
  std::set<std::string> unique(a.selected_qids.begin(), a.selected_qids.end());
  EXPECT_EQ(unique.size(), 64u);
  EXPECT_NE(sample_few_shot(ex, 64, 10).selected_qids, a.selected_qids);
}

TEST(SampleFewShot, UniformOverSeeds) {
  std::vector<int> hits(10, 0);
  for (std::uint64_t seed = 0; seed < 10000; ++seed) ++hits[sample_indices(10, 1, seed)[0]];
  for (const int h : hits) EXPECT_NEAR(h / 10000.0, 0.1, 0.02);
}

TEST(SampleFewShot, ZeroKRejected) {
  EXPECT_THROW(sample_few_shot(numbered(3), 0, 1), std::invalid_argument);
}

TEST(Manifest, RoundTripAndSelection) {
  const auto ex = numbered(50);
  const auto split = sample_few_shot(ex, 16, 3);
  const auto manifest = split_manifest(split, "SQuAD");
  EXPECT_EQ(manifest["dataset"], "SQuAD");
  EXPECT_EQ(manifest["k"], 16);
  EXPECT_EQ(manifest["seed"], 3);
  const auto qids = manifest_qids(manifest);
  EXPECT_EQ(qids, split.selected_qids);
  const auto chosen = select_examples(ex, qids);
  ASSERT_EQ(chosen.size(), 16u);
  EXPECT_EQ(chosen[0].qid, qids[0]);
  const std::vector<std::string> bad = {"nope"};
  EXPECT_THROW(select_examples(ex, bad), FormatError);
}

}  // namespace
}  // namespace clozeqa
