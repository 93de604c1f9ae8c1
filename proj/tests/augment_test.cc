#include "clozeqa/augment.h"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.h"

namespace clozeqa {
namespace {

QAExample example(std::string qid, std::string question, std::string answer,
                  std::string context) {
  QAExample e;
  e.qid = std::move(qid);
  e.question = std::move(question);
  e.gold_answers = {std::move(answer)};
  e.context = std::move(context);
  return e;
}

MatchAutomaton automaton_of(const std::vector<std::string>& surfaces) {
  std::vector<EntityRecord> records;
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    records.push_back({"Q" + std::to_string(i + 1), surfaces[i]});
  }
  return build_automaton(Gazetteer::from_records(records));
}

std::size_t count_of(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos;
       pos = hay.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

std::vector<std::pair<std::size_t, std::size_t>> ranges(const std::vector<EntitySpan>& spans) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& s : spans) out.emplace_back(s.start, s.end);
  return out;
}

TEST(RenderQaPrompt, Template) {
  const auto e = example("a", "Who won?", "Spain", "Spain won the cup.");
  const PromptPair p = render_qa_prompt(e);
  EXPECT_EQ(p.input_text, "Question: Who won? Answer: <mask> Context: Spain won the cup.");
  EXPECT_EQ(p.target_text, "Question: Who won? Answer: Spain Context: Spain won the cup.");
  EXPECT_EQ(p.kind, PairKind::kOri);
  EXPECT_EQ(p.id, "a:ori");
}

TEST(RenderQaPrompt, CustomMaskToken) {
  const auto e = example("a", "Who won?", "Spain", "Spain won the cup.");
  const PromptPair p = render_qa_prompt(e, "[M]");
  EXPECT_NE(p.input_text.find("Answer: [M] "), std::string::npos);
  EXPECT_EQ(p.input_text.find("<mask>"), std::string::npos);
}

TEST(MakeCloze, MasksOnlySelectedOccurrence) {
  const auto e = example("e", "q", "Earth", "Earth orbits. Earth spins.");
  const ClozeExample cz = make_cloze(e, {"Earth", "Q2", 0, 5, true});
  EXPECT_EQ(cz.masked_context, "<mask> orbits. Earth spins.");
  EXPECT_EQ(cz.answer_surface, "Earth");
  EXPECT_EQ(reconstruct_context(cz, kDefaultMaskToken), e.context);

  const ClozeExample second = make_cloze(e, {"Earth", "Q2", 14, 19, true});
  EXPECT_EQ(second.masked_context, "Earth orbits. <mask> spins.");
}

TEST(MakeCloze, ShortContext) {
  const auto e = example("s", "q", "Spain", "Spain won");
  const ClozeExample cz = make_cloze(e, {"Spain", "Q1", 0, 5, true});
  EXPECT_EQ(cz.masked_context, "<mask> won");
  EXPECT_EQ(cz.answer_surface, "Spain");
}

TEST(MakeCloze, SpanOutsideContextThrows) {
  const auto e = example("s", "q", "Spain", "Spain won");
  EXPECT_THROW(make_cloze(e, {"x", "", 5, 20, true}), std::out_of_range);
  EXPECT_THROW(make_cloze(e, {"x", "", 3, 3, true}), std::out_of_range);
}

TEST(MakeCloze, MaskAllRoundTrips) {
  const auto e = example("e", "q", "Earth", "Earth orbits. Earth spins.");
  const std::vector<text::ByteRange> others = {{14, 19}};
  const ClozeExample cz = make_cloze(e, {"Earth", "Q2", 0, 5, true}, "[M]", others);
  EXPECT_EQ(cz.masked_context, "[M] orbits. [M] spins.");
  EXPECT_EQ(cz.masked_ranges.size(), 2u);
  EXPECT_EQ(reconstruct_context(cz, "[M]"), e.context);
}

TEST(RenderClozePrompt, GottaTemplate) {
  const auto e = example("a", "Who won?", "Spain", "Spain won the cup.");
  const ClozeExample cz = make_cloze(e, {"Spain", "Q1", 0, 5, true});
  const PromptPair p = render_cloze_prompt(cz, kDefaultMaskToken, TemplateKind::kGotta);
  EXPECT_EQ(p.input_text,
            "Question: What is the masked entity? Answer: <mask> Context: <mask> won the cup.");
  EXPECT_EQ(p.target_text,
            "Question: What is the masked entity? Answer: Spain Context: <mask> won the cup.");
  EXPECT_EQ(count_of(p.input_text, "<mask>"), 2u);
  EXPECT_EQ(p.entity_id, std::optional<std::string>("Q1"));
}

TEST(RenderClozePrompt, WhatTemplateAndOriginalTargetContext) {
  const auto e = example("a", "Who won?", "Spain", "Spain won the cup.");
  const ClozeExample cz = make_cloze(e, {"Spain", "Q1", 0, 5, true});
  PromptOptions opts;
  opts.target_context = TargetContext::kOriginal;
  const PromptPair p = render_cloze_prompt(cz, opts, TemplateKind::kWhat);
  EXPECT_EQ(p.input_text, "Question: What? Answer: <mask> Context: <mask> won the cup.");
  EXPECT_EQ(p.target_text, "Question: What? Answer: Spain Context: Spain won the cup.");
}

TEST(TemplateKind, ParseAndPrint) {
  for (auto k : {TemplateKind::kGotta, TemplateKind::kWhat, TemplateKind::kRandom}) {
    EXPECT_EQ(parse_template_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_template_kind("cloze"), std::invalid_argument);
  EXPECT_EQ(cloze_question(TemplateKind::kRandom), kClozeQuestion);
}

TEST(RandomSpans, FrozenReferenceValues) {
  // Independent reference: tests/oracles/frozen_values.py
  using R = std::vector<std::pair<std::size_t, std::size_t>>;
  const auto abcd = example("r", "q", "a", "a b c d");
  EXPECT_EQ(ranges(random_spans(abcd, 11, 1)), (R{{2, 3}}));
  EXPECT_EQ(ranges(random_spans(abcd, 5, 10)), (R{{0, 5}, {6, 7}}));
  const auto six = example("r", "q", "a", "one two three four five six");
  EXPECT_EQ(ranges(random_spans(six, 2024, 2)), (R{{4, 7}, {8, 18}}));
}

TEST(RandomSpans, EdgeCases) {
  const auto abcd = example("r", "q", "a", "a b c d");
  EXPECT_TRUE(random_spans(abcd, 1, 0).empty());
  EXPECT_TRUE(random_spans(example("r", "q", "a", "   "), 1, 3).empty());
  EXPECT_THROW(random_spans(abcd, 1, 1, {0, 2}), std::invalid_argument);
  EXPECT_THROW(random_spans(abcd, 1, 1, {3, 2}), std::invalid_argument);
}

TEST(RandomSpans, AlignedDisjointAndBounded) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto e = example("r", "q", "a", testing::random_string(rng, "ab  xy\t", 0, 60));
    const auto tokens = text::whitespace_tokens(e.context);
    const std::size_t count = rng() % 8;
    const auto spans = random_spans(e, rng(), count, {1, 3});
    EXPECT_LE(spans.size(), count);
    for (std::size_t i = 0; i < spans.size(); ++i) {
      const auto& s = spans[i];
      EXPECT_EQ(s.surface, e.context.substr(s.start, s.end - s.start));
      auto first = std::find_if(tokens.begin(), tokens.end(),
                                [&](const auto& t) { return t.start == s.start; });
      auto last = std::find_if(tokens.begin(), tokens.end(),
                               [&](const auto& t) { return t.end == s.end; });
      ASSERT_NE(first, tokens.end());
      ASSERT_NE(last, tokens.end());
      const auto len = last - first + 1;
      EXPECT_GE(len, 1);
      EXPECT_LE(len, 3);
      if (i > 0) EXPECT_LT(spans[i - 1].end, s.start);
    }
  }
}

TEST(AugmentDataset, OneAugPairPerRetainedEntity) {
  const auto a = automaton_of({"Spain", "Netherlands"});
  const std::vector<QAExample> ex = {
      example("a", "Who won?", "Spain", "Spain beat the Netherlands.")};
  const AugmentedSet set = augment_dataset(ex, a);
  ASSERT_EQ(set.ori_pairs.size(), 1u);
  ASSERT_EQ(set.aug_pairs.size(), 2u);
  EXPECT_EQ(set.aug_pairs[0].answer, "Spain");
  EXPECT_EQ(set.aug_pairs[1].answer, "Netherlands");
  EXPECT_EQ(set.aug_pairs[0].id, "a:aug:0");
  EXPECT_EQ(set.aug_pairs[1].id, "a:aug:1");
  EXPECT_EQ(set.per_example[0].retained_spans, 2u);
}

TEST(AugmentDataset, ExcludeAnswerOverlap) {
  const auto a = automaton_of({"Spain", "Netherlands"});
  const std::vector<QAExample> ex = {
      example("a", "Who won?", "Spain", "Spain beat the Netherlands.")};
  AugmentOptions opts;
  opts.exclude_answer_overlap = true;
  const AugmentedSet set = augment_dataset(ex, a, opts);
  ASSERT_EQ(set.aug_pairs.size(), 1u);
  EXPECT_EQ(set.aug_pairs[0].answer, "Netherlands");
}

TEST(AugmentDataset, MaskAllOccurrences) {
  const auto a = automaton_of({"Earth"});
  const std::vector<QAExample> ex = {example("e", "q", "x", "Earth orbits. Earth spins.")};
  AugmentOptions opts;
  opts.mask_all_occurrences = true;
  const AugmentedSet set = augment_dataset(ex, a, opts);
  ASSERT_EQ(set.aug_pairs.size(), 2u);
  for (const auto& p : set.aug_pairs) {
    EXPECT_EQ(p.context, "<mask> orbits. <mask> spins.");
  }
}

std::vector<QAExample> synthetic_corpus(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> words = {
      "Spain", "won", "the", "cup", "in", "Madrid", "New", "York", "City", "Earth",
      "orbits", "sun", "river", "Nile", "Paris", "France", "and", "of", "Art", "Artificial"};
  std::mt19937_64 rng(seed);
  std::vector<QAExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string ctx;
    const std::size_t len = 1 + rng() % 40;
    for (std::size_t w = 0; w < len; ++w) {
      if (w > 0) ctx += (rng() % 7 == 0) ? ", " : " ";
      ctx += words[rng() % words.size()];
    }
    out.push_back(example("s" + std::to_string(i), "What?", words[rng() % words.size()], ctx));
  }
  return out;
}

TEST(AugmentDataset, MaskCountReconstructionAndCountLaws) {
  const auto a = automaton_of({"Spain", "Madrid", "New York", "New York City", "York",
                               "Earth", "Nile", "Paris", "France", "Art"});
  const auto corpus = synthetic_corpus(300, 11);
  for (const auto kind : {TemplateKind::kGotta, TemplateKind::kWhat, TemplateKind::kRandom}) {
    AugmentOptions opts;
    opts.template_kind = kind;
    opts.seed = 5;
    const AugmentedSet set = augment_dataset(corpus, a, opts);
    ASSERT_EQ(set.ori_pairs.size(), corpus.size());

    std::size_t expected = 0;
    for (const auto& s : set.per_example) {
      if (kind == TemplateKind::kRandom) {
        EXPECT_LE(s.aug_pairs, s.retained_spans);
      } else {
        EXPECT_EQ(s.aug_pairs, s.retained_spans);
      }
      expected += s.aug_pairs;
    }
    EXPECT_EQ(set.aug_pairs.size(), expected);

    for (const auto& p : set.ori_pairs) {
      EXPECT_EQ(count_of(p.input_text, "<mask>"), 1u);
      EXPECT_EQ(count_of(p.target_text, "<mask>"), 0u);
    }
    for (const auto& p : set.aug_pairs) {
      EXPECT_EQ(count_of(p.input_text, "<mask>"), 2u);
      EXPECT_EQ(count_of(p.target_text, "<mask>"), 1u);
      ASSERT_TRUE(p.span.has_value());
      const std::string& src = corpus[std::stoul(p.source_qid.substr(1))].context;
      const std::string rebuilt = p.context.substr(0, p.span->start) + p.answer +
                                  p.context.substr(p.span->start + 6);
      EXPECT_EQ(rebuilt, src);
    }
  }
}

TEST(AugmentDataset, GazetteerCountLawAgainstOracle) {
  const std::vector<std::string> surfaces = {"Spain", "Madrid", "New York", "York", "Art"};
  const auto a = automaton_of(surfaces);
  const auto corpus = synthetic_corpus(200, 4);
  const AugmentedSet set = augment_dataset(corpus, a);
  std::size_t oracle_total = 0;
  for (const auto& e : corpus) {
    oracle_total +=
        testing::naive_resolve_ascii(testing::naive_find_all(surfaces, e.context), e.context)
            .size();
  }
  EXPECT_EQ(set.aug_pairs.size(), oracle_total);
}

TEST(AugmentDataset, RandomCountDefaultsToEntityCount) {
  const auto a = automaton_of({"Spain", "Netherlands"});
  const std::vector<QAExample> ex = {
      example("a", "Who won?", "Spain", "Spain beat the Netherlands in the final match.")};
  AugmentOptions opts;
  opts.template_kind = TemplateKind::kRandom;
  EXPECT_EQ(augment_dataset(ex, a, opts).aug_pairs.size(), 2u);
  opts.random_count = 4;
  const AugmentedSet set = augment_dataset(ex, a, opts);
  EXPECT_EQ(set.aug_pairs.size(), 4u);
  EXPECT_FALSE(set.aug_pairs[0].entity_id.has_value());
}

TEST(AugmentDataset, OutputIndependentOfThreadCount) {
  const auto a = automaton_of({"Spain", "Madrid", "New York", "Earth", "Paris"});
  const auto corpus = synthetic_corpus(500, 8);
  for (const auto kind : {TemplateKind::kGotta, TemplateKind::kRandom}) {
    AugmentOptions opts;
    opts.template_kind = kind;
    opts.seed = 3;
    std::ostringstream one;
    write_jsonl(augment_dataset(corpus, a, opts), one);
    opts.threads = 8;
    std::ostringstream many;
    write_jsonl(augment_dataset(corpus, a, opts), many);
    EXPECT_EQ(one.str(), many.str());
  }
}

TEST(WriteJsonl, OriFollowedByItsAugPairs) {
  const auto a = automaton_of({"Spain", "Earth"});
  const std::vector<QAExample> ex = {example("a", "Who?", "Spain", "Spain won"),
                                     example("b", "What?", "Earth", "Earth spins")};
  std::ostringstream out;
  write_jsonl(augment_dataset(ex, a), out);
  std::istringstream in(out.str());
  std::vector<std::string> ids;
  for (std::string line; std::getline(in, line);) {
    ids.push_back(nlohmann::json::parse(line)["id"].get<std::string>());
  }
  EXPECT_EQ(ids, (std::vector<std::string>{"a:ori", "a:aug:0", "b:ori", "b:aug:0"}));
  const auto stats = stats_json(augment_dataset(ex, a));
  EXPECT_EQ(stats["aug_pairs"], 2);
  EXPECT_DOUBLE_EQ(stats["avg_aug_per_example"].get<double>(), 1.0);
}

}  // namespace
}  // namespace clozeqa
