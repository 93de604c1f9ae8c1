#ifndef CLOZEQA_AUGMENT_H_
#define CLOZEQA_AUGMENT_H_

// Cloze example construction and prompt rendering.
//
// Every sample, original or augmented, is rendered as
//
//   input  = "Question: <q>" SEP "Answer: <mask>" SEP "Context: <c>"
//   target = "Question: <q>" SEP "Answer: <a>"    SEP "Context: <c>"
//
// with SEP a single space by default. Augmented samples use a fixed question
// and a context in which the selected entity is replaced by the mask token.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "clozeqa/dataset.h"
#include "clozeqa/matcher.h"
#include "clozeqa/text.h"

namespace clozeqa {

enum class TemplateKind { kGotta, kWhat, kRandom };
enum class PairKind { kOri, kAug };

std::string_view to_string(TemplateKind kind);
std::string_view to_string(PairKind kind);
// Throws std::invalid_argument for anything but gotta / what / random.
TemplateKind parse_template_kind(std::string_view name);

inline constexpr std::string_view kDefaultMaskToken = "<mask>";
inline constexpr std::string_view kClozeQuestion = "What is the masked entity?";
inline constexpr std::string_view kBareClozeQuestion = "What?";

// The fixed question for augmented samples. kRandom only changes how spans
// are picked, so it shares the kGotta question.
std::string_view cloze_question(TemplateKind kind);

// Which context the target of an augmented pair carries.
enum class TargetContext { kMasked, kOriginal };

struct PromptOptions {
  std::string mask_token = std::string(kDefaultMaskToken);
  std::string separator = " ";
  TargetContext target_context = TargetContext::kMasked;
};

struct PromptPair {
  PairKind kind = PairKind::kOri;
  TemplateKind template_kind = TemplateKind::kGotta;
  std::string id;
  std::string source_qid;
  std::string input_text;
  std::string target_text;
  std::string question;
  std::string answer;
  std::string context;  // as it appears in input_text
  std::optional<text::ByteRange> span;  // aug only, offsets into the source
  std::optional<std::string> entity_id;  // aug with a gazetteer span only
};

struct ClozeExample {
  std::string source_qid;
  EntitySpan span;
  std::string masked_context;
  std::string answer_surface;  // source bytes under span
  TemplateKind template_kind = TemplateKind::kGotta;
  // Source ranges replaced by the mask, sorted; includes span. Holds more
  // than one range only when all occurrences are masked.
  std::vector<text::ByteRange> masked_ranges;
  std::vector<std::string> masked_texts;
};

// "Question: " + q + SEP + "Answer: " + slot + SEP + "Context: " + c
std::string assemble_prompt(std::string_view question, std::string_view answer_slot,
                            std::string_view context, std::string_view separator = " ");

// Uses the first gold answer for the target.
PromptPair render_qa_prompt(const QAExample& e, const PromptOptions& opts = {});
PromptPair render_qa_prompt(const QAExample& e, std::string_view mask_token);

// Replaces e.context[span.start, span.end) with the mask token. Throws
// std::out_of_range if the span does not lie within the context.
ClozeExample make_cloze(const QAExample& e, const EntitySpan& span,
                        std::string_view mask_token = kDefaultMaskToken);

// Masks `span` plus every range in `also_mask`; ranges overlapping `span` or
// each other are ignored.
ClozeExample make_cloze(const QAExample& e, const EntitySpan& span,
                        std::string_view mask_token,
                        std::span<const text::ByteRange> also_mask);

// Puts the masked source text back. Inverse of make_cloze.
std::string reconstruct_context(const ClozeExample& cz, std::string_view mask_token);

PromptPair render_cloze_prompt(const ClozeExample& cz, const PromptOptions& opts,
                               TemplateKind kind);
PromptPair render_cloze_prompt(const ClozeExample& cz, std::string_view mask_token,
                               TemplateKind kind);

// Up to `count` non-overlapping spans aligned to whitespace tokens, each
// `length_range.first`..`length_range.second` tokens long, drawn from a
// SplitMix64 stream seeded with `seed`. For each span a length is drawn, then
// a start uniformly among the free windows of that length; if none exist the
// length is shortened, and sampling stops when no window of the minimum
// length is free. Sorted by start.
std::vector<EntitySpan> random_spans(const QAExample& e, std::uint64_t seed,
                                     std::size_t count,
                                     std::pair<std::size_t, std::size_t> length_range = {1, 3});

struct AugmentOptions {
  PromptOptions prompt;
  TemplateKind template_kind = TemplateKind::kGotta;
  std::uint64_t seed = 0;
  bool exclude_answer_overlap = false;
  bool mask_all_occurrences = false;
  // kRandom: spans per example; defaults to the example's entity span count.
  std::optional<std::size_t> random_count;
  std::pair<std::size_t, std::size_t> random_length = {1, 3};
  std::size_t threads = 1;
};

nlohmann::ordered_json to_json(const AugmentOptions& opts);

struct ExampleAugmentStats {
  std::string qid;
  std::size_t raw_matches = 0;
  std::size_t retained_spans = 0;
  std::size_t aug_pairs = 0;
};

struct AugmentProvenance {
  std::string gazetteer_fingerprint;
  std::uint64_t seed = 0;
  nlohmann::ordered_json options;
};

struct AugmentedSet {
  std::vector<PromptPair> ori_pairs;  // one per source example, source order
  std::vector<PromptPair> aug_pairs;  // source order, then span start
  std::vector<ExampleAugmentStats> per_example;
  AugmentProvenance provenance;
};

// Seed of the random-span stream for one example.
std::uint64_t example_seed(std::uint64_t run_seed, std::string_view qid);

// Entity spans that would be masked for `e` under `opts` (before the random
// ablation swaps them out).
std::vector<EntitySpan> entity_spans(const QAExample& e, const MatchAutomaton& a,
                                     const AugmentOptions& opts,
                                     std::size_t* raw_match_count = nullptr);

AugmentedSet augment_dataset(std::span<const QAExample> examples,
                             const MatchAutomaton& automaton,
                             const AugmentOptions& opts = {});

nlohmann::ordered_json to_json(const PromptPair& pair);

// One JSON object per line: each example's ori pair followed by its aug
// pairs.
void write_jsonl(const AugmentedSet& set, std::ostream& out);

// Count summary plus per-example counts and provenance.
nlohmann::ordered_json stats_json(const AugmentedSet& set);

}  // namespace clozeqa

#endif  // CLOZEQA_AUGMENT_H_
