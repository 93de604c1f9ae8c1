#include "clozeqa/augment.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "clozeqa/random.h"

namespace clozeqa {
namespace {

using nlohmann::ordered_json;

bool overlaps(const text::ByteRange& a, const text::ByteRange& b) {
  return a.start < b.end && b.start < a.end;
}

std::vector<text::ByteRange> answer_ranges(const QAExample& e) {
  if (!e.answer_char_spans.empty()) return e.answer_char_spans;
  std::vector<text::ByteRange> ranges;
  const std::string_view ctx = e.context;
  for (const auto& a : e.gold_answers) {
    if (a.empty()) continue;
    for (std::size_t pos = ctx.find(a); pos != std::string_view::npos;
         pos = ctx.find(a, pos + 1)) {
      ranges.push_back({pos, pos + a.size()});
    }
  }
  return ranges;
}

struct ExampleResult {
  PromptPair ori;
  std::vector<PromptPair> aug;
  ExampleAugmentStats stats;
};

ExampleResult augment_one(const QAExample& e, const MatchAutomaton& a,
                          const AugmentOptions& opts) {
  ExampleResult r;
  r.stats.qid = e.qid;
  r.ori = render_qa_prompt(e, opts.prompt);
  r.ori.template_kind = opts.template_kind;

  std::vector<EntitySpan> spans = entity_spans(e, a, opts, &r.stats.raw_matches);
  r.stats.retained_spans = spans.size();
  if (opts.template_kind == TemplateKind::kRandom) {
    spans = random_spans(e, example_seed(opts.seed, e.qid),
                         opts.random_count.value_or(spans.size()),
                         opts.random_length);
  }

  r.aug.reserve(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const EntitySpan& span = spans[i];
    std::vector<text::ByteRange> also;
    if (opts.mask_all_occurrences) {
      const std::string_view ctx = e.context;
      const std::string_view mine = ctx.substr(span.start, span.end - span.start);
      for (const auto& other : spans) {
        if (&other != &span &&
            ctx.substr(other.start, other.end - other.start) == mine) {
          also.push_back({other.start, other.end});
        }
      }
    }
    const ClozeExample cz =
        make_cloze(e, span, opts.prompt.mask_token, also);
    PromptPair pair = render_cloze_prompt(cz, opts.prompt, opts.template_kind);
    pair.id = e.qid + ":aug:" + std::to_string(i);
    r.aug.push_back(std::move(pair));
  }
  r.stats.aug_pairs = r.aug.size();
  return r;
}

}  // namespace

std::string_view to_string(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::kGotta: return "gotta";
    case TemplateKind::kWhat: return "what";
    case TemplateKind::kRandom: return "random";
  }
  return "gotta";
}

std::string_view to_string(PairKind kind) {
  return kind == PairKind::kOri ? "ori" : "aug";
}

TemplateKind parse_template_kind(std::string_view name) {
  if (name == "gotta") return TemplateKind::kGotta;
  if (name == "what") return TemplateKind::kWhat;
  if (name == "random") return TemplateKind::kRandom;
  throw std::invalid_argument("unknown template kind '" + std::string(name) +
                              "' (expected gotta, what or random)");
}

std::string_view cloze_question(TemplateKind kind) {
  return kind == TemplateKind::kWhat ? kBareClozeQuestion : kClozeQuestion;
}

std::string assemble_prompt(std::string_view question, std::string_view answer_slot,
                            std::string_view context, std::string_view separator) {
  std::string out;
  out.reserve(question.size() + answer_slot.size() + context.size() + 32);
  out += "Question: ";
  out += question;
  out += separator;
  out += "Answer: ";
  out += answer_slot;
  out += separator;
  out += "Context: ";
  out += context;
  return out;
}

PromptPair render_qa_prompt(const QAExample& e, const PromptOptions& opts) {
  PromptPair p;
  p.kind = PairKind::kOri;
  p.id = e.qid + ":ori";
  p.source_qid = e.qid;
  p.question = e.question;
  p.answer = e.gold_answers.empty() ? std::string() : e.gold_answers.front();
  p.context = e.context;
  p.input_text = assemble_prompt(p.question, opts.mask_token, p.context, opts.separator);
  p.target_text = assemble_prompt(p.question, p.answer, p.context, opts.separator);
  return p;
}

PromptPair render_qa_prompt(const QAExample& e, std::string_view mask_token) {
  PromptOptions opts;
  opts.mask_token = std::string(mask_token);
  return render_qa_prompt(e, opts);
}

ClozeExample make_cloze(const QAExample& e, const EntitySpan& span,
                        std::string_view mask_token) {
  return make_cloze(e, span, mask_token, {});
}

ClozeExample make_cloze(const QAExample& e, const EntitySpan& span,
                        std::string_view mask_token,
                        std::span<const text::ByteRange> also_mask) {
  const std::string_view ctx = e.context;
  if (span.start >= span.end || span.end > ctx.size()) {
    throw std::out_of_range("span [" + std::to_string(span.start) + ", " +
                            std::to_string(span.end) +
                            ") is outside the context of '" + e.qid + "'");
  }
  std::vector<text::ByteRange> ranges{{span.start, span.end}};
  for (const auto& r : also_mask) {
    if (r.start >= r.end || r.end > ctx.size()) continue;
    const bool clash = std::any_of(ranges.begin(), ranges.end(),
                                   [&](const auto& k) { return overlaps(k, r); });
    if (!clash) ranges.push_back(r);
  }
  std::sort(ranges.begin(), ranges.end(),
            [](const auto& x, const auto& y) { return x.start < y.start; });

  ClozeExample cz;
  cz.source_qid = e.qid;
  cz.span = span;
  cz.answer_surface = std::string(ctx.substr(span.start, span.end - span.start));
  cz.masked_context.reserve(ctx.size() + ranges.size() * mask_token.size());
  std::size_t pos = 0;
  for (const auto& r : ranges) {
    cz.masked_context.append(ctx.substr(pos, r.start - pos));
    cz.masked_context.append(mask_token);
    cz.masked_texts.emplace_back(ctx.substr(r.start, r.end - r.start));
    pos = r.end;
  }
  cz.masked_context.append(ctx.substr(pos));
  cz.masked_ranges = std::move(ranges);
  return cz;
}

std::string reconstruct_context(const ClozeExample& cz, std::string_view mask_token) {
  // Ranges are in source coordinates; walk them while tracking the shift the
  // masks introduced.
  const std::string_view masked = cz.masked_context;
  std::string out;
  out.reserve(masked.size());
  std::size_t src = 0;  // source offset
  std::size_t pos = 0;  // offset into masked
  for (std::size_t i = 0; i < cz.masked_ranges.size(); ++i) {
    const auto& r = cz.masked_ranges[i];
    const std::size_t keep = r.start - src;
    out.append(masked.substr(pos, keep));
    pos += keep + mask_token.size();
    out.append(cz.masked_texts[i]);
    src = r.end;
  }
  out.append(masked.substr(std::min(pos, masked.size())));
  return out;
}

PromptPair render_cloze_prompt(const ClozeExample& cz, const PromptOptions& opts,
                               TemplateKind kind) {
  PromptPair p;
  p.kind = PairKind::kAug;
  p.template_kind = kind;
  p.id = cz.source_qid + ":aug";
  p.source_qid = cz.source_qid;
  p.question = std::string(cloze_question(kind));
  p.answer = cz.answer_surface;
  p.context = cz.masked_context;
  p.span = text::ByteRange{cz.span.start, cz.span.end};
  if (!cz.span.entity_id.empty()) p.entity_id = cz.span.entity_id;
  p.input_text = assemble_prompt(p.question, opts.mask_token, p.context, opts.separator);
  const std::string target_context = opts.target_context == TargetContext::kMasked
                                         ? cz.masked_context
                                         : reconstruct_context(cz, opts.mask_token);
  p.target_text = assemble_prompt(p.question, p.answer, target_context, opts.separator);
  return p;
}

PromptPair render_cloze_prompt(const ClozeExample& cz, std::string_view mask_token,
                               TemplateKind kind) {
  PromptOptions opts;
  opts.mask_token = std::string(mask_token);
  return render_cloze_prompt(cz, opts, kind);
}

std::vector<EntitySpan> random_spans(const QAExample& e, std::uint64_t seed,
                                     std::size_t count,
                                     std::pair<std::size_t, std::size_t> length_range) {
  const auto [min_len, max_len] = length_range;
  if (min_len == 0 || max_len < min_len) {
    throw std::invalid_argument("random span length range must satisfy 1 <= min <= max");
  }
  const std::vector<text::ByteRange> tokens = text::whitespace_tokens(e.context);
  const std::size_t n = tokens.size();
  std::vector<bool> used(n, false);
  SplitMix64 rng(seed);
  std::vector<EntitySpan> spans;

  auto window_free = [&](std::size_t s, std::size_t len) {
    for (std::size_t t = s; t < s + len; ++t) {
      if (used[t]) return false;
    }
    return true;
  };

  std::vector<std::size_t> windows;
  for (std::size_t c = 0; c < count; ++c) {
    std::size_t len = min_len + static_cast<std::size_t>(rng.below(max_len - min_len + 1));
    windows.clear();
    for (; len >= min_len; --len) {
      if (len <= n) {
        for (std::size_t s = 0; s + len <= n; ++s) {
          if (window_free(s, len)) windows.push_back(s);
        }
      }
      if (!windows.empty()) break;
    }
    if (windows.empty()) break;
    const std::size_t s = windows[static_cast<std::size_t>(rng.below(windows.size()))];
    for (std::size_t t = s; t < s + len; ++t) used[t] = true;
    const std::size_t start = tokens[s].start;
    const std::size_t end = tokens[s + len - 1].end;
    spans.push_back({e.context.substr(start, end - start), "", start, end, true});
  }
  std::sort(spans.begin(), spans.end(),
            [](const auto& x, const auto& y) { return x.start < y.start; });
  return spans;
}

std::uint64_t example_seed(std::uint64_t run_seed, std::string_view qid) {
  return run_seed ^ fnv1a64(qid);
}

std::vector<EntitySpan> entity_spans(const QAExample& e, const MatchAutomaton& a,
                                     const AugmentOptions& opts,
                                     std::size_t* raw_match_count) {
  const std::vector<RawMatch> raw = a.find_all(e.context);
  if (raw_match_count != nullptr) *raw_match_count = raw.size();
  std::vector<EntitySpan> spans = resolve_spans(raw, e.context);
  if (opts.exclude_answer_overlap) {
    const auto answers = answer_ranges(e);
    std::erase_if(spans, [&](const EntitySpan& s) {
      const text::ByteRange r{s.start, s.end};
      return std::any_of(answers.begin(), answers.end(),
                         [&](const auto& ans) { return overlaps(r, ans); });
    });
  }
  return spans;
}

AugmentedSet augment_dataset(std::span<const QAExample> examples,
                             const MatchAutomaton& automaton,
                             const AugmentOptions& opts) {
  std::vector<ExampleResult> results(examples.size());
  const std::size_t workers =
      std::clamp<std::size_t>(opts.threads, 1, std::max<std::size_t>(examples.size(), 1));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t i = next++; i < examples.size(); i = next++) {
      try {
        results[i] = augment_one(examples[i], automaton, opts);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  AugmentedSet set;
  set.provenance.gazetteer_fingerprint = automaton.source_fingerprint();
  set.provenance.seed = opts.seed;
  set.provenance.options = to_json(opts);
  set.ori_pairs.reserve(results.size());
  set.per_example.reserve(results.size());
  for (auto& r : results) {
    set.ori_pairs.push_back(std::move(r.ori));
    for (auto& p : r.aug) set.aug_pairs.push_back(std::move(p));
    set.per_example.push_back(std::move(r.stats));
  }
  return set;
}

nlohmann::ordered_json to_json(const AugmentOptions& opts) {
  return ordered_json{
      {"mask_token", opts.prompt.mask_token},
      {"separator", opts.prompt.separator},
      {"target_context",
       opts.prompt.target_context == TargetContext::kMasked ? "masked" : "original"},
      {"template", to_string(opts.template_kind)},
      {"seed", opts.seed},
      {"exclude_answer_overlap", opts.exclude_answer_overlap},
      {"mask_all_occurrences", opts.mask_all_occurrences},
      {"random_count", opts.random_count ? ordered_json(*opts.random_count)
                                         : ordered_json(nullptr)},
      {"random_length", {opts.random_length.first, opts.random_length.second}},
  };
}

nlohmann::ordered_json to_json(const PromptPair& p) {
  ordered_json j;
  j["id"] = p.id;
  j["kind"] = to_string(p.kind);
  j["template"] = to_string(p.template_kind);
  j["input"] = p.input_text;
  j["target"] = p.target_text;
  j["question"] = p.question;
  j["answer"] = p.answer;
  j["context"] = p.context;
  j["span"] = p.span ? ordered_json{{"start", p.span->start}, {"end", p.span->end}}
                     : ordered_json(nullptr);
  j["entity_id"] = p.entity_id ? ordered_json(*p.entity_id) : ordered_json(nullptr);
  j["source_qid"] = p.source_qid;
  return j;
}

void write_jsonl(const AugmentedSet& set, std::ostream& out) {
  std::size_t aug = 0;
  for (std::size_t i = 0; i < set.ori_pairs.size(); ++i) {
    out << to_json(set.ori_pairs[i]).dump() << '\n';
    const std::size_t n = i < set.per_example.size() ? set.per_example[i].aug_pairs : 0;
    for (std::size_t k = 0; k < n; ++k) {
      out << to_json(set.aug_pairs.at(aug++)).dump() << '\n';
    }
  }
}

nlohmann::ordered_json stats_json(const AugmentedSet& set) {
  ordered_json per = ordered_json::array();
  std::size_t retained = 0;
  std::size_t raw = 0;
  for (const auto& s : set.per_example) {
    per.push_back({{"qid", s.qid},
                   {"raw_matches", s.raw_matches},
                   {"retained_spans", s.retained_spans},
                   {"aug_pairs", s.aug_pairs}});
    retained += s.retained_spans;
    raw += s.raw_matches;
  }
  const std::size_t n = set.ori_pairs.size();
  return ordered_json{
      {"examples", n},
      {"ori_pairs", set.ori_pairs.size()},
      {"aug_pairs", set.aug_pairs.size()},
      {"raw_matches", raw},
      {"retained_spans", retained},
      {"avg_aug_per_example",
       n == 0 ? 0.0 : static_cast<double>(set.aug_pairs.size()) / static_cast<double>(n)},
      {"per_example", std::move(per)},
      {"provenance",
       {{"gazetteer_sha256", set.provenance.gazetteer_fingerprint},
        {"seed", set.provenance.seed},
        {"options", set.provenance.options}}},
  };
}

}  // namespace clozeqa
