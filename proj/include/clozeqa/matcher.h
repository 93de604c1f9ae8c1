#ifndef CLOZEQA_MATCHER_H_
#define CLOZEQA_MATCHER_H_

// Exact multi-pattern matching of gazetteer surfaces in context text
// (Aho-Corasick), followed by word-boundary filtering and leftmost-longest
// overlap resolution.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clozeqa/gazetteer.h"

namespace clozeqa {

// One occurrence of a pattern. `surface` and `entity_id` point into the
// automaton that produced the match and share its lifetime.
struct RawMatch {
  std::string_view surface;
  std::string_view entity_id;
  std::size_t start = 0;  // byte offset, inclusive
  std::size_t end = 0;    // byte offset, exclusive
};

struct EntitySpan {
  std::string surface;
  std::string entity_id;  // empty for randomly sampled spans
  std::size_t start = 0;
  std::size_t end = 0;
  bool retained = false;

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

class MatchAutomaton {
 public:
  static constexpr std::uint32_t kNone = 0xFFFFFFFFu;

  // Throws std::invalid_argument if the gazetteer holds no surfaces.
  static MatchAutomaton build(const Gazetteer& g);

  // All occurrences of all patterns, overlaps included, ordered by
  // (start, end). If the gazetteer was case-folded the text is folded the
  // same way before scanning; offsets refer to the original text.
  std::vector<RawMatch> find_all(std::string_view text) const;

  // Streaming form of find_all. Calls on_match(pattern, start, end) in order
  // of increasing end offset. No normalization is applied to `text`.
  template <typename F>
  void scan(std::string_view text, F&& on_match) const;

  std::size_t pattern_count() const { return pattern_offsets_.size() - 1; }
  std::size_t node_count() const { return fail_.size(); }
  const NormalizationOptions& build_options() const { return options_; }
  const std::string& source_fingerprint() const { return fingerprint_; }

  std::string_view surface(std::uint32_t pattern) const;
  std::string_view entity_id(std::uint32_t pattern) const;

 private:
  MatchAutomaton() = default;

  std::uint32_t child(std::uint32_t node, unsigned char c) const;
  std::uint32_t step(std::uint32_t state, unsigned char c) const;

  NormalizationOptions options_;
  std::string fingerprint_;

  // Pattern strings and their first-listed entity ids, pooled.
  std::string pattern_pool_;
  std::vector<std::uint32_t> pattern_offsets_;
  std::string id_pool_;
  std::vector<std::uint32_t> id_offsets_;

  // Trie in compressed-sparse-row form: the children of node n are
  // edge_label_/edge_target_[edge_begin_[n], edge_begin_[n+1]), sorted by
  // label. The root additionally has a dense table.
  std::vector<std::uint32_t> edge_begin_;
  std::vector<unsigned char> edge_label_;
  std::vector<std::uint32_t> edge_target_;
  std::array<std::uint32_t, 256> root_next_{};

  std::vector<std::uint32_t> fail_;
  // Nearest proper suffix state that ends a pattern, or kNone.
  std::vector<std::uint32_t> output_link_;
  // Pattern ending exactly at this state, or kNone.
  std::vector<std::uint32_t> terminal_;
};

inline MatchAutomaton build_automaton(const Gazetteer& g) {
  return MatchAutomaton::build(g);
}

inline std::vector<RawMatch> find_all(const MatchAutomaton& a,
                                      std::string_view text) {
  return a.find_all(text);
}

// Drops matches whose start or end splits an alphanumeric run of `text`, then
// scans left to right keeping, at each start, the longest remaining match and
// discarding everything that overlaps a kept span. `matches` must be sorted by
// (start, end). The result is sorted, non-overlapping and marked retained.
std::vector<EntitySpan> resolve_spans(std::span<const RawMatch> matches,
                                      std::string_view text);

// Boundary filter on its own; exposed for diagnostics and tests.
bool on_word_boundaries(std::string_view text, std::size_t start,
                        std::size_t end);

// ---------------------------------------------------------------------------

inline std::uint32_t MatchAutomaton::child(std::uint32_t node,
                                           unsigned char c) const {
  std::uint32_t lo = edge_begin_[node];
  std::uint32_t hi = edge_begin_[node + 1];
  if (hi - lo <= 8) {
    for (; lo < hi; ++lo) {
      if (edge_label_[lo] == c) return edge_target_[lo];
    }
    return kNone;
  }
  while (lo < hi) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    if (edge_label_[mid] < c) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return (lo < edge_begin_[node + 1] && edge_label_[lo] == c) ? edge_target_[lo]
                                                              : kNone;
}

inline std::uint32_t MatchAutomaton::step(std::uint32_t state,
                                          unsigned char c) const {
  while (state != 0) {
    const std::uint32_t next = child(state, c);
    if (next != kNone) return next;
    state = fail_[state];
  }
  return root_next_[c];
}

template <typename F>
void MatchAutomaton::scan(std::string_view text, F&& on_match) const {
  std::uint32_t state = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    state = step(state, static_cast<unsigned char>(text[i]));
    std::uint32_t node = terminal_[state] != kNone ? state : output_link_[state];
    while (node != kNone) {
      const std::uint32_t p = terminal_[node];
      const std::size_t len = pattern_offsets_[p + 1] - pattern_offsets_[p];
      on_match(p, i + 1 - len, i + 1);
      node = output_link_[node];
    }
  }
}

}  // namespace clozeqa

#endif  // CLOZEQA_MATCHER_H_
