#include "clozeqa/matcher.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "clozeqa/text.h"

namespace clozeqa {

MatchAutomaton MatchAutomaton::build(const Gazetteer& g) {
  if (g.surface_count() == 0) {
    throw std::invalid_argument("cannot build a matcher from an empty gazetteer");
  }
  const auto& surfaces = g.surfaces();
  const std::size_t n = surfaces.size();
  if (n >= kNone) throw std::length_error("too many patterns");

  MatchAutomaton a;
  a.options_ = g.options();
  a.fingerprint_ = g.fingerprint();

  a.pattern_offsets_.reserve(n + 1);
  a.id_offsets_.reserve(n + 1);
  a.pattern_offsets_.push_back(0);
  a.id_offsets_.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    a.pattern_pool_ += surfaces[i];
    a.id_pool_ += g.primary_entity_id(i);
    if (a.pattern_pool_.size() >= kNone || a.id_pool_.size() >= kNone) {
      throw std::length_error("pattern storage exceeds 4 GiB");
    }
    a.pattern_offsets_.push_back(static_cast<std::uint32_t>(a.pattern_pool_.size()));
    a.id_offsets_.push_back(static_cast<std::uint32_t>(a.id_pool_.size()));
  }

  // Inserting patterns in sorted order means each new pattern diverges from
  // the previous one at their common prefix, and every node's children are
  // created in increasing label order.
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    return surfaces[x] < surfaces[y];
  });

  std::vector<std::uint32_t> parent{kNone};
  std::vector<unsigned char> label{0};
  std::vector<std::uint32_t> terminal{kNone};
  std::vector<std::uint32_t> path{0};
  std::string_view previous;
  for (const std::uint32_t p : order) {
    const std::string_view s = surfaces[p];
    const std::size_t lcp = static_cast<std::size_t>(
        std::mismatch(s.begin(), s.end(), previous.begin(), previous.end()).first -
        s.begin());
    path.resize(lcp + 1);
    for (std::size_t d = lcp; d < s.size(); ++d) {
      if (parent.size() >= kNone) throw std::length_error("trie too large");
      const auto node = static_cast<std::uint32_t>(parent.size());
      parent.push_back(path[d]);
      label.push_back(static_cast<unsigned char>(s[d]));
      terminal.push_back(kNone);
      path.push_back(node);
    }
    terminal[path[s.size()]] = p;
    previous = s;
  }

  const std::size_t nodes = parent.size();
  a.edge_begin_.assign(nodes + 1, 0);
  for (std::size_t v = 1; v < nodes; ++v) ++a.edge_begin_[parent[v] + 1];
  std::partial_sum(a.edge_begin_.begin(), a.edge_begin_.end(),
                   a.edge_begin_.begin());
  a.edge_label_.resize(nodes - 1);
  a.edge_target_.resize(nodes - 1);
  {
    std::vector<std::uint32_t> fill(a.edge_begin_.begin(), a.edge_begin_.end() - 1);
    for (std::size_t v = 1; v < nodes; ++v) {
      const std::uint32_t slot = fill[parent[v]]++;
      a.edge_label_[slot] = label[v];
      a.edge_target_[slot] = static_cast<std::uint32_t>(v);
    }
  }
  parent = {};
  label = {};
  a.terminal_ = std::move(terminal);

  a.root_next_.fill(0);
  for (std::uint32_t e = a.edge_begin_[0]; e < a.edge_begin_[1]; ++e) {
    a.root_next_[a.edge_label_[e]] = a.edge_target_[e];
  }

  a.fail_.assign(nodes, 0);
  a.output_link_.assign(nodes, kNone);
  std::vector<std::uint32_t> queue;
  queue.reserve(nodes);
  queue.push_back(0);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t u = queue[head];
    for (std::uint32_t e = a.edge_begin_[u]; e < a.edge_begin_[u + 1]; ++e) {
      const std::uint32_t v = a.edge_target_[e];
      const std::uint32_t f = u == 0 ? 0 : a.step(a.fail_[u], a.edge_label_[e]);
      a.fail_[v] = f;
      a.output_link_[v] = a.terminal_[f] != kNone ? f : a.output_link_[f];
      queue.push_back(v);
    }
  }
  return a;
}

std::string_view MatchAutomaton::surface(std::uint32_t pattern) const {
  const std::uint32_t b = pattern_offsets_.at(pattern);
  return std::string_view(pattern_pool_).substr(b, pattern_offsets_[pattern + 1] - b);
}

std::string_view MatchAutomaton::entity_id(std::uint32_t pattern) const {
  const std::uint32_t b = id_offsets_.at(pattern);
  return std::string_view(id_pool_).substr(b, id_offsets_[pattern + 1] - b);
}

std::vector<RawMatch> MatchAutomaton::find_all(std::string_view text) const {
  std::string folded;
  std::string_view haystack = text;
  if (options_.case_fold) {
    folded = text::fold_case_preserving_offsets(text);
    haystack = folded;
  }
  std::vector<RawMatch> out;
  scan(haystack, [&](std::uint32_t p, std::size_t start, std::size_t end) {
    out.push_back({surface(p), entity_id(p), start, end});
  });
  std::sort(out.begin(), out.end(), [](const RawMatch& x, const RawMatch& y) {
    return x.start != y.start ? x.start < y.start : x.end < y.end;
  });
  return out;
}

bool on_word_boundaries(std::string_view text, std::size_t start,
                        std::size_t end) {
  return !text::splits_alnum_run(text, start) &&
         !text::splits_alnum_run(text, end);
}

std::vector<EntitySpan> resolve_spans(std::span<const RawMatch> matches,
                                      std::string_view text) {
  std::vector<EntitySpan> kept;
  std::size_t frontier = 0;
  std::size_t i = 0;
  while (i < matches.size()) {
    const std::size_t start = matches[i].start;
    // Matches sharing a start are contiguous and sorted by end; the last
    // boundary-valid one is the longest.
    const RawMatch* best = nullptr;
    for (; i < matches.size() && matches[i].start == start; ++i) {
      const RawMatch& m = matches[i];
      if (m.end > text.size() || m.start >= m.end) continue;
      if (on_word_boundaries(text, m.start, m.end)) best = &m;
    }
    if (best == nullptr || start < frontier) continue;
    kept.push_back({std::string(best->surface), std::string(best->entity_id),
                    best->start, best->end, true});
    frontier = best->end;
  }
  return kept;
}

}  // namespace clozeqa
