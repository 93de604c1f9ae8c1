#include "clozeqa/gazetteer.h"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "clozeqa/io.h"
#include "clozeqa/text.h"

namespace clozeqa {

std::string normalize_surface(std::string_view s,
                              const NormalizationOptions& opts) {
  const std::string_view trimmed = text::trim(s);
  std::string out;
  out.reserve(trimmed.size());
  if (opts.collapse_internal_whitespace) {
    bool in_space = false;
    for (const char c : trimmed) {
      if (text::is_ascii_space(static_cast<unsigned char>(c))) {
        in_space = true;
        continue;
      }
      if (in_space) out.push_back(' ');
      in_space = false;
      out.push_back(c);
    }
  } else {
    out.assign(trimmed);
  }
  if (opts.case_fold) out = text::fold_case_preserving_offsets(out);
  return out;
}

class GazetteerBuilder {
 public:
  explicit GazetteerBuilder(const NormalizationOptions& opts) {
    g_.options_ = opts;
  }

  void add_line(std::string_view line, std::uint64_t line_number) {
    if (text::trim(line).empty() || line.front() == '#') {
      ++g_.stats_.comment_lines;
      return;
    }
    ++g_.stats_.data_lines;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      add_candidate("L" + std::to_string(line_number), line);
      return;
    }
    const std::string_view id = text::trim(line.substr(0, tab));
    const std::string_view surface = line.substr(tab + 1);
    if (surface.find('\t') != std::string_view::npos) {
      ++g_.stats_.rejected_malformed;
      return;
    }
    add_candidate(std::string(id), surface);
  }

  void add_record(const EntityRecord& r) {
    ++g_.stats_.data_lines;
    add_candidate(std::string(text::trim(r.entity_id)), r.surface);
  }

  Gazetteer finish() && { return std::move(g_); }

 private:
  void add_candidate(std::string id, std::string_view raw_surface) {
    auto& st = g_.stats_;
    if (id.empty() || text::trim(raw_surface).empty() ||
        !text::is_valid_utf8(id) || !text::is_valid_utf8(raw_surface)) {
      ++st.rejected_malformed;
      return;
    }
    std::string surface = normalize_surface(raw_surface, g_.options_);
    const std::size_t min_chars =
        std::max<std::size_t>(g_.options_.min_surface_chars, 1);
    if (text::count_code_points(surface) < min_chars) {
      ++st.rejected_short;
      return;
    }
    std::string key = id;
    key.push_back('\0');
    key += surface;
    if (!seen_.insert(std::move(key)).second) {
      ++st.deduplicated;
      return;
    }

    const auto record_index = static_cast<std::uint32_t>(g_.records_.size());
    auto [it, inserted] = g_.surface_index_.try_emplace(
        surface, static_cast<std::uint32_t>(g_.surfaces_.size()));
    if (inserted) {
      g_.surfaces_.push_back(surface);
      g_.records_by_surface_.emplace_back();
    }
    g_.records_by_surface_[it->second].push_back(record_index);
    g_.records_.push_back({std::move(id), std::move(surface)});
    ++st.retained;
  }

  Gazetteer g_;
  std::unordered_set<std::string> seen_;
};

Gazetteer Gazetteer::from_records(std::span<const EntityRecord> records,
                                  const NormalizationOptions& opts) {
  GazetteerBuilder builder(opts);
  for (const auto& r : records) builder.add_record(r);
  return std::move(builder).finish();
}

std::vector<std::string_view> Gazetteer::entity_ids(
    std::string_view surface) const {
  std::vector<std::string_view> ids;
  const auto it = surface_index_.find(std::string(surface));
  if (it == surface_index_.end()) return ids;
  for (const std::uint32_t r : records_by_surface_[it->second]) {
    ids.push_back(records_[r].entity_id);
  }
  return ids;
}

const std::string& Gazetteer::primary_entity_id(
    std::size_t surface_index) const {
  return records_.at(records_by_surface_.at(surface_index).front()).entity_id;
}

std::string Gazetteer::fingerprint() const {
  std::string buf = "case_fold=" + std::to_string(options_.case_fold) +
                    ";collapse=" +
                    std::to_string(options_.collapse_internal_whitespace) +
                    ";min_chars=" + std::to_string(options_.min_surface_chars) +
                    "\n";
  for (const auto& r : records_) {
    buf += r.entity_id;
    buf.push_back('\t');
    buf += r.surface;
    buf.push_back('\n');
  }
  return io::sha256_hex(buf);
}

Gazetteer load_gazetteer(const std::filesystem::path& path,
                         const NormalizationOptions& opts) {
  io::LineReader reader(path);
  GazetteerBuilder builder(opts);
  std::string line;
  while (reader.next(line)) {
    std::string_view view = line;
    if (reader.line_number() == 1 && view.starts_with("\xEF\xBB\xBF")) {
      view.remove_prefix(3);
    }
    builder.add_line(view, reader.line_number());
  }
  return std::move(builder).finish();
}

}  // namespace clozeqa
