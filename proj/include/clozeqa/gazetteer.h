#ifndef CLOZEQA_GAZETTEER_H_
#define CLOZEQA_GAZETTEER_H_

// Entity dictionary: the surface forms that may be masked, each tied to one
// or more entity identifiers.
//
// File format: UTF-8, one record per line, `entity_id<TAB>surface`. Lines
// starting with '#' are comments. A one-column line holds only a surface and
// gets the synthetic id `L<line_number>` (1-based physical line).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace clozeqa {

struct NormalizationOptions {
  bool case_fold = false;
  bool collapse_internal_whitespace = true;
  // Measured in code points.
  std::size_t min_surface_chars = 2;
};

// Trims ASCII whitespace, optionally collapses internal whitespace runs to a
// single space, and optionally case-folds. Idempotent.
std::string normalize_surface(std::string_view s,
                              const NormalizationOptions& opts = {});

struct EntityRecord {
  std::string entity_id;
  std::string surface;

  friend bool operator==(const EntityRecord&, const EntityRecord&) = default;
};

// Line accounting for one load. Blank and comment lines are not data lines.
// Invariant: retained + rejected() + deduplicated == data_lines.
struct GazetteerStats {
  std::size_t data_lines = 0;
  std::size_t comment_lines = 0;
  std::size_t retained = 0;
  std::size_t rejected_malformed = 0;
  std::size_t rejected_short = 0;
  std::size_t deduplicated = 0;

  std::size_t rejected() const { return rejected_malformed + rejected_short; }
};

class Gazetteer {
 public:
  // Builds a gazetteer from in-memory (id, surface) pairs with the same
  // normalization, filtering and dedup rules as load_gazetteer. Records with
  // an empty id are rejected as malformed.
  static Gazetteer from_records(std::span<const EntityRecord> records,
                                const NormalizationOptions& opts = {});

  // Retained records in first-occurrence order, surfaces normalized.
  const std::vector<EntityRecord>& records() const { return records_; }

  // Distinct normalized surfaces in first-occurrence order.
  const std::vector<std::string>& surfaces() const { return surfaces_; }
  std::size_t surface_count() const { return surfaces_.size(); }

  // Entity ids sharing `surface` (already normalized), in file order. Empty
  // if the surface is unknown.
  std::vector<std::string_view> entity_ids(std::string_view surface) const;

  // First-listed entity id for the i-th distinct surface.
  const std::string& primary_entity_id(std::size_t surface_index) const;

  bool empty() const { return records_.empty(); }
  const NormalizationOptions& options() const { return options_; }
  const GazetteerStats& stats() const { return stats_; }

  // SHA-256 over the normalization options and retained records.
  std::string fingerprint() const;

 private:
  friend class GazetteerBuilder;

  NormalizationOptions options_;
  GazetteerStats stats_;
  std::vector<EntityRecord> records_;
  std::vector<std::string> surfaces_;
  // Indexed like surfaces_; holds indices into records_.
  std::vector<std::vector<std::uint32_t>> records_by_surface_;
  std::unordered_map<std::string, std::uint32_t> surface_index_;
};

// Throws IoError naming the path if the file cannot be read. Malformed rows
// are counted in stats() and skipped.
Gazetteer load_gazetteer(const std::filesystem::path& path,
                         const NormalizationOptions& opts = {});

}  // namespace clozeqa

#endif  // CLOZEQA_GAZETTEER_H_
