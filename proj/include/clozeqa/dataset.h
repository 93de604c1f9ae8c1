#ifndef CLOZEQA_DATASET_H_
#define CLOZEQA_DATASET_H_

// MRQA JSON-lines ingestion and seeded few-shot split sampling.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "clozeqa/text.h"

namespace clozeqa {

struct QAExample {
  std::string qid;
  std::string question;
  std::string context;
  std::vector<std::string> gold_answers;  // non-empty
  // Byte offsets into context, end exclusive.
  std::vector<text::ByteRange> answer_char_spans;
};

struct MrqaLoadStats {
  std::size_t context_records = 0;
  std::size_t skipped_records = 0;    // no usable context / qas
  std::size_t skipped_questions = 0;  // missing qid, question or answers
  std::size_t dropped_spans = 0;      // detected span disagrees with context
  std::size_t duplicate_qids = 0;

  std::size_t warnings() const {
    return skipped_records + skipped_questions + dropped_spans + duplicate_qids;
  }
};

struct MrqaDataset {
  std::string name;  // header "dataset" field, else the file stem
  nlohmann::json header;
  std::vector<QAExample> examples;
  MrqaLoadStats stats;
};

// Throws IoError if the file cannot be read and FormatError if the first line
// is not a {"header": ...} object. Gzip is detected by magic bytes.
MrqaDataset load_mrqa(const std::filesystem::path& path);

// Same as load_mrqa over in-memory JSON-lines content.
MrqaDataset parse_mrqa(std::string_view content, std::string name = "");

inline constexpr std::array<std::size_t, 4> kFewShotSizes = {16, 32, 64, 128};
inline constexpr std::array<std::uint64_t, 5> kDefaultSeeds = {0, 1, 2, 3, 4};

struct FewShotSplit {
  std::size_t source_size = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> selected_indices;  // selection order
  std::vector<std::string> selected_qids;
};

// Uniform sample without replacement: a SplitMix64 stream seeded with `seed`
// drives a partial Fisher-Yates shuffle of [0, n); the first min(k, n)
// positions are returned in selection order. For one seed, smaller splits
// are prefixes of larger ones. Throws std::invalid_argument if k == 0.
FewShotSplit sample_few_shot(std::span<const QAExample> examples, std::size_t k,
                             std::uint64_t seed);

// The index sequence alone.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k,
                                        std::uint64_t seed);

// {dataset, k, seed, qids}
nlohmann::json split_manifest(const FewShotSplit& split, std::string_view dataset);

// Qids listed in a manifest produced by split_manifest.
std::vector<std::string> manifest_qids(const nlohmann::json& manifest);

// Examples whose qids are listed, in list order. Throws FormatError naming the
// first qid that is not present.
std::vector<QAExample> select_examples(std::span<const QAExample> examples,
                                       std::span<const std::string> qids);

}  // namespace clozeqa

#endif  // CLOZEQA_DATASET_H_
