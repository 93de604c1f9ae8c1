#include "clozeqa/dataset.h"

#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "clozeqa/error.h"
#include "clozeqa/io.h"
#include "clozeqa/random.h"

namespace clozeqa {
namespace {

using nlohmann::json;

// Converts an MRQA [start, end] code point span (inclusive end) into a byte
// range, or nullopt if it does not fit the context.
std::optional<text::ByteRange> to_byte_range(std::string_view context,
                                             const json& span) {
  if (!span.is_array() || span.size() != 2 || !span[0].is_number_integer() ||
      !span[1].is_number_integer()) {
    return std::nullopt;
  }
  const auto s = span[0].get<std::int64_t>();
  const auto e = span[1].get<std::int64_t>();
  if (s < 0 || e < s) return std::nullopt;
  const std::size_t b = text::code_point_to_byte_offset(context, static_cast<std::size_t>(s));
  const std::size_t f = text::code_point_to_byte_offset(context, static_cast<std::size_t>(e) + 1);
  if (b == std::string_view::npos || f == std::string_view::npos) return std::nullopt;
  return text::ByteRange{b, f};
}

class MrqaParser {
 public:
  explicit MrqaParser(std::string name) { out_.name = std::move(name); }

  void feed(std::string_view line) {
    if (text::trim(line).empty()) return;
    if (!have_header_) {
      read_header(line);
      return;
    }
    json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded() || !record.is_object()) {
      ++out_.stats.skipped_records;
      return;
    }
    read_record(record);
  }

  MrqaDataset finish() && {
    if (!have_header_) throw FormatError("missing header");
    return std::move(out_);
  }

 private:
  void read_header(std::string_view line) {
    json first = json::parse(line, nullptr, false);
    if (first.is_discarded() || !first.is_object() || !first.contains("header")) {
      throw FormatError("missing header");
    }
    out_.header = first["header"];
    if (out_.header.is_object() && out_.header.contains("dataset") &&
        out_.header["dataset"].is_string()) {
      out_.name = out_.header["dataset"].get<std::string>();
    }
    have_header_ = true;
  }

  void read_record(const json& record) {
    auto& st = out_.stats;
    const auto ctx = record.find("context");
    const auto qas = record.find("qas");
    if (ctx == record.end() || !ctx->is_string() || qas == record.end() ||
        !qas->is_array()) {
      ++st.skipped_records;
      return;
    }
    ++st.context_records;
    const auto& context = ctx->get_ref<const std::string&>();
    for (const auto& qa : *qas) {
      std::optional<QAExample> ex = read_question(qa, context);
      if (!ex) {
        ++st.skipped_questions;
        continue;
      }
      if (!seen_qids_.insert(ex->qid).second) {
        ++st.duplicate_qids;
        continue;
      }
      out_.examples.push_back(std::move(*ex));
    }
  }

  std::optional<QAExample> read_question(const json& qa,
                                         const std::string& context) {
    if (!qa.is_object()) return std::nullopt;
    const auto qid = qa.find("qid");
    const auto question = qa.find("question");
    const auto answers = qa.find("answers");
    if (qid == qa.end() || !qid->is_string() || question == qa.end() ||
        !question->is_string() || answers == qa.end() || !answers->is_array()) {
      return std::nullopt;
    }
    QAExample ex;
    ex.qid = qid->get<std::string>();
    ex.question = question->get<std::string>();
    ex.context = context;
    for (const auto& a : *answers) {
      if (a.is_string()) ex.gold_answers.push_back(a.get<std::string>());
    }
    if (ex.gold_answers.empty()) return std::nullopt;

    const auto detected = qa.find("detected_answers");
    if (detected != qa.end() && detected->is_array()) {
      for (const auto& d : *detected) {
        read_detected(d, ex);
      }
    }
    return ex;
  }

  void read_detected(const json& d, QAExample& ex) {
    if (!d.is_object()) return;
    const auto spans = d.find("char_spans");
    if (spans == d.end() || !spans->is_array()) return;
    const auto txt = d.find("text");
    for (const auto& span : *spans) {
      const auto range = to_byte_range(ex.context, span);
      const bool matches =
          range && txt != d.end() && txt->is_string() &&
          std::string_view(ex.context).substr(range->start, range->end - range->start) ==
              txt->get_ref<const std::string&>();
      if (!matches) {
        ++out_.stats.dropped_spans;
        continue;
      }
      ex.answer_char_spans.push_back(*range);
    }
  }

  MrqaDataset out_;
  bool have_header_ = false;
  std::unordered_set<std::string> seen_qids_;
};

}  // namespace

MrqaDataset load_mrqa(const std::filesystem::path& path) {
  io::LineReader reader(path);
  std::string name = path.filename().string();
  for (const std::string_view ext : {".gz", ".jsonl", ".json"}) {
    if (name.ends_with(ext)) name.resize(name.size() - ext.size());
  }
  MrqaParser parser(std::move(name));
  std::string line;
  while (reader.next(line)) parser.feed(line);
  return std::move(parser).finish();
}

MrqaDataset parse_mrqa(std::string_view content, std::string name) {
  MrqaParser parser(std::move(name));
  while (!content.empty()) {
    const std::size_t nl = content.find('\n');
    std::string_view line = content.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    parser.feed(line);
    if (nl == std::string_view::npos) break;
    content.remove_prefix(nl + 1);
  }
  return std::move(parser).finish();
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k,
                                        std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("few-shot size k must be >= 1");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t take = std::min(k, n);
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(take);
  return idx;
}

FewShotSplit sample_few_shot(std::span<const QAExample> examples, std::size_t k,
                             std::uint64_t seed) {
  FewShotSplit split;
  split.source_size = examples.size();
  split.k = k;
  split.seed = seed;
  split.selected_indices = sample_indices(examples.size(), k, seed);
  split.selected_qids.reserve(split.selected_indices.size());
  for (const std::size_t i : split.selected_indices) {
    split.selected_qids.push_back(examples[i].qid);
  }
  return split;
}

nlohmann::json split_manifest(const FewShotSplit& split, std::string_view dataset) {
  return json{{"dataset", dataset},
              {"k", split.k},
              {"seed", split.seed},
              {"qids", split.selected_qids}};
}

std::vector<std::string> manifest_qids(const nlohmann::json& manifest) {
  if (!manifest.is_object() || !manifest.contains("qids") ||
      !manifest["qids"].is_array()) {
    throw FormatError("split manifest has no 'qids' array");
  }
  std::vector<std::string> qids;
  for (const auto& q : manifest["qids"]) {
    if (!q.is_string()) throw FormatError("split manifest qid is not a string");
    qids.push_back(q.get<std::string>());
  }
  return qids;
}

std::vector<QAExample> select_examples(std::span<const QAExample> examples,
                                       std::span<const std::string> qids) {
  std::unordered_map<std::string_view, std::size_t> by_qid;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    by_qid.emplace(examples[i].qid, i);
  }
  std::vector<QAExample> out;
  out.reserve(qids.size());
  for (const auto& q : qids) {
    const auto it = by_qid.find(q);
    if (it == by_qid.end()) throw FormatError("qid '" + q + "' not in dataset");
    out.push_back(examples[it->second]);
  }
  return out;
}

}  // namespace clozeqa
