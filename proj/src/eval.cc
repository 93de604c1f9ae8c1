#include "clozeqa/eval.h"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "clozeqa/error.h"
#include "clozeqa/text.h"

namespace clozeqa {
namespace {

// Python's string.punctuation.
bool is_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
         (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
}

bool is_article(std::string_view t) { return t == "a" || t == "an" || t == "the"; }

// Splits on ASCII and Unicode whitespace.
std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const auto n = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < n) {
    const int32_t begin = i;
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c >= 0 && u_isUWhiteSpace(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.append(s.substr(static_cast<std::size_t>(begin),
                          static_cast<std::size_t>(i - begin)));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

std::vector<std::string> normalize_answer(std::string_view s) {
  std::string lowered = text::to_lower(s);
  std::erase_if(lowered, [](char c) { return is_punct(static_cast<unsigned char>(c)); });
  std::vector<std::string> tokens = split_whitespace(lowered);
  std::erase_if(tokens, [](const std::string& t) { return is_article(t); });
  return tokens;
}

double token_f1(std::string_view prediction, std::string_view gold) {
  const auto pred = normalize_answer(prediction);
  const auto ref = normalize_answer(gold);
  if (pred.empty() || ref.empty()) return pred.empty() && ref.empty() ? 1.0 : 0.0;

  std::unordered_map<std::string_view, long> counts;
  for (const auto& t : ref) ++counts[t];
  long common = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(common) / static_cast<double>(ref.size());
  return 2.0 * precision * recall / (precision + recall);
}

double score_example(std::string_view prediction, std::span<const std::string> golds) {
  if (golds.empty()) throw std::invalid_argument("score_example needs at least one gold answer");
  double best = 0.0;
  for (const auto& g : golds) best = std::max(best, token_f1(prediction, g));
  return best;
}

EvalReport evaluate(const Predictions& predictions, std::span<const QAExample> gold) {
  EvalReport report;
  double sum = 0.0;
  for (const auto& ex : gold) {
    double f1 = 0.0;
    const auto it = predictions.find(ex.qid);
    if (it == predictions.end()) {
      ++report.missing_predictions;
    } else {
      f1 = score_example(it->second, ex.gold_answers);
    }
    report.per_example[ex.qid] = f1;
    sum += f1;
  }
  report.n = gold.size();
  report.mean_f1 = gold.empty() ? 0.0 : sum / static_cast<double>(gold.size());
  report.run_means = {report.mean_f1};
  return report;
}

EvalReport aggregate(std::span<const double> run_means) {
  if (run_means.empty()) throw std::invalid_argument("aggregate needs at least one run");
  EvalReport report;
  report.n = run_means.size();
  report.run_means.assign(run_means.begin(), run_means.end());
  double sum = 0.0;
  for (const double m : run_means) sum += m;
  report.mean_f1 = sum / static_cast<double>(run_means.size());
  double sq = 0.0;
  for (const double m : run_means) sq += (m - report.mean_f1) * (m - report.mean_f1);
  report.std_f1 = std::sqrt(sq / static_cast<double>(run_means.size()));
  return report;
}

EvalReport aggregate(std::span<const EvalReport> runs) {
  std::vector<double> means;
  means.reserve(runs.size());
  std::size_t missing = 0;
  for (const auto& r : runs) {
    means.push_back(r.mean_f1);
    missing += r.missing_predictions;
  }
  EvalReport report = aggregate(std::span<const double>(means));
  report.missing_predictions = missing;
  if (runs.size() == 1) report.per_example = runs.front().per_example;
  return report;
}

Predictions parse_predictions(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("predictions must be a JSON object {qid: answer}");
  Predictions out;
  for (const auto& [qid, value] : j.items()) {
    if (!value.is_string()) {
      throw FormatError("prediction for '" + qid + "' is not a string");
    }
    out.emplace(qid, value.get<std::string>());
  }
  return out;
}

nlohmann::ordered_json to_json(const EvalReport& report, bool per_example) {
  nlohmann::ordered_json j;
  if (per_example) j["per_example"] = report.per_example;
  j["mean_f1"] = report.mean_f1;
  j["std_f1"] = report.std_f1;
  j["n"] = report.n;
  j["missing_predictions"] = report.missing_predictions;
  if (report.run_means.size() > 1) j["run_means"] = report.run_means;
  return j;
}

}  // namespace clozeqa
