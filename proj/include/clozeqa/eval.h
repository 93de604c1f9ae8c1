#ifndef CLOZEQA_EVAL_H_
#define CLOZEQA_EVAL_H_

// Bag-of-words token F1 between predicted and gold answers, maximised over
// gold references, with SQuAD-style answer normalization.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "clozeqa/dataset.h"

namespace clozeqa {

// Lowercase, drop ASCII punctuation, drop the articles a/an/the, split on
// whitespace.
std::vector<std::string> normalize_answer(std::string_view s);

// Multiset-overlap F1 of the normalized tokens. Both empty -> 1, exactly one
// empty -> 0.
double token_f1(std::string_view prediction, std::string_view gold);

// Max of token_f1 over golds. Throws std::invalid_argument if golds is empty.
double score_example(std::string_view prediction, std::span<const std::string> golds);

struct EvalReport {
  std::map<std::string, double> per_example;  // qid -> F1
  double mean_f1 = 0.0;
  double std_f1 = 0.0;   // population std over runs; 0 for a single run
  std::size_t n = 0;     // examples scored, or runs when aggregated
  std::size_t missing_predictions = 0;
  std::vector<double> run_means;  // filled by aggregate
};

using Predictions = std::unordered_map<std::string, std::string>;

// Scores every gold example. A qid without a prediction scores 0 and is
// counted in missing_predictions.
EvalReport evaluate(const Predictions& predictions, std::span<const QAExample> gold);

// Mean and population standard deviation of per-run mean F1.
EvalReport aggregate(std::span<const EvalReport> runs);
EvalReport aggregate(std::span<const double> run_means);

// Parses a {qid: prediction} object. Non-string values are rejected.
Predictions parse_predictions(const nlohmann::json& j);

nlohmann::ordered_json to_json(const EvalReport& report, bool per_example);

}  // namespace clozeqa

#endif  // CLOZEQA_EVAL_H_
