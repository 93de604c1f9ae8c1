#include "clozeqa/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "clozeqa/dataset.h"
#include "clozeqa/error.h"
#include "clozeqa/eval.h"
#include "clozeqa/io.h"
#include "clozeqa/matcher.h"

namespace clozeqa::cli {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SampleArgs {
  fs::path input;
  fs::path output;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::string dataset;
};

struct EvalArgs {
  fs::path gold;
  std::vector<fs::path> predictions;
  fs::path output;
  bool per_example = false;
};

struct StatsArgs {
  std::vector<fs::path> inputs;
  fs::path output;
  bool table = false;
};

fs::path sidecar(const fs::path& output, std::string_view suffix) {
  return fs::path(output.string() + std::string(suffix));
}

ordered_json input_entry(const fs::path& path) {
  return ordered_json{{"path", path.string()}, {"sha256", io::sha256_file(path)}};
}

ordered_json run_record(std::string_view command, ordered_json config,
                        ordered_json inputs) {
  return ordered_json{{"command", command},
                      {"version", CLOZEQA_VERSION},
                      {"config", std::move(config)},
                      {"inputs", std::move(inputs)}};
}

void emit(const fs::path& output, const std::string& body, std::ostream& out) {
  if (output.empty()) {
    out << body;
  } else {
    io::write_file(output, body);
  }
}

// key=value lines; '#' starts a comment line.
std::vector<std::pair<std::string, std::string>> read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path.string() + "'");
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = text::trim(line);
    if (view.empty() || view.front() == '#') continue;
    const std::size_t eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config '" + path.string() + "' line " +
                       std::to_string(line_no) + ": expected key=value");
    }
    std::string key(text::trim(view.substr(0, eq)));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.starts_with("--")) key.erase(0, 2);
    pairs.emplace_back(std::move(key), std::string(text::trim(view.substr(eq + 1))));
  }
  return pairs;
}

// Moves `--config FILE` contents in front of the explicit arguments so that
// later (explicit) values win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  std::vector<std::string> rest;
  std::vector<std::string> from_config;
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file argument");
      path = args[++i];
    } else if (args[i].starts_with("--config=")) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    for (auto& [k, v] : read_config(path)) from_config.push_back("--" + k + "=" + v);
  }
  std::vector<std::string> out{args.front()};
  out.insert(out.end(), from_config.begin(), from_config.end());
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

int cmd_sample(const SampleArgs& a, std::ostream& out, std::ostream& log) {
  const MrqaDataset ds = load_mrqa(a.input);
  const FewShotSplit split = sample_few_shot(ds.examples, a.k, a.seed);
  const std::string name = a.dataset.empty() ? ds.name : a.dataset;
  emit(a.output, split_manifest(split, name).dump(2) + "\n", out);
  if (!a.output.empty()) {
    const ordered_json config{{"input", a.input.string()}, {"k", a.k},
                              {"seed", a.seed}, {"dataset", name}};
    io::write_file(sidecar(a.output, ".run.json"),
                   run_record("sample", config, {{"input", input_entry(a.input)}}).dump(2) + "\n");
  }
  log << "sample: " << split.selected_qids.size() << " of " << split.source_size
      << " examples (k=" << a.k << ", seed=" << a.seed << ")\n";
  if (ds.stats.warnings() > 0) {
    log << "sample: " << ds.stats.warnings() << " input warnings\n";
  }
  return kExitOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& log) {
  const MrqaDataset gold = load_mrqa(a.gold);
  std::vector<EvalReport> runs;
  ordered_json inputs{{"gold", input_entry(a.gold)}, {"predictions", ordered_json::array()}};
  for (const auto& p : a.predictions) {
    json parsed = json::parse(io::read_file(p), nullptr, false);
    if (parsed.is_discarded()) throw FormatError("'" + p.string() + "' is not valid JSON");
    runs.push_back(evaluate(parse_predictions(parsed), gold.examples));
    inputs["predictions"].push_back(input_entry(p));
    if (runs.back().missing_predictions > 0) {
      log << "eval: warning: " << runs.back().missing_predictions
          << " gold questions have no prediction in '" << p.string()
          << "' (scored 0)\n";
    }
  }
  ordered_json report;
  if (runs.size() == 1) {
    report = to_json(runs.front(), a.per_example);
  } else {
    report = to_json(aggregate(std::span<const EvalReport>(runs)), false);
    if (a.per_example) {
      report["runs"] = ordered_json::array();
      for (const auto& r : runs) report["runs"].push_back(to_json(r, true));
    }
  }
  emit(a.output, report.dump(2) + "\n", out);
  if (!a.output.empty()) {
    const ordered_json config{{"gold", a.gold.string()}, {"per_example", a.per_example}};
    io::write_file(sidecar(a.output, ".run.json"),
                   run_record("eval", config, inputs).dump(2) + "\n");
  }
  log << "eval: mean F1 " << report["mean_f1"].get<double>() << " over "
      << runs.size() << " run(s)\n";
  return kExitOk;
}

int cmd_stats(const StatsArgs& a, std::ostream& out, std::ostream& log) {
  ordered_json files = ordered_json::array();
  for (const auto& path : a.inputs) {
    io::LineReader reader(path);
    std::string line;
    std::size_t ori = 0;
    std::size_t aug = 0;
    std::map<std::string, std::size_t> per_qid;
    std::map<std::string, std::size_t> templates;
    while (reader.next(line)) {
      if (text::trim(line).empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("kind") || !j.contains("source_qid")) {
        throw FormatError("'" + path.string() + "' line " +
                          std::to_string(reader.line_number()) +
                          " is not a prompt pair");
      }
      const std::string qid = j["source_qid"].get<std::string>();
      if (j["kind"] == "ori") {
        ++ori;
        per_qid.try_emplace(qid, 0);
      } else {
        ++aug;
        ++per_qid[qid];
      }
      ++templates[j.value("template", std::string("gotta"))];
    }
    const std::size_t max_per =
        per_qid.empty() ? 0
                        : std::max_element(per_qid.begin(), per_qid.end(),
                                           [](const auto& x, const auto& y) {
                                             return x.second < y.second;
                                           })->second;
    files.push_back({{"path", path.string()},
                     {"examples", ori},
                     {"aug_pairs", aug},
                     {"avg_aug_per_example",
                      ori == 0 ? 0.0 : static_cast<double>(aug) / static_cast<double>(ori)},
                     {"max_aug_per_example", max_per},
                     {"templates", templates}});
  }
  if (a.table) {
    std::ostringstream t;
    t << "file\texamples\taug_pairs\tavg_aug_per_example\n";
    for (const auto& f : files) {
      t << f["path"].get<std::string>() << '\t' << f["examples"] << '\t'
        << f["aug_pairs"] << '\t' << f["avg_aug_per_example"] << '\n';
    }
    emit(a.output, t.str(), out);
  } else {
    emit(a.output, ordered_json{{"files", files}}.dump(2) + "\n", out);
  }
  log << "stats: " << files.size() << " file(s)\n";
  return kExitOk;
}

}  // namespace

nlohmann::ordered_json to_json(const RunConfig& c) {
  return ordered_json{
      {"train", c.train.string()},
      {"gazetteer", c.gazetteer.string()},
      {"split", c.split.string()},
      {"k", c.k ? ordered_json(*c.k) : ordered_json(nullptr)},
      {"augment", to_json(c.augment)},
      {"normalization",
       {{"case_fold", c.normalization.case_fold},
        {"collapse_internal_whitespace", c.normalization.collapse_internal_whitespace},
        {"min_surface_chars", c.normalization.min_surface_chars}}},
      {"trainer", {{"lambda", c.lambda}}},
  };
}

std::size_t resolve_threads(std::size_t requested) {
  std::size_t n = requested != 0
                      ? requested
                      : std::max<std::size_t>(std::thread::hardware_concurrency(), 1);
  if (const char* env = std::getenv("GOTTA_THREADS"); env != nullptr) {
    char* end = nullptr;
    const unsigned long long cap = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) {
      n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    }
  }
  return n;
}

int cmd_augment(const RunConfig& c, std::ostream& log) {
  if (c.output.empty()) throw UsageError("augment needs --output");
  const Gazetteer gazetteer = load_gazetteer(c.gazetteer, c.normalization);
  if (gazetteer.surface_count() == 0) {
    throw FormatError("gazetteer '" + c.gazetteer.string() + "' has no usable entries");
  }
  const MatchAutomaton automaton = build_automaton(gazetteer);
  const MrqaDataset ds = load_mrqa(c.train);

  ordered_json inputs{{"train", input_entry(c.train)}, {"gazetteer", input_entry(c.gazetteer)}};
  std::vector<QAExample> examples;
  if (!c.split.empty()) {
    const json manifest = json::parse(io::read_file(c.split), nullptr, false);
    if (manifest.is_discarded()) {
      throw FormatError("split manifest '" + c.split.string() + "' is not valid JSON");
    }
    const auto qids = manifest_qids(manifest);
    examples = select_examples(ds.examples, qids);
    inputs["split"] = input_entry(c.split);
  } else if (c.k) {
    const FewShotSplit split = sample_few_shot(ds.examples, *c.k, c.augment.seed);
    examples = select_examples(ds.examples, split.selected_qids);
  } else {
    examples = ds.examples;
  }

  AugmentOptions opts = c.augment;
  opts.threads = resolve_threads(c.threads);
  const AugmentedSet set = augment_dataset(examples, automaton, opts);

  {
    std::ofstream out(c.output, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + c.output.string() + "'");
    write_jsonl(set, out);
    if (!out) throw IoError("write failure in '" + c.output.string() + "'");
  }

  ordered_json stats = stats_json(set);
  stats["dataset"] = ds.name;
  stats["gazetteer"] = {{"records", gazetteer.records().size()},
                        {"surfaces", gazetteer.surface_count()},
                        {"rejected_malformed", gazetteer.stats().rejected_malformed},
                        {"rejected_short", gazetteer.stats().rejected_short},
                        {"deduplicated", gazetteer.stats().deduplicated}};
  stats["input_warnings"] = {{"skipped_records", ds.stats.skipped_records},
                             {"skipped_questions", ds.stats.skipped_questions},
                             {"dropped_spans", ds.stats.dropped_spans},
                             {"duplicate_qids", ds.stats.duplicate_qids}};
  const fs::path stats_path = c.stats.empty() ? sidecar(c.output, ".stats.json") : c.stats;
  io::write_file(stats_path, stats.dump(2) + "\n");
  io::write_file(sidecar(c.output, ".run.json"),
                 run_record("augment", to_json(c), inputs).dump(2) + "\n");

  log << "augment: " << set.ori_pairs.size() << " examples, " << set.aug_pairs.size()
      << " augmented pairs -> " << c.output.string() << "\n";
  return kExitOk;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entity-aware cloze augmentation for few-shot QA", "clozeqa"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", CLOZEQA_VERSION);

  SampleArgs sample;
  auto* sub_sample = app.add_subcommand("sample", "Draw a seeded few-shot split manifest");
  sub_sample->add_option("--input", sample.input, "MRQA JSON-lines file (.gz ok)")
      ->required()->check(CLI::ExistingFile);
  sub_sample->add_option("--k", sample.k, "Split size")->required()->check(CLI::PositiveNumber);
  sub_sample->add_option("--seed", sample.seed, "Sampling seed")->capture_default_str();
  sub_sample->add_option("--output", sample.output, "Manifest path (default: stdout)");
  sub_sample->add_option("--dataset", sample.dataset, "Dataset name for the manifest");

  RunConfig cfg;
  std::string template_name = "gotta";
  std::string target_context = "masked";
  std::size_t k_value = 0;
  std::size_t random_count = 0;
  auto* sub_aug = app.add_subcommand("augment", "Emit ori + cloze prompt pairs");
  sub_aug->add_option("--train", cfg.train, "MRQA JSON-lines training file")
      ->required()->check(CLI::ExistingFile);
  sub_aug->add_option("--gazetteer", cfg.gazetteer, "entity_id<TAB>surface file")
      ->required()->check(CLI::ExistingFile);
  sub_aug->add_option("--split", cfg.split, "Split manifest restricting the examples")
      ->check(CLI::ExistingFile);
  auto* k_opt = sub_aug->add_option("--k", k_value, "Sample k examples (ignored with --split)")
                    ->check(CLI::PositiveNumber);
  sub_aug->add_option("--output", cfg.output, "Prompt-pair JSON-lines output")->required();
  sub_aug->add_option("--stats", cfg.stats, "Stats sidecar (default: <output>.stats.json)");
  sub_aug->add_option("--mask-token", cfg.augment.prompt.mask_token)->capture_default_str();
  sub_aug->add_option("--separator", cfg.augment.prompt.separator, "Segment separator");
  sub_aug->add_option("--template", template_name, "gotta | what | random")
      ->check(CLI::IsMember({"gotta", "what", "random"}))->capture_default_str();
  sub_aug->add_option("--target-context", target_context,
                      "Context carried by augmented targets: masked | original")
      ->check(CLI::IsMember({"masked", "original"}))->capture_default_str();
  sub_aug->add_option("--seed", cfg.augment.seed)->capture_default_str();
  sub_aug->add_flag("--exclude-answer-overlap", cfg.augment.exclude_answer_overlap,
                    "Never mask spans overlapping a gold answer");
  sub_aug->add_flag("--mask-all-occurrences", cfg.augment.mask_all_occurrences,
                    "Mask every retained occurrence of the selected surface");
  sub_aug->add_flag("--case-fold", cfg.normalization.case_fold);
  sub_aug->add_flag("--collapse-whitespace", cfg.normalization.collapse_internal_whitespace)
      ->capture_default_str();
  sub_aug->add_option("--min-surface-chars", cfg.normalization.min_surface_chars)
      ->capture_default_str();
  auto* rc_opt = sub_aug->add_option("--random-count", random_count,
                                     "Spans per example for --template random "
                                     "(default: the entity span count)");
  sub_aug->add_option("--random-min-len", cfg.augment.random_length.first)
      ->check(CLI::PositiveNumber)->capture_default_str();
  sub_aug->add_option("--random-max-len", cfg.augment.random_length.second)
      ->check(CLI::PositiveNumber)->capture_default_str();
  sub_aug->add_option("--lambda", cfg.lambda, "Loss weight recorded for the trainer")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  sub_aug->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");

  EvalArgs ev;
  auto* sub_eval = app.add_subcommand("eval", "Token-F1 of predictions against MRQA golds");
  sub_eval->add_option("--gold", ev.gold, "MRQA JSON-lines file")
      ->required()->check(CLI::ExistingFile);
  sub_eval->add_option("--pred", ev.predictions, "Predictions JSON {qid: answer}; repeat per run")
      ->required()->check(CLI::ExistingFile)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sub_eval->add_option("--output", ev.output, "Report path (default: stdout)");
  sub_eval->add_flag("--per-example", ev.per_example, "Include per-qid scores");

  StatsArgs st;
  auto* sub_stats = app.add_subcommand("stats", "Recount augmented pairs in prompt files");
  sub_stats->add_option("--input", st.inputs, "Prompt-pair JSON-lines file; repeatable")
      ->required()->check(CLI::ExistingFile)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sub_stats->add_option("--output", st.output, "Report path (default: stdout)");
  sub_stats->add_flag("--table", st.table, "Tab-separated table instead of JSON");

  for (auto* sub : {sub_sample, sub_aug, sub_eval, sub_stats}) {
    sub->add_option("--config", "key=value file; explicit flags take precedence");
  }

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "clozeqa: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*sub_sample) return cmd_sample(sample, out, err);
    if (*sub_aug) {
      cfg.augment.template_kind = parse_template_kind(template_name);
      cfg.augment.prompt.target_context =
          target_context == "original" ? TargetContext::kOriginal : TargetContext::kMasked;
      if (k_opt->count() > 0) cfg.k = k_value;
      if (rc_opt->count() > 0) cfg.augment.random_count = random_count;
      if (cfg.augment.random_length.second < cfg.augment.random_length.first) {
        throw UsageError("--random-max-len must be >= --random-min-len");
      }
      return cmd_augment(cfg, err);
    }
    if (*sub_eval) return cmd_eval(ev, out, err);
    if (*sub_stats) return cmd_stats(st, out, err);
  } catch (const UsageError& e) {
    err << "clozeqa: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "clozeqa: error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace clozeqa::cli
