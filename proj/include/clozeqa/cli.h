#ifndef CLOZEQA_CLI_H_
#define CLOZEQA_CLI_H_

// Subcommands of the `clozeqa` tool: sample, augment, eval, stats.
//
// Every subcommand accepts `--config FILE` holding `key=value` lines (keys are
// long option names, `-` and `_` interchangeable, `#` comments). Explicit
// flags override config values. GOTTA_THREADS caps worker threads.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "clozeqa/augment.h"
#include "clozeqa/gazetteer.h"

namespace clozeqa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
  // paths
  std::filesystem::path train;
  std::filesystem::path gazetteer;
  std::filesystem::path split;  // optional manifest
  std::filesystem::path output;
  std::filesystem::path stats;  // defaults to <output>.stats.json

  std::optional<std::size_t> k;  // sample inline when no split is given
  AugmentOptions augment;
  NormalizationOptions normalization;
  double lambda = 1.0;  // recorded for the trainer, unused here
  std::size_t threads = 0;  // 0 = hardware concurrency
};

nlohmann::ordered_json to_json(const RunConfig& config);

// Worker count after applying the GOTTA_THREADS cap.
std::size_t resolve_threads(std::size_t requested);

int cmd_augment(const RunConfig& config, std::ostream& log);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace clozeqa::cli

#endif  // CLOZEQA_CLI_H_
