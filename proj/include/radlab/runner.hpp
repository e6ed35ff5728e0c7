#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "radlab/conditions.hpp"
#include "radlab/config.hpp"

namespace radlab {

struct RunOptions {
  std::string out_dir;  // empty: the config's [output] dir
  std::uint64_t seed = 1;
  int jobs = 1;
  bool strict = false;  // inconclusive counts as failure
};

struct ExperimentOutcome {
  std::string name;
  std::string type;
  Verdict verdict = Verdict::pass;
  bool error = false;  // the experiment threw; verdict is fail
  std::string summary;
  std::vector<std::string> files;
};

struct RunResult {
  std::vector<ExperimentOutcome> outcomes;
  int exit_code = 0;
};

// Commands: check | solve | lap | radiation | hoelder | rellich | sommerfeld |
// riccati | energy | all. Runs every experiment block of the command's type
// (all blocks for "all"); when the config has none, one block with default
// settings named after the command. One verdict line per experiment goes to
// `log`, in config order.
RunResult run(const RunConfig& config, const std::string& command, const RunOptions& options,
              std::ostream& log);

int exit_code(const std::vector<ExperimentOutcome>& outcomes, bool strict);

}  // namespace radlab
