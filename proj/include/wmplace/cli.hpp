#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wmp {

enum ExitCode : int {
  kExitOk = 0,
  kExitPipeline = 1,
  kExitUsage = 2,
  kExitBelowThreshold = 3,
};

// Batch front end: gen | place | watermark | attack | verify | report.
// `args` excludes the program name. Every command writes config.resolved
// under --out; `wmplace --config <dir>/config.resolved` replays the run.
int cli_main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace wmp
