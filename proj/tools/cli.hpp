#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uwbfp::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kInput = 3,
  kPipeline = 4,
  kIo = 5,
};

/// Runs one invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uwbfp::cli
