#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gazeshift::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kDomainError = 2,
  kUsage = 64,
};

/// Runs one invocation; `args` excludes the program name.
/// Subcommands: map, sweep, wilcoxon, synth, validate.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gazeshift::cli
