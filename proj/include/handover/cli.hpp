#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace handover::cli {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitStage = 2;

/// Runs the `handover` command line. `args` excludes the program name.
/// Subcommands: voxelize, plan, bench, suite.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace handover::cli
