#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace spmrf::tools {

/// Process exit codes, one per failure class.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,         // I/O and anything unclassified
  kExitParse = 2,           // malformed fixture, partition, image or seed file
  kExitGeometry = 3,        // inputs of different sizes
  kExitNotSubmodular = 4,
  kExitSeeds = 5,           // contradictory or out-of-range seeds
  kExitUsage = 64,
};

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spmrf::tools
