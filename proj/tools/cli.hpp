#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nocf::cli {

/// Process exit codes.
enum Exit : int {
  kOk = 0,
  kViolation = 1,
  kConfigError = 2,
  kInconclusive = 3,
};

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Directory holding the packaged configs.
std::string default_config_dir();

}  // namespace nocf::cli
