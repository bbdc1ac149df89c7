#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace conjproc::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,    // outputs written but an internal consistency check failed
  kInvalidConfig = 2,
  kIoFailure = 3,
  kNumericFailure = 4,
};

/// Built-in configuration; every subcommand reads its own section.
nlohmann::json default_config();

/// Applies "a.b.c=value" to j. The value is parsed as JSON when possible and
/// kept as a string otherwise.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace conjproc::cli
