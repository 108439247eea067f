#pragma once
#include <ostream>
#include <string>
#include <vector>

namespace fbsync::cli {

/// Exit codes of `run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one subcommand. `args` excludes the program name. Results go to the
/// `--out` file (plus a `.config.json` sidecar) or to `out`; errors are
/// written to `err` as a single JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fbsync::cli
