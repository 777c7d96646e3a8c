#pragma once

#include <filesystem>
#include <string>

#include "maxstab/config.hpp"

namespace maxstab {

// One CLI invocation, resolved. `threads_override` < 0 means "use the config";
// the MAXSTAB_THREADS environment variable sits between the two.
struct RunOptions {
  Command command = Command::simulate;
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  bool reproducible = false;
  long threads_override = -1;
};

// Runs one experiment end to end: load config, simulate/estimate, write the
// artifacts plus manifest.json into out_dir. Returns the process exit status:
//   0  success
//   2  configuration or usage error
//   3  numerical failure (simulation budget, non-positive variance, ...)
//   4  I/O failure
// Failures also leave an error.json in out_dir when the directory is usable.
int run_experiment(const RunOptions& opts);

}  // namespace maxstab
