#pragma once

#include <filesystem>
#include <string>

#include "perclab/manifest.hpp"

namespace perclab {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitInvalid = 2 };

struct RunOptions {
  std::filesystem::path out_dir = ".";
  unsigned workers = 1;
  bool resume = false;
  /// Stop after this many newly finished units, leaving only the partial
  /// file behind (0 = run to the end). Used to exercise resume.
  std::size_t stop_after = 0;
};

struct RunReport {
  int status = kExitOk;
  bool up_to_date = false;  // a matching summary existed; nothing was run
  bool stopped = false;     // interrupted by stop_after
  std::size_t units_total = 0;
  std::size_t units_resumed = 0;
  std::filesystem::path csv, summary;
  std::string message;
};

/// Output paths are <out_dir>/<output>.csv and <out_dir>/<output>.json;
/// finished units are appended to <output>.partial.jsonl as they complete
/// and reused with `resume`. A run whose summary already carries the same
/// manifest hash and code version is not repeated.
RunReport run_manifest(const Manifest& manifest, const RunOptions& options);

}  // namespace perclab
