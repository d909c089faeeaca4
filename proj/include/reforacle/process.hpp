#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace reforacle {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  bool spawn_failed = false;
  std::string output;  // stdout and stderr interleaved
  std::chrono::milliseconds elapsed{0};
};

/// Runs `argv` in `cwd`, capturing combined output. The child gets its own
/// process group; on timeout the whole group is killed.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd,
                          std::chrono::milliseconds timeout);

/// Resolves an executable name against PATH. Empty if not found.
std::filesystem::path find_executable(const std::string& name);

}  // namespace reforacle
