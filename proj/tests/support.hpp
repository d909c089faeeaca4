#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "reforacle/dataset.hpp"
#include "reforacle/java_executor.hpp"
#include "reforacle/model_client.hpp"

namespace reforacle::testing {

/// Fresh directory below the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path fixtures_dir();
std::filesystem::path fixture_corpus_root();
BugCorpus fixture_corpus();
std::filesystem::path cli_path();

SourceSet single_file(const std::string& path, const std::string& content);

/// Writes shell-script stand-ins for javac and java into `dir`. The fake
/// compiler rejects any source containing `SYNTAX_ERROR`; the fake runner
/// prints a JUnit-style summary chosen by markers in the compiled sources:
/// `RESULT_FAIL` fails, `RESULT_ERROR` errors, `RESULT_HANG` sleeps.
struct FakeJdk {
  std::filesystem::path javac;
  std::filesystem::path java;
};
FakeJdk write_fake_jdk(const std::filesystem::path& dir);

/// Copies the first `n` fixture instances to `<dir>/instances`; returns `dir`.
std::filesystem::path small_corpus(const std::filesystem::path& dir, int n);

/// Mock backend whose answers vary by instance and attempt: CE instances are
/// mostly answered correctly, BC instances get a mix of YES and behavior-change
/// claims carrying the exposing test.
BackendConfig scripted_mock(const BugCorpus& corpus, int attempts,
                            const std::string& name = "mock-model");

/// Toolchain on which every BC exposing test passes on the original and fails
/// on the resulting program, for base instances and the given extra programs.
std::unique_ptr<exec::MockToolchain> scripted_toolchain(const BugCorpus& corpus);

/// Outcome lines with wall-clock fields (created_at, elapsed_ms) removed.
std::string without_timestamps(const std::string& jsonl, bool drop_latency = false);

/// A real JDK with JUnit on the class path, if the environment provides one
/// (javac/java via PATH or JAVA_HOME, JUnit via REFORACLE_JUNIT_CP).
std::unique_ptr<exec::JdkToolchain> real_jdk();

}  // namespace reforacle::testing
