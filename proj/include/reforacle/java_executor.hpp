#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "reforacle/source_set.hpp"

namespace reforacle::exec {

struct CompileResult {
  bool success = false;
  std::string diagnostics;
  std::chrono::milliseconds elapsed{0};
};

enum class TestOutcome { Pass, Fail, Error, Timeout, DidNotCompile };

std::string_view to_string(TestOutcome outcome);
TestOutcome test_outcome_from_string(std::string_view text);

struct TestRunResult {
  TestOutcome outcome = TestOutcome::Error;
  std::string runner_output;
  std::chrono::milliseconds elapsed{0};
};

/// Which version the discriminating test passed on.
enum class Direction { None, PassThenFail, FailThenPass };

std::string_view to_string(Direction direction);

struct DiscriminationResult {
  TestRunResult on_original;
  TestRunResult on_resulting;
  bool discriminates = false;
  Direction direction = Direction::None;
};

/// Evaluates the discrimination rule: both versions compiled the test and
/// exactly one run passed.
DiscriminationResult make_discrimination(TestRunResult on_original,
                                         TestRunResult on_resulting);

class ToolchainError : public std::runtime_error {
 public:
  enum class Kind { ToolchainUnavailable, WorkspaceCreationFailed };
  ToolchainError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// A uniquely named scratch directory, removed on destruction unless kept.
class Workspace {
 public:
  /// Creates `<root>/<tag>-XXXXXX`. Throws WorkspaceCreationFailed.
  static Workspace create(const std::filesystem::path& root, std::string_view tag);

  Workspace(Workspace&& other) noexcept;
  Workspace& operator=(Workspace&& other) noexcept;
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
  ~Workspace();

  const std::filesystem::path& path() const { return path_; }
  const std::string& tag() const { return tag_; }
  void keep() { keep_ = true; }

 private:
  Workspace(std::filesystem::path path, std::string tag)
      : path_(std::move(path)), tag_(std::move(tag)) {}
  std::filesystem::path path_;
  std::string tag_;
  bool keep_ = false;
};

/// Default scratch root: `$TMPDIR/reforacle-work`.
std::filesystem::path default_workspace_root();

/// Compiles programs and runs single JUnit tests. Implementations must be
/// safe to call concurrently with distinct workspaces.
class JavaToolchain {
 public:
  virtual ~JavaToolchain() = default;

  virtual CompileResult compile(const SourceSet& src, const Workspace& ws) = 0;

  /// Compiles `program` together with `test` and runs the test class.
  /// A test without exactly one public top-level class is reported as
  /// DidNotCompile.
  virtual TestRunResult run_test(const SourceSet& program, std::string_view test,
                                 const Workspace& ws) = 0;

  virtual std::string version() const = 0;

  const std::filesystem::path& workspace_root() const { return workspace_root_; }
  void set_workspace_root(std::filesystem::path root) { workspace_root_ = std::move(root); }

 private:
  std::filesystem::path workspace_root_ = default_workspace_root();
};

/// Runs `test` against both versions in two fresh workspaces.
DiscriminationResult check_discriminating(JavaToolchain& toolchain,
                                          std::string_view test,
                                          const SourceSet& original,
                                          const SourceSet& resulting,
                                          std::string_view task_tag = "disc");

/// Lexical check for reflective access in test code (comments ignored).
bool uses_reflection(std::string_view test);

/// Fully-qualified name of the single public top-level class in `test`, or
/// nullopt when there is not exactly one.
std::optional<std::string> test_class_name(std::string_view test);

struct JdkConfig {
  std::filesystem::path javac;
  std::filesystem::path java;
  std::vector<std::string> junit_classpath;
  std::chrono::milliseconds timeout{30'000};
  std::chrono::milliseconds compile_timeout{120'000};
  int max_processes = 4;
  std::optional<std::filesystem::path> log_dir;
  std::string runner_class = "org.junit.runner.JUnitCore";
};

/// Resolves javac/java from PATH or JAVA_HOME when not given. Throws
/// ToolchainUnavailable when either executable is missing.
JdkConfig resolve_jdk(JdkConfig cfg);

/// External JDK toolchain (javac + java + a JUnit 4 compatible runner).
class JdkToolchain : public JavaToolchain {
 public:
  explicit JdkToolchain(JdkConfig cfg);

  CompileResult compile(const SourceSet& src, const Workspace& ws) override;
  TestRunResult run_test(const SourceSet& program, std::string_view test,
                         const Workspace& ws) override;
  std::string version() const override { return version_; }

  const JdkConfig& config() const { return cfg_; }

 private:
  struct Invocation;
  Invocation invoke(const std::vector<std::string>& argv, const Workspace& ws,
                    std::chrono::milliseconds timeout);
  std::string classpath(const std::filesystem::path& classes) const;

  JdkConfig cfg_;
  std::string version_;
  std::counting_semaphore<> slots_;
  std::mutex log_mu_;
};

/// Toolchain-free stand-in: results are looked up by content hash.
class MockToolchain : public JavaToolchain {
 public:
  enum class Fallback { Strict, CompileOkTestPass };

  explicit MockToolchain(Fallback fallback = Fallback::Strict,
                         std::string version = "mock-toolchain");

  void script_compile(const SourceSet& src, CompileResult result);
  void script_test(const SourceSet& program, std::string_view test,
                   TestRunResult result);

  CompileResult compile(const SourceSet& src, const Workspace& ws) override;
  TestRunResult run_test(const SourceSet& program, std::string_view test,
                         const Workspace& ws) override;
  std::string version() const override { return version_; }

  int compile_calls() const;
  int test_calls() const;

  /// Loads scripts from JSON:
  /// {"fallback": "strict"|"ok", "compile": {hash: {"success": bool,
  ///  "diagnostics": str}}, "test": {key: {"outcome": "PASS", ...}}}
  static std::unique_ptr<MockToolchain> from_json(const nlohmann::json& doc);

  static std::string compile_key(const SourceSet& src);
  static std::string test_key(const SourceSet& program, std::string_view test);

 private:
  Fallback fallback_;
  std::string version_;
  mutable std::mutex mu_;
  std::map<std::string, CompileResult> compile_table_;
  std::map<std::string, TestRunResult> test_table_;
  int compile_calls_ = 0;
  int test_calls_ = 0;
};

}  // namespace reforacle::exec
