#include "reforacle/java_executor.hpp"

#include <unistd.h>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <regex>

#include "json.hpp"
#include "reforacle/hash.hpp"
#include "reforacle/java_lexer.hpp"
#include "reforacle/process.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace reforacle::exec {

std::string_view to_string(TestOutcome outcome) {
  switch (outcome) {
    case TestOutcome::Pass: return "PASS";
    case TestOutcome::Fail: return "FAIL";
    case TestOutcome::Error: return "ERROR";
    case TestOutcome::Timeout: return "TIMEOUT";
    case TestOutcome::DidNotCompile: return "DID_NOT_COMPILE";
  }
  return "ERROR";
}

TestOutcome test_outcome_from_string(std::string_view text) {
  if (text == "PASS") return TestOutcome::Pass;
  if (text == "FAIL") return TestOutcome::Fail;
  if (text == "ERROR") return TestOutcome::Error;
  if (text == "TIMEOUT") return TestOutcome::Timeout;
  if (text == "DID_NOT_COMPILE") return TestOutcome::DidNotCompile;
  throw std::invalid_argument("unknown test outcome: " + std::string(text));
}

std::string_view to_string(Direction direction) {
  switch (direction) {
    case Direction::None: return "none";
    case Direction::PassThenFail: return "pass_then_fail";
    case Direction::FailThenPass: return "fail_then_pass";
  }
  return "none";
}

DiscriminationResult make_discrimination(TestRunResult on_original,
                                         TestRunResult on_resulting) {
  DiscriminationResult r;
  r.on_original = std::move(on_original);
  r.on_resulting = std::move(on_resulting);
  const bool compiled = r.on_original.outcome != TestOutcome::DidNotCompile &&
                        r.on_resulting.outcome != TestOutcome::DidNotCompile;
  const bool pass_o = r.on_original.outcome == TestOutcome::Pass;
  const bool pass_r = r.on_resulting.outcome == TestOutcome::Pass;
  r.discriminates = compiled && (pass_o != pass_r);
  if (r.discriminates) {
    r.direction = pass_o ? Direction::PassThenFail : Direction::FailThenPass;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Workspace

Workspace Workspace::create(const fs::path& root, std::string_view tag) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) {
    throw ToolchainError(ToolchainError::Kind::WorkspaceCreationFailed,
                         "cannot create workspace root " + root.string() + ": " +
                             ec.message());
  }
  std::string safe_tag;
  for (char c : tag) {
    safe_tag.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'
                           ? c
                           : '_');
  }
  std::string templ = (root / (safe_tag + "-XXXXXX")).string();
  if (mkdtemp(templ.data()) == nullptr) {
    throw ToolchainError(ToolchainError::Kind::WorkspaceCreationFailed,
                         "mkdtemp failed under " + root.string());
  }
  return Workspace(fs::path(templ), std::string(tag));
}

Workspace::Workspace(Workspace&& other) noexcept
    : path_(std::move(other.path_)), tag_(std::move(other.tag_)), keep_(other.keep_) {
  other.path_.clear();
}

Workspace& Workspace::operator=(Workspace&& other) noexcept {
  if (this != &other) {
    if (!path_.empty() && !keep_) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
    path_ = std::move(other.path_);
    tag_ = std::move(other.tag_);
    keep_ = other.keep_;
    other.path_.clear();
  }
  return *this;
}

Workspace::~Workspace() {
  if (!path_.empty() && !keep_) {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
}

fs::path default_workspace_root() {
  return fs::temp_directory_path() / "reforacle-work";
}

// ---------------------------------------------------------------------------
// Lexical helpers

bool uses_reflection(std::string_view test) {
  std::string code;
  try {
    code = java::strip_comments(test);
  } catch (const java::LexError&) {
    code = std::string(test);
  }
  static const std::regex kReflective(
      R"(java\s*\.\s*lang\s*\.\s*reflect\b|\.\s*(getDeclaredField|getDeclaredFields|getDeclaredMethod|getDeclaredMethods|getDeclaredConstructor|setAccessible)\s*\()");
  return std::regex_search(code, kReflective);
}

std::optional<std::string> test_class_name(std::string_view test) {
  std::vector<std::string> names;
  try {
    names = java::public_top_level_types(test);
  } catch (const java::LexError&) {
    return std::nullopt;
  }
  if (names.size() != 1) return std::nullopt;
  const std::string pkg = java::package_name(test);
  return pkg.empty() ? names.front() : pkg + "." + names.front();
}

DiscriminationResult check_discriminating(JavaToolchain& toolchain,
                                          std::string_view test,
                                          const SourceSet& original,
                                          const SourceSet& resulting,
                                          std::string_view task_tag) {
  const std::string tag(task_tag);
  Workspace ws_orig = Workspace::create(toolchain.workspace_root(), tag + "-original");
  Workspace ws_res = Workspace::create(toolchain.workspace_root(), tag + "-resulting");
  TestRunResult on_orig = toolchain.run_test(original, test, ws_orig);
  TestRunResult on_res = toolchain.run_test(resulting, test, ws_res);
  return make_discrimination(std::move(on_orig), std::move(on_res));
}

// ---------------------------------------------------------------------------
// JdkToolchain

struct JdkToolchain::Invocation {
  ProcessResult process;
};

namespace {

fs::path from_java_home(const char* tool) {
  const char* home = std::getenv("JAVA_HOME");
  if (home == nullptr || *home == '\0') return {};
  const fs::path p = fs::path(home) / "bin" / tool;
  return access(p.c_str(), X_OK) == 0 ? p : fs::path();
}

std::string test_relative_path(std::string_view test, const std::string& fqcn) {
  (void)test;
  std::string rel = fqcn;
  for (char& c : rel) {
    if (c == '.') c = '/';
  }
  return rel + ".java";
}

}  // namespace

JdkConfig resolve_jdk(JdkConfig cfg) {
  auto resolve = [](fs::path given, const char* tool) -> fs::path {
    if (!given.empty()) return find_executable(given.string());
    fs::path p = from_java_home(tool);
    if (p.empty()) p = find_executable(tool);
    return p;
  };
  const fs::path javac = resolve(cfg.javac, "javac");
  if (javac.empty()) {
    throw ToolchainError(ToolchainError::Kind::ToolchainUnavailable,
                         "javac not found" +
                             (cfg.javac.empty() ? std::string() : ": " + cfg.javac.string()));
  }
  fs::path java = cfg.java;
  if (java.empty()) {
    const fs::path sibling = javac.parent_path() / "java";
    java = access(sibling.c_str(), X_OK) == 0 ? sibling : resolve({}, "java");
  } else {
    java = find_executable(java.string());
  }
  if (java.empty()) {
    throw ToolchainError(ToolchainError::Kind::ToolchainUnavailable, "java runtime not found");
  }
  cfg.javac = javac;
  cfg.java = java;
  return cfg;
}

JdkToolchain::JdkToolchain(JdkConfig cfg)
    : cfg_(resolve_jdk(std::move(cfg))), slots_(std::max(1, cfg_.max_processes)) {
  const ProcessResult v =
      run_process({cfg_.javac.string(), "-version"}, fs::temp_directory_path(),
                  std::chrono::milliseconds(30'000));
  if (v.spawn_failed) {
    throw ToolchainError(ToolchainError::Kind::ToolchainUnavailable,
                         "cannot execute " + cfg_.javac.string());
  }
  version_ = v.output;
  while (!version_.empty() && (version_.back() == '\n' || version_.back() == '\r')) {
    version_.pop_back();
  }
}

std::string JdkToolchain::classpath(const fs::path& classes) const {
  std::string cp = classes.string();
  for (const std::string& entry : cfg_.junit_classpath) {
    if (entry.empty()) continue;
    cp += ':';
    cp += entry;
  }
  return cp;
}

JdkToolchain::Invocation JdkToolchain::invoke(const std::vector<std::string>& argv,
                                              const Workspace& ws,
                                              std::chrono::milliseconds timeout) {
  slots_.acquire();
  Invocation inv;
  try {
    inv.process = run_process(argv, ws.path(), timeout);
  } catch (...) {
    slots_.release();
    throw;
  }
  slots_.release();
  if (inv.process.spawn_failed) {
    throw ToolchainError(ToolchainError::Kind::ToolchainUnavailable,
                         "cannot execute " + argv.front() + ": " + inv.process.output);
  }
  if (cfg_.log_dir) {
    std::lock_guard lock(log_mu_);
    std::error_code ec;
    fs::create_directories(*cfg_.log_dir, ec);
    std::ofstream log(*cfg_.log_dir / (ws.tag() + ".log"), std::ios::app);
    log << "$";
    for (const std::string& a : argv) log << ' ' << a;
    log << "\n[exit " << inv.process.exit_code << (inv.process.timed_out ? ", timeout" : "")
        << ", " << inv.process.elapsed.count() << " ms]\n"
        << inv.process.output << "\n";
  }
  return inv;
}

CompileResult JdkToolchain::compile(const SourceSet& src, const Workspace& ws) {
  if (src.empty()) {
    throw ToolchainError(ToolchainError::Kind::WorkspaceCreationFailed,
                         "compile: empty source set for " + ws.tag());
  }
  const fs::path src_dir = ws.path() / "src";
  const fs::path classes = ws.path() / "classes";
  try {
    write_source_tree(src, src_dir);
    fs::create_directories(classes);
  } catch (const std::exception& e) {
    throw ToolchainError(ToolchainError::Kind::WorkspaceCreationFailed, e.what());
  }
  std::vector<std::string> argv = {cfg_.javac.string(), "-encoding", "UTF-8", "-nowarn",
                                   "-d", classes.string(), "-cp", classpath(classes)};
  for (const SourceFile& f : src.files) argv.push_back((src_dir / f.path).string());
  const Invocation inv = invoke(argv, ws, cfg_.compile_timeout);
  CompileResult r;
  r.success = !inv.process.timed_out && inv.process.exit_code == 0;
  r.diagnostics = inv.process.output;
  if (inv.process.timed_out) r.diagnostics += "\n[compiler timed out]";
  r.elapsed = inv.process.elapsed;
  return r;
}

TestRunResult JdkToolchain::run_test(const SourceSet& program, std::string_view test,
                                     const Workspace& ws) {
  TestRunResult r;
  const std::optional<std::string> fqcn = test_class_name(test);
  if (!fqcn) {
    r.outcome = TestOutcome::DidNotCompile;
    r.runner_output = "test must declare exactly one public top-level class";
    return r;
  }
  SourceSet combined = program;
  const std::string test_path = "__test__/" + test_relative_path(test, *fqcn);
  combined.files.push_back({test_path, std::string(test)});
  const CompileResult compiled = compile(combined, ws);
  r.elapsed = compiled.elapsed;
  if (!compiled.success) {
    r.outcome = TestOutcome::DidNotCompile;
    r.runner_output = compiled.diagnostics;
    return r;
  }
  const fs::path classes = ws.path() / "classes";
  const Invocation inv =
      invoke({cfg_.java.string(), "-cp", classpath(classes), cfg_.runner_class, *fqcn},
             ws, cfg_.timeout);
  r.elapsed += inv.process.elapsed;
  r.runner_output = inv.process.output;
  if (inv.process.timed_out) {
    r.outcome = TestOutcome::Timeout;
  } else if (inv.process.exit_code == 0 &&
             inv.process.output.find("OK (") != std::string::npos) {
    r.outcome = TestOutcome::Pass;
  } else if (inv.process.output.find("FAILURES!!!") != std::string::npos) {
    r.outcome = TestOutcome::Fail;
  } else {
    r.outcome = TestOutcome::Error;
  }
  return r;
}

// ---------------------------------------------------------------------------
// MockToolchain

MockToolchain::MockToolchain(Fallback fallback, std::string version)
    : fallback_(fallback), version_(std::move(version)) {}

std::string MockToolchain::compile_key(const SourceSet& src) { return src.content_hash(); }

std::string MockToolchain::test_key(const SourceSet& program, std::string_view test) {
  return program.content_hash() + ":" + sha256_hex(test);
}

void MockToolchain::script_compile(const SourceSet& src, CompileResult result) {
  std::lock_guard lock(mu_);
  compile_table_[compile_key(src)] = std::move(result);
}

void MockToolchain::script_test(const SourceSet& program, std::string_view test,
                                TestRunResult result) {
  std::lock_guard lock(mu_);
  test_table_[test_key(program, test)] = std::move(result);
}

CompileResult MockToolchain::compile(const SourceSet& src, const Workspace& ws) {
  if (src.empty()) {
    throw ToolchainError(ToolchainError::Kind::WorkspaceCreationFailed,
                         "compile: empty source set for " + ws.tag());
  }
  write_source_tree(src, ws.path() / "src");
  std::lock_guard lock(mu_);
  ++compile_calls_;
  if (auto it = compile_table_.find(compile_key(src)); it != compile_table_.end()) {
    return it->second;
  }
  if (fallback_ == Fallback::CompileOkTestPass) return CompileResult{true, "", {}};
  throw ToolchainError(ToolchainError::Kind::ToolchainUnavailable,
                       "mock toolchain has no compile script for " + ws.tag());
}

TestRunResult MockToolchain::run_test(const SourceSet& program, std::string_view test,
                                      const Workspace& ws) {
  write_source_tree(program, ws.path() / "src");
  write_file(ws.path() / "test" / "Test.java", test);
  std::lock_guard lock(mu_);
  ++test_calls_;
  if (auto it = test_table_.find(test_key(program, test)); it != test_table_.end()) {
    return it->second;
  }
  if (!test_class_name(test)) {
    return TestRunResult{TestOutcome::DidNotCompile,
                         "test must declare exactly one public top-level class", {}};
  }
  if (fallback_ == Fallback::CompileOkTestPass) {
    return TestRunResult{TestOutcome::Pass, "OK (1 test)", {}};
  }
  throw ToolchainError(ToolchainError::Kind::ToolchainUnavailable,
                       "mock toolchain has no test script for " + ws.tag());
}

int MockToolchain::compile_calls() const {
  std::lock_guard lock(mu_);
  return compile_calls_;
}

int MockToolchain::test_calls() const {
  std::lock_guard lock(mu_);
  return test_calls_;
}

std::unique_ptr<MockToolchain> MockToolchain::from_json(const json& doc) {
  const std::string fallback = doc.value("fallback", "strict");
  auto mock = std::make_unique<MockToolchain>(
      fallback == "ok" ? Fallback::CompileOkTestPass : Fallback::Strict,
      doc.value("version", "mock-toolchain"));
  if (doc.contains("compile")) {
    for (const auto& [key, v] : doc.at("compile").items()) {
      mock->compile_table_[key] =
          CompileResult{v.value("success", false), v.value("diagnostics", ""), {}};
    }
  }
  if (doc.contains("test")) {
    for (const auto& [key, v] : doc.at("test").items()) {
      mock->test_table_[key] =
          TestRunResult{test_outcome_from_string(v.value("outcome", "ERROR")),
                        v.value("output", ""), {}};
    }
  }
  return mock;
}

}  // namespace reforacle::exec
