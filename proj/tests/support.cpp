#include "support.hpp"

#include <cstdlib>
#include <sstream>
#include <unistd.h>

#include "reforacle/source_set.hpp"
#include "reforacle/verdict_parser.hpp"

namespace fs = std::filesystem;

namespace reforacle::testing {

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "reforacle-test-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path fixtures_dir() { return REFORACLE_FIXTURES; }
fs::path fixture_corpus_root() { return fixtures_dir() / "corpus"; }
BugCorpus fixture_corpus() { return load_corpus(fixture_corpus_root()); }
fs::path cli_path() { return REFORACLE_CLI; }

SourceSet single_file(const std::string& path, const std::string& content) {
  return SourceSet{{SourceFile{path, content}}};
}

namespace {

void write_script(const fs::path& p, const std::string& body) {
  write_file(p, body);
  fs::permissions(p, fs::perms::owner_all | fs::perms::group_read | fs::perms::others_read);
}

}  // namespace

FakeJdk write_fake_jdk(const fs::path& dir) {
  fs::create_directories(dir);
  FakeJdk jdk{dir / "javac", dir / "java"};
  write_script(jdk.javac, R"sh(#!/bin/sh
if [ "$1" = "-version" ]; then echo "javac 0.0-fake"; exit 0; fi
out=""
prev=""
for a in "$@"; do
  if [ "$prev" = "-d" ]; then out="$a"; fi
  prev="$a"
done
: > "$out/sources.txt"
for a in "$@"; do
  case "$a" in
    *.java)
      if grep -q SYNTAX_ERROR "$a"; then echo "$a:1: error: fake syntax error"; exit 1; fi
      cat "$a" >> "$out/sources.txt";;
  esac
done
exit 0
)sh");
  write_script(jdk.java, R"sh(#!/bin/sh
cp="$2"
classes="${cp%%:*}"
src="$classes/sources.txt"
if grep -q RESULT_HANG "$src"; then sleep 30; fi
if grep -q RESULT_FAIL "$src"; then
  echo "There was 1 failure:"
  echo "FAILURES!!!"
  echo "Tests run: 1,  Failures: 1"
  exit 1
fi
if grep -q RESULT_ERROR "$src"; then echo "Could not find class: $4"; exit 1; fi
echo "OK (1 test)"
exit 0
)sh");
  return jdk;
}

fs::path small_corpus(const fs::path& dir, int n) {
  const BugCorpus corpus = fixture_corpus();
  fs::create_directories(dir / "instances");
  for (int i = 0; i < n && i < static_cast<int>(corpus.instances().size()); ++i) {
    const std::string& id = corpus.instances()[i].id;
    fs::copy(fixture_corpus_root() / "instances" / id, dir / "instances" / id,
             fs::copy_options::recursive);
  }
  return dir;
}

BackendConfig scripted_mock(const BugCorpus& corpus, int attempts, const std::string& name) {
  BackendConfig cfg;
  cfg.name = name;
  cfg.endpoint = "mock";
  int i = 0;
  for (const BugInstance& inst : corpus.instances()) {
    for (int a = 1; a <= attempts; ++a, ++i) {
      ModelVerdict v;
      v.explanation = "Answer " + std::to_string(a) + " for " + inst.id + ".";
      if (inst.label == Label::CE) {
        v.category = i % 4 == 3 ? Verdict::Yes : Verdict::NoCompilationError;
      } else if (i % 3 == 0) {
        v.category = Verdict::Yes;
      } else {
        v.category = Verdict::NoBehaviorChange;
        v.junit_test = inst.exposing_test;
      }
      cfg.mock_responses[inst.id + "#" + std::to_string(a)] =
          to_canonical_json(v, PromptKind::FullSource);
    }
  }
  cfg.mock_responses["*"] = "I am not sure.";
  return cfg;
}

std::unique_ptr<exec::MockToolchain> scripted_toolchain(const BugCorpus& corpus) {
  auto mock = std::make_unique<exec::MockToolchain>(exec::MockToolchain::Fallback::CompileOkTestPass);
  for (const BugInstance& inst : corpus.instances()) {
    if (!inst.exposing_test) continue;
    mock->script_test(inst.original, *inst.exposing_test,
                      exec::TestRunResult{exec::TestOutcome::Pass, "OK (1 test)", {}});
    mock->script_test(inst.resulting, *inst.exposing_test,
                      exec::TestRunResult{exec::TestOutcome::Fail, "FAILURES!!!", {}});
  }
  return mock;
}

std::string without_timestamps(const std::string& jsonl, bool drop_latency) {
  std::stringstream in(jsonl);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    j.erase("created_at");
    if (drop_latency) j.erase("latency_s");
    if (j.contains("evidence") && j["evidence"].is_object()) {
      for (auto& [k, v] : j["evidence"].items()) {
        if (v.is_object()) v.erase("elapsed_ms");
      }
    }
    out += j.dump() + "\n";
  }
  return out;
}

std::unique_ptr<exec::JdkToolchain> real_jdk() {
  const char* cp = std::getenv("REFORACLE_JUNIT_CP");
  if (cp == nullptr || *cp == '\0') return nullptr;
  exec::JdkConfig cfg;
  std::stringstream ss(cp);
  std::string entry;
  while (std::getline(ss, entry, ':')) {
    if (!entry.empty()) cfg.junit_classpath.push_back(entry);
  }
  try {
    return std::make_unique<exec::JdkToolchain>(cfg);
  } catch (const exec::ToolchainError&) {
    return nullptr;
  }
}

}  // namespace reforacle::testing
