#include <gtest/gtest.h>

#include "reforacle/pipeline.hpp"
#include "reforacle/process.hpp"
#include "support.hpp"

namespace reforacle {
namespace {

namespace fs = std::filesystem;
using namespace std::chrono_literals;
using testing::TempDir;

ProcessResult cli(const std::vector<std::string>& args, const fs::path& cwd) {
  std::vector<std::string> argv = {testing::cli_path().string()};
  argv.insert(argv.end(), args.begin(), args.end());
  return run_process(argv, cwd, 60s);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus_ = testing::small_corpus(dir_ / "corpus", 10).string();
    const BugCorpus c = load_corpus(corpus_);
    nlohmann::json backends = {{"backends", {nlohmann::json::object()}}};
    const BackendConfig mock = testing::scripted_mock(c, 2);
    backends["backends"][0] = {{"name", mock.name},
                               {"endpoint", "mock"},
                               {"mock_responses", mock.mock_responses},
                               {"price", {{"input_per_mtok", 1.0}, {"output_per_mtok", 2.0}}}};
    config_ = (dir_ / "backends.json").string();
    write_file(config_, backends.dump(2));

    // Scripted toolchain confirming every ground-truth label.
    nlohmann::json tc = {{"fallback", "strict"}, {"compile", nlohmann::json::object()},
                         {"test", nlohmann::json::object()}};
    for (const BugInstance& inst : c.instances()) {
      tc["compile"][exec::MockToolchain::compile_key(inst.original)] = {{"success", true}};
      tc["compile"][exec::MockToolchain::compile_key(inst.resulting)] = {
          {"success", inst.label != Label::CE}, {"diagnostics", "error: scripted"}};
      if (inst.exposing_test) {
        tc["test"][exec::MockToolchain::test_key(inst.original, *inst.exposing_test)] = {{"outcome", "PASS"}};
        tc["test"][exec::MockToolchain::test_key(inst.resulting, *inst.exposing_test)] = {{"outcome", "FAIL"}};
      }
    }
    toolchain_ = (dir_ / "toolchain.json").string();
    write_file(toolchain_, tc.dump());
  }

  TempDir dir_;
  std::string corpus_;
  std::string config_;
  std::string toolchain_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(cli({"--help"}, dir_.path()).exit_code, 0);
  EXPECT_NE(cli({}, dir_.path()).exit_code, 0);
  EXPECT_NE(cli({"run", "--corpus", corpus_}, dir_.path()).exit_code, 0);
}

TEST_F(CliTest, ValidateConfirmsOrQuarantines) {
  const ProcessResult ok = cli({"validate", "--corpus", corpus_, "--mock-toolchain", toolchain_,
                                "--out", (dir_ / "val").string()},
                               dir_.path());
  EXPECT_EQ(ok.exit_code, 0) << ok.output;
  EXPECT_NE(ok.output.find("10/10 instances confirmed"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "val" / "validation.jsonl"));

  write_file(dir_ / "lenient.json", R"({"fallback": "ok"})");
  const ProcessResult bad = cli({"validate", "--corpus", corpus_, "--mock-toolchain",
                                 (dir_ / "lenient.json").string()},
                                dir_.path());
  EXPECT_EQ(bad.exit_code, 3) << bad.output;
  EXPECT_NE(bad.output.find("quarantined: p02"), std::string::npos);
}

TEST_F(CliTest, RecordReplaySummarize) {
  const std::string store = (dir_ / "store.jsonl").string();
  const ProcessResult rec = cli({"run", "--corpus", corpus_, "--config", config_, "--attempts", "2",
                                 "--record", store, "--out", (dir_ / "live").string(),
                                 "--mock-toolchain", toolchain_},
                                dir_.path());
  ASSERT_EQ(rec.exit_code, 0) << rec.output;
  EXPECT_NE(rec.output.find("20 new"), std::string::npos);

  const ProcessResult rep = cli({"run", "--corpus", corpus_, "--backend", "mock-model", "--attempts",
                                 "2", "--replay", store, "--out", (dir_ / "replay").string(),
                                 "--jobs", "4", "--mock-toolchain", toolchain_},
                                dir_.path());
  ASSERT_EQ(rep.exit_code, 0) << rep.output;
  EXPECT_EQ(testing::without_timestamps(read_file(dir_ / "live" / "outcomes.jsonl")),
            testing::without_timestamps(read_file(dir_ / "replay" / "outcomes.jsonl")));

  const std::string outcomes = (dir_ / "replay" / "outcomes.jsonl").string();
  EXPECT_EQ(cli({"metrics", "--outcomes", outcomes, "--out", (dir_ / "m").string()}, dir_.path()).exit_code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "m" / "metrics.json"));
  EXPECT_EQ(cli({"stats", "--outcomes", outcomes, "--out", (dir_ / "s").string()}, dir_.path()).exit_code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "s" / "stats.json"));
  const ProcessResult sum = cli({"summarize", "--outcomes", outcomes, "--out", (dir_ / "t").string()}, dir_.path());
  EXPECT_EQ(sum.exit_code, 0) << sum.output;
  EXPECT_TRUE(fs::exists(dir_ / "t" / "accuracy.csv"));
}

TEST_F(CliTest, ReplayMissExitsWithOne) {
  write_file(dir_ / "empty.jsonl", "");
  const ProcessResult r = cli({"run", "--corpus", corpus_, "--backend", "someone", "--replay",
                               (dir_ / "empty.jsonl").string(), "--out", (dir_ / "o").string(),
                               "--mock-toolchain", toolchain_},
                              dir_.path());
  EXPECT_EQ(r.exit_code, 1) << r.output;
  EXPECT_NE(r.output.find("someone|p01"), std::string::npos);
}

TEST_F(CliTest, ConfigErrorsExitWithTwo) {
  const ProcessResult unknown = cli({"run", "--corpus", corpus_, "--config", config_, "--backend",
                                     "nope", "--out", (dir_ / "o").string()},
                                    dir_.path());
  EXPECT_EQ(unknown.exit_code, 2);
  const ProcessResult meta = cli({"run", "--corpus", corpus_, "--config", config_, "--mode",
                                  "metamorphic", "--out", (dir_ / "o").string()},
                                 dir_.path());
  EXPECT_EQ(meta.exit_code, 2);
  const ProcessResult missing = cli({"run", "--corpus", (dir_ / "nowhere").string(), "--config",
                                     config_, "--out", (dir_ / "o").string()},
                                    dir_.path());
  EXPECT_EQ(missing.exit_code, 2);
}

TEST_F(CliTest, MetamorphWritesVariants) {
  const ProcessResult r = cli({"metamorph", "--corpus", corpus_, "--seed", "17", "--out",
                               (dir_ / "mt").string()},
                              dir_.path());
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(r.output.rfind("operator,count\n", 0), 0u);
  int total = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "mt" / "variants" / "17")) {
    EXPECT_TRUE(fs::exists(e.path() / "manifest"));
    ++total;
  }
  EXPECT_EQ(total, 10);
  const ProcessResult again = cli({"metamorph", "--corpus", corpus_, "--seed", "17", "--out",
                                   (dir_ / "mt2").string()},
                                  dir_.path());
  EXPECT_EQ(again.output, r.output);
  EXPECT_EQ(read_source_tree(dir_ / "mt" / "variants" / "17" / "p03" / "original"),
            read_source_tree(dir_ / "mt2" / "variants" / "17" / "p03" / "original"));
}

TEST_F(CliTest, ImportThenReplay) {
  std::string pasted;
  for (int i = 1; i <= 10; ++i) {
    char id[8];
    std::snprintf(id, sizeof id, "p%02d", i);
    pasted += nlohmann::json{{"instance_id", id}, {"attempt", 1}, {"text", "{\"verdict\": \"YES\", \"explanation\": \"ok\", \"junit_test\": null}"}}.dump() + "\n";
  }
  write_file(dir_ / "pasted.jsonl", pasted);
  const std::string store = (dir_ / "chat.jsonl").string();
  const ProcessResult imp = cli({"import", "--corpus", corpus_, "--backend", "web-chat", "--input",
                                 (dir_ / "pasted.jsonl").string(), "--record", store},
                                dir_.path());
  ASSERT_EQ(imp.exit_code, 0) << imp.output;
  EXPECT_NE(imp.output.find("10 responses imported"), std::string::npos);
  const ProcessResult run = cli({"run", "--corpus", corpus_, "--backend", "web-chat", "--replay",
                                 store, "--out", (dir_ / "w").string(), "--mock-toolchain", toolchain_},
                                dir_.path());
  EXPECT_EQ(run.exit_code, 0) << run.output;
}

}  // namespace
}  // namespace reforacle
