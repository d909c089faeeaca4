#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "reforacle/dataset.hpp"
#include "reforacle/java_executor.hpp"
#include "reforacle/metamorph.hpp"
#include "reforacle/pipeline.hpp"
#include "reforacle/summary.hpp"

namespace fs = std::filesystem;
using namespace reforacle;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitQuarantined = 3;

struct ToolchainOptions {
  std::string mock_file;
  std::string compiler;
  std::string java;
  std::string junit_cp;
  double timeout_s = 30.0;
  int processes = 4;
  bool required = false;
};

void add_toolchain_options(CLI::App* app, ToolchainOptions& o) {
  app->add_option("--compiler", o.compiler, "Path to javac");
  app->add_option("--java", o.java, "Path to java (default: next to javac)");
  app->add_option("--junit-cp", o.junit_cp,
                  "JUnit 4 class path (default: $REFORACLE_JUNIT_CP)");
  app->add_option("--timeout", o.timeout_s, "Per test run timeout in seconds");
  app->add_option("--mock-toolchain", o.mock_file, "Scripted toolchain results (JSON)");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

/// Returns nullptr when no toolchain is available and none was demanded.
std::unique_ptr<exec::JavaToolchain> make_toolchain(const ToolchainOptions& o) {
  if (!o.mock_file.empty()) {
    std::ifstream in(o.mock_file);
    if (!in) throw std::runtime_error("cannot read " + o.mock_file);
    return exec::MockToolchain::from_json(nlohmann::json::parse(in));
  }
  exec::JdkConfig cfg;
  cfg.javac = o.compiler;
  cfg.java = o.java;
  std::string cp = o.junit_cp;
  if (cp.empty()) {
    if (const char* env = std::getenv("REFORACLE_JUNIT_CP")) cp = env;
  }
  cfg.junit_classpath = split(cp, ':');
  cfg.timeout = std::chrono::milliseconds(static_cast<long>(o.timeout_s * 1000));
  cfg.max_processes = o.processes;
  try {
    return std::make_unique<exec::JdkToolchain>(exec::resolve_jdk(cfg));
  } catch (const exec::ToolchainError& e) {
    if (o.required || !o.compiler.empty()) throw;
    std::cerr << "warning: " << e.what() << "; behavior-change claims will be inconclusive\n";
    return nullptr;
  }
}

std::vector<BackendConfig> select_backends(const std::string& config_file,
                                           const std::vector<std::string>& names,
                                           bool replaying) {
  std::vector<BackendConfig> known;
  if (!config_file.empty()) known = load_backend_configs(config_file);
  std::vector<BackendConfig> out;
  if (names.empty()) {
    if (known.empty()) throw std::invalid_argument("no --backend given");
    return known;
  }
  for (const std::string& name : names) {
    auto it = std::find_if(known.begin(), known.end(),
                           [&](const BackendConfig& b) { return b.name == name; });
    if (it != known.end()) {
      out.push_back(*it);
      continue;
    }
    BackendConfig b;
    b.name = name;
    if (replaying) {
      b.endpoint = "replay";
    } else if (name == "mock") {
      b.endpoint = "mock";
    } else {
      throw std::invalid_argument("backend '" + name + "' not found in --config");
    }
    out.push_back(b);
  }
  return out;
}

std::vector<std::optional<double>> parse_temperatures(const std::string& text) {
  std::vector<std::optional<double>> out;
  for (const std::string& part : split(text, ',')) {
    std::size_t used = 0;
    const double t = std::stod(part, &used);
    if (used != part.size()) throw std::invalid_argument("bad temperature '" + part + "'");
    out.push_back(t);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark LLMs as oracles for refactoring-engine bugs"};
  app.require_subcommand(1);

  // Shared run configuration.
  std::string corpus;
  std::string config_file;
  std::vector<std::string> backend_names;
  int attempts = 1;
  std::string temperatures;
  std::string mode = "full-source";
  std::optional<std::uint64_t> seed;
  std::string replay;
  std::string record;
  std::string out_dir;
  int jobs = 1;
  std::string full_template;
  std::string diff_template;
  ToolchainOptions tc;

  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("--corpus", corpus, "Dataset root")->required();
    sub->add_option("--config", config_file, "Backend configuration (JSON)");
    sub->add_option("--backend", backend_names, "Backend name (repeatable)");
    sub->add_option("--mode", mode, "full-source | diff | preserving | metamorphic")
        ->check(CLI::IsMember({"full-source", "full", "diff", "preserving", "metamorphic"}));
    sub->add_option("--seed", seed, "Master seed for metamorphic variants");
    sub->add_option("--template", full_template, "Full-source prompt template file");
    sub->add_option("--diff-template", diff_template, "Diff prompt template file");
  };

  CLI::App* validate = app.add_subcommand("validate", "Confirm ground truth by compiling and testing");
  validate->add_option("--corpus", corpus, "Dataset root")->required();
  validate->add_option("--out", out_dir, "Directory for validation.jsonl");
  add_toolchain_options(validate, tc);

  CLI::App* run = app.add_subcommand("run", "Query backends and assess their answers");
  add_run_options(run);
  run->add_option("--attempts", attempts, "Attempts per instance")->check(CLI::PositiveNumber);
  run->add_option("--temperature", temperatures, "Temperature sweep T[,T...]");
  run->add_option("--replay", replay, "Answer every call from this transcript store");
  run->add_option("--record", record, "Record live responses into this store");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--jobs", jobs, "Parallel workers")->check(CLI::PositiveNumber);
  add_toolchain_options(run, tc);

  std::uint64_t mt_seed = 0;
  CLI::App* metamorph = app.add_subcommand("metamorph", "Write semantics-preserving variants");
  metamorph->add_option("--corpus", corpus, "Dataset root")->required();
  metamorph->add_option("--seed", mt_seed, "Master seed")->required();
  metamorph->add_option("--out", out_dir, "Output root")->required();

  std::string outcomes;
  double confidence = 0.95;
  CLI::App* metrics = app.add_subcommand("metrics", "Compute multi-attempt metrics");
  metrics->add_option("--outcomes", outcomes, "outcomes.jsonl")->required();
  metrics->add_option("--out", out_dir, "Output directory")->required();
  CLI::App* stats = app.add_subcommand("stats", "Confidence intervals and significance tests");
  stats->add_option("--outcomes", outcomes, "outcomes.jsonl")->required();
  stats->add_option("--out", out_dir, "Output directory")->required();
  stats->add_option("--confidence", confidence, "Interval confidence")->check(CLI::Range(0.5, 0.9999));
  CLI::App* summarize_cmd = app.add_subcommand("summarize", "Write summary CSV tables");
  summarize_cmd->add_option("--outcomes", outcomes, "outcomes.jsonl")->required();
  summarize_cmd->add_option("--out", out_dir, "Output directory")->required();

  std::string pasted;
  bool overwrite = false;
  CLI::App* import_cmd = app.add_subcommand("import", "Store responses pasted from a chat interface");
  add_run_options(import_cmd);
  import_cmd->add_option("--input", pasted, "JSON lines: instance_id, attempt, text")->required();
  import_cmd->add_option("--record", record, "Transcript store to write")->required();
  import_cmd->add_flag("--overwrite", overwrite, "Replace existing records");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      tc.required = true;
      const BugCorpus c = load_corpus(corpus);
      auto toolchain = make_toolchain(tc);
      std::unique_ptr<std::ofstream> sink;
      if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        sink = std::make_unique<std::ofstream>(fs::path(out_dir) / "validation.jsonl");
      }
      int quarantined = 0;
      for (const BugInstance& inst : c.instances()) {
        const ValidationReport r = validate_instance(inst, *toolchain);
        if (r.quarantined) {
          ++quarantined;
          std::cerr << "quarantined: " << inst.id << "\n";
        }
        if (sink) *sink << to_json(r).dump() << '\n';
      }
      std::cout << c.instances().size() - quarantined << "/" << c.instances().size()
                << " instances confirmed\n";
      return quarantined == 0 ? 0 : kExitQuarantined;
    }

    if (*metamorph) {
      const BugCorpus c = load_corpus(corpus);
      const BugCorpus base = filter_corpus(
          c, [](Label l, Tool, const std::string&) { return l != Label::Preserving; });
      const mt::CorpusTransform t = mt::transform_corpus(base, mt_seed);
      for (const mt::MetamorphicVariant& v : t.variants) {
        mt::write_variant(v, *base.find(v.base_instance_id), out_dir);
      }
      std::cout << "operator,count\n";
      for (mt::OperatorId op : mt::kAllOperators) {
        auto it = t.operator_counts.find(op);
        std::cout << mt::to_string(op) << ',' << (it == t.operator_counts.end() ? 0 : it->second)
                  << '\n';
      }
      for (const std::string& id : t.unchanged) std::cerr << "unchanged: " << id << "\n";
      return 0;
    }

    if (*metrics) {
      std::cout << write_metrics(load_outcomes(outcomes), out_dir).string() << "\n";
      return 0;
    }
    if (*stats) {
      std::cout << write_stats(load_outcomes(outcomes), out_dir, confidence).string() << "\n";
      return 0;
    }
    if (*summarize_cmd) {
      const SummaryTables t = summarize_file(outcomes, out_dir);
      for (const std::string& w : t.warnings) std::cerr << "warning: " << w << "\n";
      for (const fs::path& f : t.files) std::cout << f.string() << "\n";
      return 0;
    }

    RunConfig cfg;
    cfg.corpus_root = corpus;
    cfg.mode = *run_mode_from_string(mode);
    cfg.master_seed = seed;
    cfg.out_dir = out_dir;
    if (!full_template.empty()) cfg.full_template = load_template(PromptKind::FullSource, full_template);
    if (!diff_template.empty()) cfg.diff_template = load_template(PromptKind::DiffOnly, diff_template);

    if (*import_cmd) {
      const auto backends = select_backends(config_file, backend_names, true);
      if (backends.size() != 1) throw std::invalid_argument("import needs exactly one --backend");
      TranscriptStore store = TranscriptStore::open(record);
      const std::size_t n = import_responses(cfg, backends.front(), pasted, store, overwrite);
      std::cout << n << " responses imported\n";
      return 0;
    }

    cfg.backends = select_backends(config_file, backend_names, !replay.empty());
    cfg.attempts = attempts;
    cfg.temperatures = parse_temperatures(temperatures);
    cfg.jobs = jobs;
    if (!replay.empty()) cfg.replay_path = replay;
    if (!record.empty()) cfg.record_path = record;
    auto toolchain = make_toolchain(tc);
    cfg.toolchain = toolchain.get();
    const RunArtifacts art = run_benchmark(cfg);
    for (const std::string& w : art.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "outcomes:  " << art.outcomes_path.string() << " (" << art.executed << " new, "
              << art.skipped << " resumed, " << art.call_failures << " failed calls)\n"
              << "metrics:   " << art.metrics_path.string() << "\n"
              << "stats:     " << art.stats_path.string() << "\n"
              << "telemetry: " << art.telemetry_path.string() << "\n";
    return 0;
  } catch (const PipelineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == PipelineError::Kind::ReplayMiss ? 1 : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
