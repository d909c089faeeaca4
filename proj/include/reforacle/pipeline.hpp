#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "reforacle/assessor.hpp"
#include "reforacle/dataset.hpp"
#include "reforacle/java_executor.hpp"
#include "reforacle/metamorph.hpp"
#include "reforacle/model_client.hpp"
#include "reforacle/prompting.hpp"

namespace reforacle {

enum class RunMode { FullSource, DiffOnly, Preserving, Metamorphic };

std::string_view to_string(RunMode mode);
std::optional<RunMode> run_mode_from_string(std::string_view text);

class PipelineError : public std::runtime_error {
 public:
  enum class Kind { Config, CorpusLoadFailure, ReplayMiss, SchemaMismatch };
  PipelineError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct RunConfig {
  std::filesystem::path corpus_root;
  std::vector<BackendConfig> backends;
  int attempts = 1;
  RunMode mode = RunMode::FullSource;
  std::optional<std::uint64_t> master_seed;
  /// Temperature sweep. Empty: each backend's own setting. nullopt entries
  /// mean provider default.
  std::vector<std::optional<double>> temperatures;
  std::optional<std::filesystem::path> replay_path;
  std::optional<std::filesystem::path> record_path;
  std::filesystem::path out_dir;
  int jobs = 1;
  std::optional<PromptTemplate> full_template;
  std::optional<PromptTemplate> diff_template;
  /// Used to check behavior-change claims; without one they are inconclusive.
  exec::JavaToolchain* toolchain = nullptr;
  /// Stop after this many newly committed outcomes (testing interruption).
  std::optional<std::size_t> stop_after;

  /// Throws PipelineError(Config).
  void validate() const;
};

/// One rendered prompt for one (possibly transformed) instance.
struct PromptJob {
  BugInstance instance;
  RenderedPrompt prompt;
  std::optional<std::uint64_t> seed;
};

/// Selects the instances for `cfg.mode` and renders their prompts. In
/// metamorphic mode the variants are also written below `cfg.out_dir`.
/// Instances that cannot be rendered are skipped and reported in `warnings`.
std::vector<PromptJob> plan_prompts(const RunConfig& cfg, const BugCorpus& corpus,
                                    std::vector<std::string>* warnings = nullptr);

struct RunArtifacts {
  std::filesystem::path outcomes_path;
  std::filesystem::path metrics_path;
  std::filesystem::path stats_path;
  std::filesystem::path telemetry_path;
  TelemetrySummary telemetry;
  std::size_t executed = 0;       // outcomes written by this invocation
  std::size_t skipped = 0;        // keys already present (resume)
  std::size_t call_failures = 0;  // per-call model errors
  bool interrupted = false;       // stop_after reached
  std::vector<std::string> warnings;
};

/// render -> query -> parse -> assess for every (backend, temperature,
/// instance, attempt). Outcomes are appended in a fixed task order, so the
/// file does not depend on `jobs`. Existing keys are skipped.
RunArtifacts run_benchmark(const RunConfig& cfg);

/// Reads an outcomes file; later records win for duplicate keys, order of
/// first appearance is kept. Throws PipelineError(SchemaMismatch).
std::vector<AssessmentOutcome> load_outcomes(const std::filesystem::path& path);

/// Writes metrics.json and metrics_<backend>.csv for every (backend,
/// variant) group. Returns metrics.json.
std::filesystem::path write_metrics(const std::vector<AssessmentOutcome>& outcomes,
                                    const std::filesystem::path& out_dir);

/// Writes stats.json (first-attempt Wilson CIs, pairwise McNemar with Holm,
/// Cochran's Q) and union.json. Returns stats.json.
std::filesystem::path write_stats(const std::vector<AssessmentOutcome>& outcomes,
                                  const std::filesystem::path& out_dir,
                                  double confidence = 0.95);

/// Records pasted responses (JSON lines with instance_id, attempt, text and
/// optional variant_tag/latency_s) for `backend` into `store`.
/// Returns the number of imported records.
std::size_t import_responses(const RunConfig& cfg, const BackendConfig& backend,
                             const std::filesystem::path& pasted, TranscriptStore& store,
                             bool overwrite = false);

/// Toolchain that refuses every request; stands in when no JDK is configured.
class UnavailableToolchain : public exec::JavaToolchain {
 public:
  explicit UnavailableToolchain(std::string reason) : reason_(std::move(reason)) {}
  exec::CompileResult compile(const SourceSet&, const exec::Workspace&) override;
  exec::TestRunResult run_test(const SourceSet&, std::string_view, const exec::Workspace&) override;
  std::string version() const override { return "unavailable"; }

 private:
  std::string reason_;
};

}  // namespace reforacle
