#include "reforacle/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "reforacle/analytics.hpp"
#include "reforacle/stats.hpp"
#include "reforacle/unified_diff.hpp"
#include "reforacle/verdict_parser.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace reforacle {

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::FullSource: return "full-source";
    case RunMode::DiffOnly: return "diff";
    case RunMode::Preserving: return "preserving";
    case RunMode::Metamorphic: return "metamorphic";
  }
  return "full-source";
}

std::optional<RunMode> run_mode_from_string(std::string_view text) {
  if (text == "full-source" || text == "full") return RunMode::FullSource;
  if (text == "diff") return RunMode::DiffOnly;
  if (text == "preserving") return RunMode::Preserving;
  if (text == "metamorphic") return RunMode::Metamorphic;
  return std::nullopt;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw PipelineError(PipelineError::Kind::Config, msg); };
  if (attempts < 1) fail("attempts must be >= 1");
  if (jobs < 1) fail("jobs must be >= 1");
  if (backends.empty()) fail("no backend configured");
  if (mode == RunMode::Metamorphic && !master_seed) fail("metamorphic mode requires a seed");
  if (out_dir.empty()) fail("no output directory");
  for (const auto& t : temperatures) {
    if (t && !(*t >= 0.0 && *t <= 1.0)) fail("temperature outside [0, 1]");
  }
  for (const BackendConfig& b : backends) {
    try {
      b.validate();
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    if (b.endpoint == "replay" && !replay_path) fail("backend " + b.name + " replays but no --replay store given");
  }
  if (full_template && full_template->kind != PromptKind::FullSource) fail("full-source template has wrong kind");
  if (diff_template && diff_template->kind != PromptKind::DiffOnly) fail("diff template has wrong kind");
}

// ---------------------------------------------------------------------------

exec::CompileResult UnavailableToolchain::compile(const SourceSet&, const exec::Workspace&) {
  throw exec::ToolchainError(exec::ToolchainError::Kind::ToolchainUnavailable, reason_);
}

exec::TestRunResult UnavailableToolchain::run_test(const SourceSet&, std::string_view,
                                                   const exec::Workspace&) {
  throw exec::ToolchainError(exec::ToolchainError::Kind::ToolchainUnavailable, reason_);
}

// ---------------------------------------------------------------------------

std::vector<PromptJob> plan_prompts(const RunConfig& cfg, const BugCorpus& corpus,
                                    std::vector<std::string>* warnings) {
  const PromptTemplate& full =
      cfg.full_template ? *cfg.full_template : builtin_template(PromptKind::FullSource);
  const PromptTemplate& diff =
      cfg.diff_template ? *cfg.diff_template : builtin_template(PromptKind::DiffOnly);
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };

  std::vector<PromptJob> jobs;
  auto add = [&](BugInstance inst, std::optional<std::string> variant_tag,
                 std::optional<std::uint64_t> seed) {
    try {
      RenderedPrompt p;
      if (cfg.mode == RunMode::DiffOnly) {
        const std::string payload = inst.diff ? *inst.diff : unified_diff(inst.original, inst.resulting);
        p = render_diff_prompt(payload, diff);
      } else {
        p = render_full_prompt(inst.original.joined(), inst.resulting.joined(), full);
      }
      p.instance_id = inst.id;
      p.variant_tag = std::move(variant_tag);
      jobs.push_back({std::move(inst), std::move(p), seed});
    } catch (const PromptError& e) {
      warn("instance " + inst.id + " skipped: " + e.what());
    }
  };

  switch (cfg.mode) {
    case RunMode::FullSource:
      for (const BugInstance& inst : corpus.instances()) {
        if (inst.label != Label::Preserving) add(inst, std::nullopt, std::nullopt);
      }
      break;
    case RunMode::Preserving:
      for (const BugInstance& inst : corpus.instances()) {
        if (inst.label == Label::Preserving) add(inst, std::nullopt, std::nullopt);
      }
      break;
    case RunMode::DiffOnly:
      for (const BugInstance& inst : corpus.instances()) add(inst, std::nullopt, std::nullopt);
      break;
    case RunMode::Metamorphic: {
      const BugCorpus base = filter_corpus(
          corpus, [](Label l, Tool, const std::string&) { return l != Label::Preserving; });
      const mt::CorpusTransform t = mt::transform_corpus(base, *cfg.master_seed);
      for (const std::string& id : t.unchanged) warn("no operator applies to instance " + id);
      for (const mt::MetamorphicVariant& v : t.variants) {
        const BugInstance* inst = base.find(v.base_instance_id);
        mt::write_variant(v, *inst, cfg.out_dir);
        add(mt::variant_instance(v, *inst), v.variant_tag(), cfg.master_seed);
      }
      break;
    }
  }
  return jobs;
}

// ---------------------------------------------------------------------------

std::vector<AssessmentOutcome> load_outcomes(const fs::path& path) {
  std::vector<AssessmentOutcome> out;
  std::map<std::string, std::size_t> index;
  std::ifstream in(path);
  if (!in) {
    throw PipelineError(PipelineError::Kind::SchemaMismatch, "cannot read " + path.string());
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    AssessmentOutcome o;
    try {
      o = outcome_from_json(json::parse(line));
    } catch (const std::exception& e) {
      throw PipelineError(PipelineError::Kind::SchemaMismatch,
                          path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    const std::string key = o.key();
    if (auto it = index.find(key); it != index.end()) {
      out[it->second] = std::move(o);
    } else {
      index.emplace(key, out.size());
      out.push_back(std::move(o));
    }
  }
  return out;
}

namespace {

std::string sanitize(std::string_view name) {
  std::string out;
  for (char c : name) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_' ||
            c == '@' || c == '=')
               ? c
               : '_';
  }
  return out;
}

// Metamorphic tags "mt:<seed>:<OP>" collapse to their run family "mt:<seed>".
std::string variant_family(const std::string& tag) {
  if (!tag.starts_with("mt:")) return tag;
  return tag.substr(0, tag.rfind(':'));
}

struct Group {
  std::string backend;
  std::string family;
  std::string label() const { return family.empty() ? backend : backend + "[" + family + "]"; }
};

std::vector<std::pair<Group, std::vector<AssessmentOutcome>>> group_outcomes(
    const std::vector<AssessmentOutcome>& outcomes) {
  std::vector<std::pair<Group, std::vector<AssessmentOutcome>>> groups;
  std::map<std::pair<std::string, std::string>, std::size_t> at;
  for (AssessmentOutcome o : outcomes) {
    o.variant_tag = variant_family(o.variant_tag);
    const auto key = std::make_pair(o.backend_name, o.variant_tag);
    auto [it, inserted] = at.emplace(key, groups.size());
    if (inserted) groups.push_back({Group{o.backend_name, o.variant_tag}, {}});
    groups[it->second].second.push_back(std::move(o));
  }
  return groups;
}

}  // namespace

fs::path write_metrics(const std::vector<AssessmentOutcome>& outcomes, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  json runs = json::array();
  for (const auto& [group, members] : group_outcomes(outcomes)) {
    const analytics::RunMatrix m = analytics::build_matrix(members, group.backend, group.family);
    json entry;
    try {
      const analytics::MetricReport r = analytics::compute_report(m);
      entry = r.to_json();
      write_file(out_dir / ("metrics_" + sanitize(group.label()) + ".csv"), r.to_csv());
    } catch (const analytics::MetricError& e) {
      entry = {{"backend", group.backend}, {"error", e.what()}};
    }
    entry["variant"] = group.family;
    runs.push_back(entry);
  }
  const fs::path path = out_dir / "metrics.json";
  write_file(path, json{{"runs", runs}}.dump(2) + "\n");
  return path;
}

fs::path write_stats(const std::vector<AssessmentOutcome>& outcomes, const fs::path& out_dir,
                     double confidence) {
  fs::create_directories(out_dir);
  // First-attempt correctness per model, restricted to instances conclusive
  // for every model.
  std::vector<std::pair<std::string, std::map<std::string, bool>>> firsts;
  std::vector<std::string> order;
  std::set<std::string> seen_ids;
  for (const auto& [group, members] : group_outcomes(outcomes)) {
    std::map<std::string, bool> first;
    for (const AssessmentOutcome& o : members) {
      if (o.attempt_index != 1 || o.inconclusive) continue;
      first[o.instance_id] = o.correct;
      if (seen_ids.insert(o.instance_id).second) order.push_back(o.instance_id);
    }
    firsts.emplace_back(group.label(), std::move(first));
  }
  std::vector<std::string> common;
  for (const std::string& id : order) {
    if (std::all_of(firsts.begin(), firsts.end(),
                    [&](const auto& f) { return f.second.count(id) != 0; })) {
      common.push_back(id);
    }
  }
  std::vector<std::pair<std::string, std::vector<bool>>> models;
  std::vector<std::pair<std::string, std::set<std::string>>> solved;
  for (const auto& [name, first] : firsts) {
    std::vector<bool> v;
    std::set<std::string> s;
    for (const std::string& id : common) {
      v.push_back(first.at(id));
      if (first.at(id)) s.insert(id);
    }
    models.emplace_back(name, std::move(v));
    solved.emplace_back(name, std::move(s));
  }
  json report = stats::stats_report(models, confidence);
  report["instances"] = common.size();
  const fs::path path = out_dir / "stats.json";
  write_file(path, report.dump(2) + "\n");
  if (solved.size() <= 31) {
    write_file(out_dir / "union.json",
               analytics::union_coverage(solved, common).to_json().dump(2) + "\n");
  }
  return path;
}

// ---------------------------------------------------------------------------

RunArtifacts run_benchmark(const RunConfig& cfg) {
  cfg.validate();
  BugCorpus corpus;
  try {
    corpus = load_corpus(cfg.corpus_root);
  } catch (const CorpusError& e) {
    throw PipelineError(PipelineError::Kind::CorpusLoadFailure, e.what());
  }
  fs::create_directories(cfg.out_dir);

  RunArtifacts art;
  const std::vector<PromptJob> jobs = plan_prompts(cfg, corpus, &art.warnings);

  std::optional<TranscriptStore> replay_store;
  std::optional<TranscriptStore> record_store;
  if (cfg.replay_path) {
    if (!fs::exists(*cfg.replay_path)) {
      throw PipelineError(PipelineError::Kind::Config,
                          "replay store " + cfg.replay_path->string() + " does not exist");
    }
    replay_store.emplace(TranscriptStore::open(*cfg.replay_path));
  }
  if (cfg.record_path) record_store.emplace(TranscriptStore::open(*cfg.record_path));

  UnavailableToolchain no_jdk("no Java toolchain configured");
  exec::JavaToolchain& toolchain = cfg.toolchain ? *cfg.toolchain : no_jdk;

  // Backend configurations expanded over the temperature sweep.
  std::vector<BackendConfig> configs;
  for (const BackendConfig& b : cfg.backends) {
    if (cfg.temperatures.empty()) {
      configs.push_back(b);
      continue;
    }
    for (const auto& t : cfg.temperatures) {
      BackendConfig c = b;
      c.temperature = t;
      configs.push_back(c);
    }
  }
  std::vector<std::unique_ptr<ModelBackend>> live;
  std::vector<std::unique_ptr<ModelBackend>> wrappers;
  std::vector<ModelBackend*> backend_for;
  for (const BackendConfig& c : configs) {
    if (replay_store) {
      wrappers.push_back(std::make_unique<ReplayBackend>(*replay_store));
      backend_for.push_back(wrappers.back().get());
      continue;
    }
    live.push_back(make_backend(c));
    ModelBackend* b = live.back().get();
    if (record_store) {
      wrappers.push_back(std::make_unique<RecordingBackend>(*b, *record_store));
      b = wrappers.back().get();
    }
    backend_for.push_back(b);
  }

  art.outcomes_path = cfg.out_dir / "outcomes.jsonl";
  std::set<std::string> done;
  if (fs::exists(art.outcomes_path)) {
    for (const AssessmentOutcome& o : load_outcomes(art.outcomes_path)) {
      if (!o.call_failed) done.insert(o.key());
    }
  }

  struct Task {
    std::size_t config;
    std::size_t job;
    int attempt;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      for (int a = 1; a <= cfg.attempts; ++a) tasks.push_back({c, j, a});
    }
  }

  std::ofstream out(art.outcomes_path, std::ios::app);
  if (!out) {
    throw PipelineError(PipelineError::Kind::Config, "cannot write " + art.outcomes_path.string());
  }
  std::vector<std::optional<std::string>> slots(tasks.size());
  std::vector<char> ready(tasks.size(), 0);
  std::size_t next_commit = 0;
  std::size_t committed_new = 0;
  std::mutex commit_mu;
  std::atomic<std::size_t> next_task{0};
  std::atomic<bool> stop{false};
  std::string fatal;

  auto commit = [&](std::size_t index, std::optional<std::string> line) {
    std::lock_guard lock(commit_mu);
    slots[index] = std::move(line);
    ready[index] = 1;
    while (next_commit < tasks.size() && ready[next_commit]) {
      if (slots[next_commit]) {
        if (cfg.stop_after && committed_new >= *cfg.stop_after) {
          stop = true;
          art.interrupted = true;
          return;
        }
        out << *slots[next_commit] << '\n';
        out.flush();
        ++committed_new;
        slots[next_commit].reset();
      }
      ++next_commit;
    }
  };

  auto process = [&](const Task& t) -> std::optional<std::string> {
    const BackendConfig& bc = configs[t.config];
    const PromptJob& job = jobs[t.job];
    const RequestKey key = make_request_key(bc, job.prompt, t.attempt);
    if (done.count(key.str())) return std::nullopt;

    AssessmentOutcome o;
    std::optional<RawModelResponse> resp;
    try {
      resp = query(*backend_for[t.config], bc, job.prompt, t.attempt);
    } catch (const ModelError& e) {
      if (e.kind() == ModelError::Kind::ReplayMiss) throw;
      o.instance_id = job.instance.id;
      o.ground_truth = job.instance.label;
      o.refactoring_type = job.instance.refactoring_type;
      o.tool = std::string(to_string(job.instance.tool));
      o.inconclusive = true;
      o.call_failed = true;
      o.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
    if (resp) {
      const ParseResult parsed = parse_response(resp->text, job.prompt.kind);
      o = (cfg.mode == RunMode::Preserving || job.instance.label == Label::Preserving)
              ? assess_preserving(job.instance, parsed, &toolchain)
              : assess(job.instance, parsed, toolchain);
      attach_response(o, *resp);
    }
    o.attempt_index = t.attempt;
    o.backend_name = key.backend;
    o.variant_tag = key.variant_tag;
    o.mode = std::string(to_string(cfg.mode));
    o.prompt_hash = key.prompt_hash;
    o.template_version = job.prompt.template_version;
    if (o.toolchain_version.empty()) o.toolchain_version = toolchain.version();
    o.seed = job.seed;
    return to_json(o).dump();
  };

  auto worker = [&] {
    while (!stop) {
      const std::size_t i = next_task++;
      if (i >= tasks.size()) return;
      std::optional<std::string> line;
      try {
        line = process(tasks[i]);
      } catch (const ModelError& e) {
        std::lock_guard lock(commit_mu);
        if (fatal.empty()) fatal = e.what();
        stop = true;
        return;
      }
      if (!line) {
        std::lock_guard lock(commit_mu);
        ++art.skipped;
      } else if (line->find("\"call_failed\":true") != std::string::npos) {
        std::lock_guard lock(commit_mu);
        ++art.call_failures;
      }
      commit(i, std::move(line));
    }
  };

  const int width = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < width; ++w) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  out.close();
  art.executed = committed_new;

  if (!fatal.empty()) throw PipelineError(PipelineError::Kind::ReplayMiss, fatal);

  const std::vector<AssessmentOutcome> all = load_outcomes(art.outcomes_path);
  art.metrics_path = write_metrics(all, cfg.out_dir);
  art.stats_path = write_stats(all, cfg.out_dir);
  std::vector<RawModelResponse> calls;
  for (const AssessmentOutcome& o : all) {
    if (o.call_failed) continue;
    RawModelResponse r;
    r.latency_s = o.latency_s;
    r.tokens_in = o.tokens_in;
    r.tokens_out = o.tokens_out;
    r.tokens_reasoning = o.tokens_reasoning;
    r.cost_estimate = o.cost_estimate;
    calls.push_back(r);
  }
  art.telemetry = summarize_telemetry(calls);
  art.telemetry_path = cfg.out_dir / "telemetry.json";
  const TelemetrySummary& s = art.telemetry;
  write_file(art.telemetry_path,
             json{{"calls", s.calls},
                  {"total_latency_s", s.total_latency_s},
                  {"mean_latency_s", s.mean_latency_s},
                  {"median_latency_s", s.median_latency_s},
                  {"min_latency_s", s.min_latency_s},
                  {"max_latency_s", s.max_latency_s},
                  {"tokens_in", s.tokens_in},
                  {"tokens_out", s.tokens_out},
                  {"tokens_reasoning", s.tokens_reasoning},
                  {"cost", s.cost}}
                     .dump(2) + "\n");
  return art;
}

std::size_t import_responses(const RunConfig& cfg, const BackendConfig& backend,
                             const fs::path& pasted, TranscriptStore& store, bool overwrite) {
  BugCorpus corpus;
  try {
    corpus = load_corpus(cfg.corpus_root);
  } catch (const CorpusError& e) {
    throw PipelineError(PipelineError::Kind::CorpusLoadFailure, e.what());
  }
  const std::vector<PromptJob> jobs = plan_prompts(cfg, corpus);
  std::map<std::pair<std::string, std::string>, const PromptJob*> by_id;
  for (const PromptJob& j : jobs) {
    by_id[{j.instance.id, j.prompt.variant_tag.value_or("")}] = &j;
  }
  std::ifstream in(pasted);
  if (!in) throw PipelineError(PipelineError::Kind::Config, "cannot read " + pasted.string());
  std::size_t imported = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = pasted.string() + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw PipelineError(PipelineError::Kind::SchemaMismatch, where + ": " + e.what());
    }
    const std::string id = j.value("instance_id", "");
    auto it = by_id.find({id, j.value("variant_tag", "")});
    if (it == by_id.end()) {
      throw PipelineError(PipelineError::Kind::Config, where + ": unknown instance '" + id + "'");
    }
    const int attempt = j.value("attempt", 1);
    RawModelResponse r;
    r.text = j.at("text").get<std::string>();
    r.latency_s = j.value("latency_s", 0.0);
    r.attempt_index = attempt;
    r.backend_name = backend.effective_name();
    r.created_at = j.value("created_at", utc_timestamp());
    store.record(make_request_key(backend, it->second->prompt, attempt), r, overwrite);
    ++imported;
  }
  return imported;
}

}  // namespace reforacle
