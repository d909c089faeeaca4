#include "reforacle/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "reforacle/java_lexer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace reforacle {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::map<std::string, std::string> parse_meta(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    out[trim(std::string_view(line).substr(0, eq))] = value;
  }
  return out;
}

CorpusError single(CorpusIssue::Kind kind, const fs::path& dir, std::string message) {
  return CorpusError({CorpusIssue{kind, dir, std::move(message)}});
}

}  // namespace

std::string_view to_string(Tool tool) {
  switch (tool) {
    case Tool::Eclipse: return "Eclipse";
    case Tool::NetBeans: return "NetBeans";
    case Tool::IntelliJ: return "IntelliJ";
    case Tool::Other: return "Other";
  }
  return "Other";
}

std::string_view to_string(Label label) {
  switch (label) {
    case Label::BC: return "BC";
    case Label::CE: return "CE";
    case Label::Preserving: return "PRESERVING";
  }
  return "CE";
}

Tool tool_from_string(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "eclipse") return Tool::Eclipse;
  if (t == "netbeans") return Tool::NetBeans;
  if (t == "intellij" || t == "intellij idea") return Tool::IntelliJ;
  return Tool::Other;
}

std::optional<Label> label_from_string(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "bc") return Label::BC;
  if (t == "ce") return Label::CE;
  if (t == "preserving") return Label::Preserving;
  return std::nullopt;
}

std::string_view to_string(CorpusIssue::Kind kind) {
  switch (kind) {
    case CorpusIssue::Kind::MissingMetadata: return "MissingMetadata";
    case CorpusIssue::Kind::InvalidMetadata: return "InvalidMetadata";
    case CorpusIssue::Kind::DuplicateId: return "DuplicateId";
    case CorpusIssue::Kind::MissingTestForBC: return "MissingTestForBC";
    case CorpusIssue::Kind::UnexpectedTest: return "UnexpectedTest";
    case CorpusIssue::Kind::EmptySourceSet: return "EmptySourceSet";
    case CorpusIssue::Kind::InvalidSource: return "InvalidSource";
  }
  return "?";
}

static std::string describe(const std::vector<CorpusIssue>& issues) {
  std::string msg = "corpus has " + std::to_string(issues.size()) + " malformed instance(s)";
  for (const CorpusIssue& issue : issues) {
    msg += "\n  ";
    msg += to_string(issue.kind);
    msg += ": " + issue.dir.string() + ": " + issue.message;
  }
  return msg;
}

CorpusError::CorpusError(std::vector<CorpusIssue> issues)
    : std::runtime_error(describe(issues)), issues_(std::move(issues)) {}

BugCorpus::BugCorpus(std::vector<BugInstance> instances) : instances_(std::move(instances)) {}

CorpusCounts BugCorpus::counts() const {
  CorpusCounts c;
  for (const BugInstance& inst : instances_) {
    ++c.total;
    switch (inst.label) {
      case Label::BC: ++c.bc; break;
      case Label::CE: ++c.ce; break;
      case Label::Preserving: ++c.preserving; break;
    }
  }
  return c;
}

const BugInstance* BugCorpus::find(std::string_view id) const {
  for (const BugInstance& inst : instances_) {
    if (inst.id == id) return &inst;
  }
  return nullptr;
}

BugInstance load_instance(const fs::path& dir) {
  using Kind = CorpusIssue::Kind;
  const fs::path meta_path = dir / "meta";
  if (!fs::is_regular_file(meta_path)) {
    throw single(Kind::MissingMetadata, dir, "no meta file");
  }
  const auto meta = parse_meta(read_file(meta_path));
  for (const char* key : {"id", "tool", "refactoring", "label"}) {
    auto it = meta.find(key);
    if (it == meta.end() || it->second.empty()) {
      throw single(Kind::MissingMetadata, dir, std::string("meta lacks key '") + key + "'");
    }
  }

  BugInstance inst;
  inst.id = meta.at("id");
  inst.tool = tool_from_string(meta.at("tool"));
  inst.refactoring_type = meta.at("refactoring");
  const auto label = label_from_string(meta.at("label"));
  if (!label) {
    throw single(Kind::InvalidMetadata, dir, "unknown label '" + meta.at("label") + "'");
  }
  inst.label = *label;

  inst.original = read_source_tree(dir / "original");
  inst.resulting = read_source_tree(dir / "resulting");
  if (inst.original.empty() || inst.resulting.empty()) {
    throw single(Kind::EmptySourceSet, dir,
                 inst.original.empty() ? "original/ has no .java files"
                                       : "resulting/ has no .java files");
  }
  try {
    validate_source_set(inst.original);
    validate_source_set(inst.resulting);
  } catch (const SourceSetError& e) {
    throw single(Kind::InvalidSource, dir, e.what());
  }

  const fs::path test_path = dir / "test" / "Test.java";
  const bool has_test = fs::is_regular_file(test_path);
  if (inst.label == Label::BC && !has_test) {
    throw single(Kind::MissingTestForBC, dir, "BC instance without test/Test.java");
  }
  if (inst.label != Label::BC && has_test) {
    throw single(Kind::UnexpectedTest, dir,
                 std::string(to_string(inst.label)) + " instance must not carry a test");
  }
  if (has_test) inst.exposing_test = read_file(test_path);
  if (fs::is_regular_file(dir / "diff")) inst.diff = read_file(dir / "diff");

  for (const SourceFile& f : inst.original.files) {
    try {
      inst.loc_original += java::count_loc(f.content);
    } catch (const java::LexError& e) {
      throw single(Kind::InvalidSource, dir, f.path + ": " + e.what());
    }
  }
  return inst;
}

BugCorpus load_corpus(const fs::path& root) {
  const fs::path instances_dir = root / "instances";
  if (!fs::is_directory(instances_dir)) {
    throw CorpusError({CorpusIssue{CorpusIssue::Kind::MissingMetadata, instances_dir,
                                   "corpus root has no instances/ directory"}});
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(instances_dir)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());

  std::vector<BugInstance> instances;
  std::vector<CorpusIssue> issues;
  std::map<std::string, fs::path> seen;
  for (const fs::path& dir : dirs) {
    try {
      BugInstance inst = load_instance(dir);
      auto [it, inserted] = seen.emplace(inst.id, dir);
      if (!inserted) {
        issues.push_back({CorpusIssue::Kind::DuplicateId, dir,
                          "id '" + inst.id + "' already used by " + it->second.string()});
        continue;
      }
      instances.push_back(std::move(inst));
    } catch (const CorpusError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
  }
  if (!issues.empty()) throw CorpusError(std::move(issues));
  return BugCorpus(std::move(instances));
}

void write_instance(const BugInstance& inst, const fs::path& root) {
  const fs::path dir = root / "instances" / inst.id;
  write_file(dir / "meta", "id=" + inst.id + "\ntool=" + std::string(to_string(inst.tool)) +
                               "\nrefactoring=" + inst.refactoring_type +
                               "\nlabel=" + std::string(to_string(inst.label)) + "\n");
  write_source_tree(inst.original, dir / "original");
  write_source_tree(inst.resulting, dir / "resulting");
  if (inst.exposing_test) write_file(dir / "test" / "Test.java", *inst.exposing_test);
  if (inst.diff) write_file(dir / "diff", *inst.diff);
}

BugCorpus filter_corpus(const BugCorpus& corpus, const InstancePredicate& pred) {
  std::vector<BugInstance> kept;
  for (const BugInstance& inst : corpus.instances()) {
    if (pred(inst.label, inst.tool, inst.refactoring_type)) kept.push_back(inst);
  }
  return BugCorpus(std::move(kept));
}

static json to_json(const SourceSet& set) {
  json files = json::array();
  for (const SourceFile& f : set.files) files.push_back({{"path", f.path}, {"content", f.content}});
  return files;
}

json to_json(const BugInstance& inst) {
  json j = {
      {"id", inst.id},
      {"tool", to_string(inst.tool)},
      {"refactoring", inst.refactoring_type},
      {"label", to_string(inst.label)},
      {"loc_original", inst.loc_original},
      {"original", to_json(inst.original)},
      {"resulting", to_json(inst.resulting)},
      {"exposing_test", inst.exposing_test ? json(*inst.exposing_test) : json(nullptr)},
  };
  if (inst.diff) j["diff"] = *inst.diff;
  return j;
}

std::string serialize_corpus(const BugCorpus& corpus) {
  const CorpusCounts c = corpus.counts();
  json j = {{"counts", {{"total", c.total}, {"BC", c.bc}, {"CE", c.ce}, {"PRESERVING", c.preserving}}},
            {"instances", json::array()}};
  for (const BugInstance& inst : corpus.instances()) j["instances"].push_back(to_json(inst));
  return j.dump(1);
}

ValidationReport validate_instance(const BugInstance& inst, exec::JavaToolchain& toolchain) {
  using exec::TestOutcome;
  using exec::Workspace;
  ValidationReport r;
  r.instance_id = inst.id;
  r.label = inst.label;
  r.toolchain_version = toolchain.version();

  auto log_section = [&r](const std::string& title, const std::string& body) {
    r.logs += "== " + title + "\n" + body;
    if (!body.empty() && body.back() != '\n') r.logs += '\n';
  };

  {
    Workspace ws = Workspace::create(toolchain.workspace_root(), inst.id + "-compile-original");
    const exec::CompileResult c = toolchain.compile(inst.original, ws);
    r.original_compiles = c.success;
    log_section("compile original", c.diagnostics);
  }
  {
    Workspace ws = Workspace::create(toolchain.workspace_root(), inst.id + "-compile-resulting");
    const exec::CompileResult c = toolchain.compile(inst.resulting, ws);
    r.resulting_compiles = c.success;
    log_section("compile resulting", c.diagnostics);
  }

  switch (inst.label) {
    case Label::CE:
      r.ground_truth_confirmed = r.original_compiles && !r.resulting_compiles;
      break;
    case Label::Preserving:
      r.ground_truth_confirmed = r.original_compiles && r.resulting_compiles;
      break;
    case Label::BC: {
      if (!inst.exposing_test || !r.original_compiles || !r.resulting_compiles) break;
      const exec::DiscriminationResult d = exec::check_discriminating(
          toolchain, *inst.exposing_test, inst.original, inst.resulting, inst.id + "-validate");
      log_section("test on original", d.on_original.runner_output);
      log_section("test on resulting", d.on_resulting.runner_output);
      r.test_on_original = d.on_original.outcome;
      r.test_on_resulting = d.on_resulting.outcome;
      r.test_compiles_on_both = d.on_original.outcome != TestOutcome::DidNotCompile &&
                                d.on_resulting.outcome != TestOutcome::DidNotCompile;
      r.test_discriminates = d.discriminates;
      r.timed_out = d.on_original.outcome == TestOutcome::Timeout ||
                    d.on_resulting.outcome == TestOutcome::Timeout;
      r.ground_truth_confirmed = d.on_original.outcome == TestOutcome::Pass &&
                                 (d.on_resulting.outcome == TestOutcome::Fail ||
                                  d.on_resulting.outcome == TestOutcome::Error);
      break;
    }
  }
  r.quarantined = !r.ground_truth_confirmed;
  return r;
}

json to_json(const ValidationReport& r) {
  auto opt_bool = [](const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); };
  auto opt_outcome = [](const std::optional<exec::TestOutcome>& o) {
    return o ? json(exec::to_string(*o)) : json(nullptr);
  };
  return {
      {"instance_id", r.instance_id},
      {"label", to_string(r.label)},
      {"original_compiles", r.original_compiles},
      {"resulting_compiles", r.resulting_compiles},
      {"test_compiles_on_both", opt_bool(r.test_compiles_on_both)},
      {"test_discriminates", opt_bool(r.test_discriminates)},
      {"test_on_original", opt_outcome(r.test_on_original)},
      {"test_on_resulting", opt_outcome(r.test_on_resulting)},
      {"ground_truth_confirmed", r.ground_truth_confirmed},
      {"timed_out", r.timed_out},
      {"quarantined", r.quarantined},
      {"toolchain_version", r.toolchain_version},
      {"logs", r.logs},
  };
}

}  // namespace reforacle
