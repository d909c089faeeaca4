#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "reforacle/java_executor.hpp"
#include "reforacle/source_set.hpp"

namespace reforacle {

enum class Tool { Eclipse, NetBeans, IntelliJ, Other };
enum class Label { BC, CE, Preserving };

std::string_view to_string(Tool tool);
std::string_view to_string(Label label);
/// Case-insensitive; unrecognized tool names map to Other.
Tool tool_from_string(std::string_view text);
/// Accepts BC, CE, PRESERVING (case-insensitive). Returns nullopt otherwise.
std::optional<Label> label_from_string(std::string_view text);

struct BugInstance {
  std::string id;
  Tool tool = Tool::Other;
  std::string refactoring_type;
  Label label = Label::CE;
  SourceSet original;
  SourceSet resulting;
  std::optional<std::string> exposing_test;  // present iff label == BC
  /// Optional stored diff payload (`<id>/diff`); derived when absent.
  std::optional<std::string> diff;
  int loc_original = 0;
};

struct CorpusCounts {
  int total = 0;
  int bc = 0;
  int ce = 0;
  int preserving = 0;

  bool operator==(const CorpusCounts&) const = default;
};

class BugCorpus {
 public:
  BugCorpus() = default;
  explicit BugCorpus(std::vector<BugInstance> instances);

  const std::vector<BugInstance>& instances() const { return instances_; }
  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }

  /// Recomputed from the instance list on every call.
  CorpusCounts counts() const;

  const BugInstance* find(std::string_view id) const;

 private:
  std::vector<BugInstance> instances_;
};

struct CorpusIssue {
  enum class Kind {
    MissingMetadata,
    InvalidMetadata,
    DuplicateId,
    MissingTestForBC,
    UnexpectedTest,
    EmptySourceSet,
    InvalidSource,
  };
  Kind kind;
  std::filesystem::path dir;
  std::string message;
};

std::string_view to_string(CorpusIssue::Kind kind);

/// Every malformed instance directory found by load_corpus.
class CorpusError : public std::runtime_error {
 public:
  explicit CorpusError(std::vector<CorpusIssue> issues);
  const std::vector<CorpusIssue>& issues() const { return issues_; }

 private:
  std::vector<CorpusIssue> issues_;
};

/// Loads `<root>/instances/<id>/...`. Instance directories are visited in
/// lexicographic order. All issues are collected before throwing.
BugCorpus load_corpus(const std::filesystem::path& root);

/// Loads one instance directory. Throws CorpusError with a single issue.
BugInstance load_instance(const std::filesystem::path& dir);

/// Writes `inst` in the dataset layout under `<root>/instances/<id>/`.
void write_instance(const BugInstance& inst, const std::filesystem::path& root);

using InstancePredicate =
    std::function<bool(Label label, Tool tool, const std::string& refactoring_type)>;

BugCorpus filter_corpus(const BugCorpus& corpus, const InstancePredicate& pred);

nlohmann::json to_json(const BugInstance& inst);
/// Canonical serialization; identical trees give identical bytes.
std::string serialize_corpus(const BugCorpus& corpus);

struct ValidationReport {
  std::string instance_id;
  Label label = Label::CE;
  bool original_compiles = false;
  bool resulting_compiles = false;
  std::optional<bool> test_compiles_on_both;
  std::optional<bool> test_discriminates;
  std::optional<exec::TestOutcome> test_on_original;
  std::optional<exec::TestOutcome> test_on_resulting;
  bool ground_truth_confirmed = false;
  bool timed_out = false;
  /// Set when the observed outcomes disagree with the label.
  bool quarantined = false;
  std::string toolchain_version;
  std::string logs;
};

/// Compiles both versions and, for BC instances, runs the exposing test on
/// each. A BC label is confirmed when the test passes on the original and
/// fails (FAIL or ERROR) on the resulting program.
ValidationReport validate_instance(const BugInstance& inst, exec::JavaToolchain& toolchain);

nlohmann::json to_json(const ValidationReport& report);

}  // namespace reforacle
