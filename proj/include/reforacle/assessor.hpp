#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "reforacle/dataset.hpp"
#include "reforacle/java_executor.hpp"
#include "reforacle/transcript_store.hpp"
#include "reforacle/verdict_parser.hpp"

namespace reforacle {

enum class AnswerLabel {
  SaidYes,
  SaidCE,
  SaidBCValid,
  SaidBCTestNotCompiling,
  SaidBCTestNotDiscriminating,
  SaidUnknown,
  ParseError,
};

inline constexpr AnswerLabel kAllAnswerLabels[] = {
    AnswerLabel::SaidYes,
    AnswerLabel::SaidCE,
    AnswerLabel::SaidBCValid,
    AnswerLabel::SaidBCTestNotCompiling,
    AnswerLabel::SaidBCTestNotDiscriminating,
    AnswerLabel::SaidUnknown,
    AnswerLabel::ParseError,
};

std::string_view to_string(AnswerLabel label);
std::optional<AnswerLabel> answer_label_from_string(std::string_view text);

/// The correctness rule. `discriminating_evidence` is whether a stored
/// discrimination result with discriminates=true backs the answer.
bool is_correct(Label ground_truth, AnswerLabel answer, bool discriminating_evidence);

inline constexpr int kOutcomeSchema = 1;

struct AssessmentOutcome {
  std::string instance_id;
  int attempt_index = 1;
  std::string backend_name;
  std::string variant_tag;
  Label ground_truth = Label::CE;
  std::string refactoring_type;
  std::string tool;

  AnswerLabel answer_label = AnswerLabel::ParseError;
  bool correct = false;
  /// Toolchain or model-call failure; excluded from metrics.
  bool inconclusive = false;
  /// The model call itself failed (no response); retried on resume.
  bool call_failed = false;
  std::string error;

  std::optional<Verdict> claimed;
  std::string explanation;
  int explanation_sentences = 0;
  std::optional<std::string> parse_failure;
  std::string parse_excerpt;
  bool noise_stripped = false;
  bool missing_test = false;
  bool malformed_test = false;
  bool reflective_test = false;
  std::optional<exec::DiscriminationResult> evidence;

  // Telemetry copied from the model response.
  double latency_s = 0.0;
  std::optional<long> tokens_in;
  std::optional<long> tokens_out;
  std::optional<long> tokens_reasoning;
  std::optional<double> cost_estimate;
  std::string created_at;

  // Provenance.
  std::string mode;
  std::string prompt_hash;
  std::string template_version;
  std::string toolchain_version;
  std::optional<std::uint64_t> seed;

  /// Same format as RequestKey::str().
  std::string key() const;
};

nlohmann::json to_json(const AssessmentOutcome& outcome);
/// Throws std::runtime_error when the record is not schema 1.
AssessmentOutcome outcome_from_json(const nlohmann::json& j);

/// Assesses a verdict on a BC or CE instance (PRESERVING instances are
/// forwarded to assess_preserving). A behavior-change claim on a BC instance
/// is checked by running the model's test on both versions.
AssessmentOutcome assess(const BugInstance& inst, const ParseResult& verdict,
                         exec::JavaToolchain& toolchain);

/// Assesses a verdict on a behavior-preserving instance. With a toolchain,
/// behavior-change claims are labeled by running their test; without one a
/// present test is labeled not discriminating.
AssessmentOutcome assess_preserving(const BugInstance& inst, const ParseResult& verdict,
                                    exec::JavaToolchain* toolchain = nullptr);

/// Copies telemetry fields from `resp`.
void attach_response(AssessmentOutcome& outcome, const RawModelResponse& resp);

}  // namespace reforacle
