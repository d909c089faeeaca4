#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "reforacle/prompting.hpp"

namespace reforacle {

enum class Verdict { Yes, NoCompilationError, NoBehaviorChange, Unknown };

/// Canonical schema string, e.g. "NO - BEHAVIOR CHANGE".
std::string_view to_string(Verdict verdict);

/// Case-sensitive. The only tolerated deviation is zero or one space on
/// either side of the hyphen ("NO -BEHAVIOR CHANGE" is accepted).
std::optional<Verdict> verdict_from_string(std::string_view text);

struct ModelVerdict {
  Verdict category = Verdict::Yes;
  std::string explanation;
  std::optional<std::string> junit_test;
  /// Prose or fences surrounded the JSON object and were discarded.
  bool noise_stripped = false;
  /// NO - BEHAVIOR CHANGE without a test in full-source mode.
  bool missing_test = false;
  int explanation_sentences = 0;

  bool operator==(const ModelVerdict&) const = default;
};

struct ParseFailure {
  enum class Reason { NotJson, MissingField, IllegalVerdictString, IllegalUnknownInFullMode };
  Reason reason = Reason::NotJson;
  std::string excerpt;  // first 200 characters of the response
  std::string detail;
};

std::string_view to_string(ParseFailure::Reason reason);

using ParseResult = std::variant<ModelVerdict, ParseFailure>;

/// Total: every input yields exactly one alternative.
ParseResult parse_response(std::string_view text, PromptKind mode);

/// Schema-ordered JSON: verdict, explanation and (full-source only) junit_test.
std::string to_canonical_json(const ModelVerdict& verdict, PromptKind mode);

struct TestExtraction {
  enum class Status { Absent, Ok, Malformed };
  Status status = Status::Absent;
  std::string code;        // fence-stripped source (also set when malformed)
  std::string class_name;  // the single public top-level class
  int test_methods = 0;    // @Test annotations seen
  std::string problem;
};

/// Strips markdown fences from the verdict's junit_test and checks that it
/// declares exactly one public top-level class.
TestExtraction extract_test_source(const ModelVerdict& verdict);

/// Removes ``` fences (with an optional language tag) around `text`.
std::string strip_code_fences(std::string_view text);

/// Rough sentence count: runs of text ended by '.', '!' or '?' followed by
/// whitespace or end of input.
int count_sentences(std::string_view text);

}  // namespace reforacle
