#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace reforacle {

enum class PromptKind { FullSource, DiffOnly };

std::string_view to_string(PromptKind kind);

struct PromptTemplate {
  PromptKind kind = PromptKind::FullSource;
  /// "full-source/v1", "diff/v1", or "file:<sha256 prefix>" for overrides.
  std::string version;
  std::string body;
};

class PromptError : public std::runtime_error {
 public:
  enum class Kind { EmptyProgram, EmptyDiff, NoChangeLines, InvalidTemplate };
  PromptError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Embedded template text for `kind`.
const PromptTemplate& builtin_template(PromptKind kind);

/// Reads an override template from a plain-text file and validates it.
PromptTemplate load_template(PromptKind kind, const std::filesystem::path& path);

/// Throws InvalidTemplate unless every placeholder for the kind occurs exactly
/// once and the JSON-only instruction is present.
void validate_template(const PromptTemplate& tmpl);

struct PayloadSpan {
  std::string placeholder;  // e.g. "{code1}"
  std::size_t offset = 0;   // in RenderedPrompt::text
  std::size_t length = 0;
};

struct RenderedPrompt {
  PromptKind kind = PromptKind::FullSource;
  std::string text;
  std::string instance_id;
  std::optional<std::string> variant_tag;
  std::string template_version;
  std::vector<PayloadSpan> payloads;  // ascending offsets

  std::string hash() const;
};

/// Splices both programs verbatim into the template.
/// Throws EmptyProgram when either program is blank.
RenderedPrompt render_full_prompt(std::string_view code1, std::string_view code2,
                                  const PromptTemplate& tmpl =
                                      builtin_template(PromptKind::FullSource));

/// Throws EmptyDiff for a blank diff and NoChangeLines when no line (other
/// than ---/+++ file headers) starts with '+' or '-'.
RenderedPrompt render_diff_prompt(std::string_view diff,
                                  const PromptTemplate& tmpl =
                                      builtin_template(PromptKind::DiffOnly));

/// Replaces every payload span with its placeholder, giving back the
/// template body.
std::string recover_template(const RenderedPrompt& prompt);

namespace detail {
extern const char* const kFullSourceTemplateV1;
extern const char* const kDiffTemplateV1;
}  // namespace detail

}  // namespace reforacle
