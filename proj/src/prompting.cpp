#include "reforacle/prompting.hpp"

#include <algorithm>

#include "reforacle/hash.hpp"
#include "reforacle/source_set.hpp"

namespace reforacle {

namespace {

constexpr std::string_view kJsonInstruction = "Return ONLY valid JSON";

std::vector<std::string_view> placeholders_for(PromptKind kind) {
  if (kind == PromptKind::FullSource) return {"{code1}", "{code2}"};
  return {"{diff}"};
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

struct Splice {
  std::string_view placeholder;
  std::string_view payload;
};

RenderedPrompt render(const PromptTemplate& tmpl, std::vector<Splice> splices) {
  validate_template(tmpl);
  std::vector<std::pair<std::size_t, Splice>> at;
  for (const Splice& s : splices) at.emplace_back(tmpl.body.find(s.placeholder), s);
  std::sort(at.begin(), at.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  RenderedPrompt out;
  out.kind = tmpl.kind;
  out.template_version = tmpl.version;
  std::size_t cursor = 0;
  for (const auto& [pos, s] : at) {
    out.text.append(tmpl.body, cursor, pos - cursor);
    out.payloads.push_back({std::string(s.placeholder), out.text.size(), s.payload.size()});
    out.text.append(s.payload);
    cursor = pos + s.placeholder.size();
  }
  out.text.append(tmpl.body, cursor);
  return out;
}

}  // namespace

std::string_view to_string(PromptKind kind) {
  return kind == PromptKind::FullSource ? "full-source" : "diff";
}

const PromptTemplate& builtin_template(PromptKind kind) {
  static const PromptTemplate full{PromptKind::FullSource, "full-source/v1",
                                   detail::kFullSourceTemplateV1};
  static const PromptTemplate diff{PromptKind::DiffOnly, "diff/v1", detail::kDiffTemplateV1};
  return kind == PromptKind::FullSource ? full : diff;
}

void validate_template(const PromptTemplate& tmpl) {
  for (std::string_view ph : placeholders_for(tmpl.kind)) {
    const std::size_t n = count_occurrences(tmpl.body, ph);
    if (n != 1) {
      throw PromptError(PromptError::Kind::InvalidTemplate,
                        "template " + tmpl.version + " must contain " + std::string(ph) +
                            " exactly once (found " + std::to_string(n) + ")");
    }
  }
  if (tmpl.body.find(kJsonInstruction) == std::string::npos) {
    throw PromptError(PromptError::Kind::InvalidTemplate,
                      "template " + tmpl.version + " lacks the instruction \"" +
                          std::string(kJsonInstruction) + "\"");
  }
}

PromptTemplate load_template(PromptKind kind, const std::filesystem::path& path) {
  PromptTemplate t;
  t.kind = kind;
  t.body = read_file(path);
  t.version = "file:" + sha256_hex(t.body).substr(0, 12);
  validate_template(t);
  return t;
}

std::string RenderedPrompt::hash() const { return sha256_hex(text); }

RenderedPrompt render_full_prompt(std::string_view code1, std::string_view code2,
                                  const PromptTemplate& tmpl) {
  if (tmpl.kind != PromptKind::FullSource) {
    throw PromptError(PromptError::Kind::InvalidTemplate, "expected a full-source template");
  }
  if (blank(code1) || blank(code2)) {
    throw PromptError(PromptError::Kind::EmptyProgram,
                      blank(code1) ? "initial program is empty" : "resulting program is empty");
  }
  return render(tmpl, {{"{code1}", code1}, {"{code2}", code2}});
}

RenderedPrompt render_diff_prompt(std::string_view diff, const PromptTemplate& tmpl) {
  if (tmpl.kind != PromptKind::DiffOnly) {
    throw PromptError(PromptError::Kind::InvalidTemplate, "expected a diff template");
  }
  if (blank(diff)) throw PromptError(PromptError::Kind::EmptyDiff, "diff is empty");
  bool has_change = false;
  std::size_t pos = 0;
  while (pos < diff.size() && !has_change) {
    std::size_t end = diff.find('\n', pos);
    if (end == std::string_view::npos) end = diff.size();
    const std::string_view line = diff.substr(pos, end - pos);
    const bool header = line.starts_with("+++") || line.starts_with("---");
    has_change = !header && (line.starts_with('+') || line.starts_with('-'));
    pos = end + 1;
  }
  if (!has_change) {
    throw PromptError(PromptError::Kind::NoChangeLines, "diff has no added or removed lines");
  }
  return render(tmpl, {{"{diff}", diff}});
}

std::string recover_template(const RenderedPrompt& prompt) {
  std::string out;
  std::size_t cursor = 0;
  for (const PayloadSpan& span : prompt.payloads) {
    out.append(prompt.text, cursor, span.offset - cursor);
    out.append(span.placeholder);
    cursor = span.offset + span.length;
  }
  out.append(prompt.text, cursor);
  return out;
}

}  // namespace reforacle
