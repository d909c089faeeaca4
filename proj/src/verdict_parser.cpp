#include "reforacle/verdict_parser.hpp"

#include "json.hpp"
#include "reforacle/java_lexer.hpp"

namespace reforacle {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::size_t kExcerptLength = 200;
constexpr std::size_t kMaxCandidates = 256;

std::optional<json> parse_object(std::string_view text) {
  json j = json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

// End offset (one past the closing brace) of the object starting at `open`,
// honouring JSON string quoting.
std::optional<std::size_t> matching_brace(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::nullopt;
}

ParseFailure failure(ParseFailure::Reason reason, std::string_view text, std::string detail) {
  return ParseFailure{reason, std::string(text.substr(0, kExcerptLength)), std::move(detail)};
}

}  // namespace

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Yes: return "YES";
    case Verdict::NoCompilationError: return "NO - COMPILATION ERROR";
    case Verdict::NoBehaviorChange: return "NO - BEHAVIOR CHANGE";
    case Verdict::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::optional<Verdict> verdict_from_string(std::string_view text) {
  if (text == "YES") return Verdict::Yes;
  if (text == "UNKNOWN") return Verdict::Unknown;
  if (!text.starts_with("NO")) return std::nullopt;
  std::string_view rest = text.substr(2);
  if (rest.starts_with(' ')) rest.remove_prefix(1);
  if (!rest.starts_with('-')) return std::nullopt;
  rest.remove_prefix(1);
  if (rest.starts_with(' ')) rest.remove_prefix(1);
  if (rest == "COMPILATION ERROR") return Verdict::NoCompilationError;
  if (rest == "BEHAVIOR CHANGE") return Verdict::NoBehaviorChange;
  return std::nullopt;
}

std::string_view to_string(ParseFailure::Reason reason) {
  switch (reason) {
    case ParseFailure::Reason::NotJson: return "NotJson";
    case ParseFailure::Reason::MissingField: return "MissingField";
    case ParseFailure::Reason::IllegalVerdictString: return "IllegalVerdictString";
    case ParseFailure::Reason::IllegalUnknownInFullMode: return "IllegalUnknownInFullMode";
  }
  return "NotJson";
}

int count_sentences(std::string_view text) {
  int n = 0;
  bool in_sentence = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.' || c == '!' || c == '?') {
      const bool boundary = i + 1 == text.size() || text[i + 1] == ' ' ||
                            text[i + 1] == '\n' || text[i + 1] == '\t';
      if (boundary && in_sentence) {
        ++n;
        in_sentence = false;
      }
    } else if (c != ' ' && c != '\n' && c != '\t' && c != '\r') {
      in_sentence = true;
    }
  }
  return n + (in_sentence ? 1 : 0);
}

ParseResult parse_response(std::string_view text, PromptKind mode) {
  std::optional<json> doc = parse_object(text);
  bool stripped = false;
  if (!doc) {
    std::size_t tried = 0;
    for (std::size_t pos = text.find('{'); pos != std::string_view::npos && tried < kMaxCandidates;
         pos = text.find('{', pos + 1), ++tried) {
      const auto end = matching_brace(text, pos);
      if (!end) continue;
      doc = parse_object(text.substr(pos, *end - pos));
      if (doc) {
        stripped = true;
        break;
      }
    }
  }
  if (!doc) return failure(ParseFailure::Reason::NotJson, text, "no JSON object found");

  const auto verdict_it = doc->find("verdict");
  if (verdict_it == doc->end() || !verdict_it->is_string()) {
    return failure(ParseFailure::Reason::MissingField, text, "\"verdict\" missing or not a string");
  }
  const auto expl_it = doc->find("explanation");
  if (expl_it == doc->end() || !expl_it->is_string()) {
    return failure(ParseFailure::Reason::MissingField, text,
                   "\"explanation\" missing or not a string");
  }
  const std::string verdict_text = verdict_it->get<std::string>();
  const auto category = verdict_from_string(verdict_text);
  if (!category) {
    return failure(ParseFailure::Reason::IllegalVerdictString, text,
                   "unrecognized verdict \"" + verdict_text.substr(0, 80) + "\"");
  }
  if (*category == Verdict::Unknown && mode == PromptKind::FullSource) {
    return failure(ParseFailure::Reason::IllegalUnknownInFullMode, text,
                   "UNKNOWN is only valid for diff prompts");
  }

  ModelVerdict v;
  v.category = *category;
  v.explanation = expl_it->get<std::string>();
  v.explanation_sentences = count_sentences(v.explanation);
  v.noise_stripped = stripped;
  if (mode == PromptKind::FullSource) {
    const auto test_it = doc->find("junit_test");
    if (test_it != doc->end() && !test_it->is_null()) {
      if (!test_it->is_string()) {
        return failure(ParseFailure::Reason::MissingField, text,
                       "\"junit_test\" must be a string or null");
      }
      v.junit_test = test_it->get<std::string>();
    }
    v.missing_test = v.category == Verdict::NoBehaviorChange &&
                     (!v.junit_test || v.junit_test->find_first_not_of(" \t\r\n") ==
                                           std::string::npos);
  }
  return v;
}

std::string to_canonical_json(const ModelVerdict& v, PromptKind mode) {
  ordered_json j;
  j["verdict"] = to_string(v.category);
  j["explanation"] = v.explanation;
  if (mode == PromptKind::FullSource) {
    j["junit_test"] = v.junit_test ? ordered_json(*v.junit_test) : ordered_json(nullptr);
  }
  return j.dump();
}

std::string strip_code_fences(std::string_view text) {
  const std::size_t open = text.find("```");
  if (open == std::string_view::npos) return std::string(text);
  std::size_t body = text.find('\n', open);
  if (body == std::string_view::npos) return {};
  ++body;
  std::size_t close = text.find("```", body);
  if (close == std::string_view::npos) close = text.size();
  return std::string(text.substr(body, close - body));
}

TestExtraction extract_test_source(const ModelVerdict& verdict) {
  TestExtraction out;
  if (!verdict.junit_test) return out;
  out.code = strip_code_fences(*verdict.junit_test);
  if (out.code.find_first_not_of(" \t\r\n") == std::string::npos) {
    out.status = TestExtraction::Status::Malformed;
    out.problem = "test source is empty";
    return out;
  }
  std::vector<std::string> types;
  try {
    types = java::public_top_level_types(out.code);
    const auto tokens = java::tokenize(out.code);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      if (tokens[i].text(out.code) == "@" && tokens[i + 1].text(out.code) == "Test") {
        ++out.test_methods;
      }
    }
  } catch (const java::LexError& e) {
    out.status = TestExtraction::Status::Malformed;
    out.problem = e.what();
    return out;
  }
  if (types.size() != 1) {
    out.status = TestExtraction::Status::Malformed;
    out.problem = "expected exactly one public top-level class, found " +
                  std::to_string(types.size());
    return out;
  }
  out.status = TestExtraction::Status::Ok;
  out.class_name = types.front();
  return out;
}

}  // namespace reforacle
