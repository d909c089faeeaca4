#include "reforacle/structural_index.hpp"

#include <optional>

#include "reforacle/java_lexer.hpp"

namespace reforacle::mt {

namespace {

using java::Token;
using java::TokenKind;

enum class FrameKind { Type, Method, Other };

struct Frame {
  FrameKind kind;
  std::size_t type_index;  // valid for Type frames
  std::size_t open_token;
};

bool is_punct(const Token& t, std::string_view src, std::string_view p) {
  return t.kind == TokenKind::Punct && t.text(src) == p;
}

std::string line_indent(std::string_view src, std::size_t offset) {
  const std::size_t start = src.rfind('\n', offset == 0 ? 0 : offset - 1);
  const std::size_t line_begin = (start == std::string_view::npos || offset == 0) ? 0 : start + 1;
  std::size_t i = line_begin;
  while (i < src.size() && (src[i] == ' ' || src[i] == '\t')) ++i;
  return std::string(src.substr(line_begin, i - line_begin));
}

// Point just after token `tok`: the start of the next line when nothing but
// comments follows on the same line, otherwise directly after the token.
InsertionPoint point_after(std::string_view src, const std::vector<Token>& toks, std::size_t tok) {
  InsertionPoint p;
  const Token& t = toks[tok];
  const std::size_t after = t.offset + t.length;
  bool rest_is_comment = true;
  for (std::size_t j = tok + 1; j < toks.size() && toks[j].line == t.line; ++j) {
    if (!toks[j].is_comment()) {
      rest_is_comment = false;
      break;
    }
  }
  const std::size_t nl = src.find('\n', after);
  // A trailing block comment may run past the end of the line.
  bool comment_crosses_line = false;
  for (std::size_t j = tok + 1; j < toks.size() && toks[j].line == t.line; ++j) {
    if (toks[j].offset + toks[j].length > nl) comment_crosses_line = true;
  }
  if (rest_is_comment && nl != std::string_view::npos && !comment_crosses_line) {
    p.offset = nl + 1;
    p.line_start = true;
  } else {
    p.offset = after;
    p.line_start = false;
  }
  return p;
}

}  // namespace

std::size_t StructuralIndex::type_count() const {
  std::size_t n = 0;
  for (const FileIndex& f : files) n += f.types.size();
  return n;
}

static FileIndex index_file(const SourceFile& file, std::set<std::string>& identifiers) {
  const std::string_view src = file.content;
  std::vector<Token> all;
  try {
    all = java::tokenize(src);
  } catch (const java::LexError& e) {
    throw ScanError(ScanError::Kind::UnterminatedLiteral, file.path + ": " + e.what());
  }

  FileIndex fi;
  fi.path = file.path;

  // Line boundaries: every line start not strictly inside a multi-line token.
  {
    std::vector<std::pair<std::size_t, std::size_t>> blocked;
    for (const Token& t : all) {
      if (t.kind == TokenKind::BlockComment || t.kind == TokenKind::TextBlock) {
        blocked.emplace_back(t.offset, t.offset + t.length);
      }
    }
    std::size_t b = 0;
    auto consider = [&](std::size_t pos) {
      while (b < blocked.size() && blocked[b].second <= pos) ++b;
      if (b < blocked.size() && blocked[b].first < pos && pos < blocked[b].second) return;
      fi.line_boundaries.push_back(pos);
    };
    consider(0);
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (src[i] == '\n') consider(i + 1);
    }
  }

  std::vector<Token> toks;
  for (const Token& t : all) {
    if (!t.is_comment()) toks.push_back(t);
    if (t.kind == TokenKind::Identifier && !java::is_keyword(t.text(src))) {
      identifiers.insert(std::string(t.text(src)));
    }
  }

  // Import point.
  fi.import_point.offset = 0;
  fi.import_point.line_start = true;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].text(src) != "package") continue;
    std::size_t j = i;
    while (j < toks.size() && !is_punct(toks[j], src, ";")) ++j;
    if (j == toks.size()) break;
    // Locate the semicolon among all tokens (comments included).
    for (std::size_t a = 0; a < all.size(); ++a) {
      if (all[a].offset == toks[j].offset) {
        fi.import_point = point_after(src, all, a);
        break;
      }
    }
    break;
  }

  std::vector<Frame> stack;
  std::optional<std::pair<std::string, TypeKind>> pending_type;
  int paren_depth = 0;

  auto all_index_of = [&](const Token& t) -> std::size_t {
    std::size_t lo = 0, hi = all.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (all[mid].offset < t.offset) lo = mid + 1;
      else hi = mid;
    }
    return lo;
  };

  // Index of the matching '(' for the ')' at toks[close].
  auto matching_open_paren = [&](std::size_t close) -> std::optional<std::size_t> {
    int depth = 0;
    for (std::size_t j = close + 1; j-- > 0;) {
      if (is_punct(toks[j], src, ")")) ++depth;
      else if (is_punct(toks[j], src, "(")) {
        if (--depth == 0) return j;
      }
    }
    return std::nullopt;
  };

  // Method name when toks[brace] opens a method or constructor body.
  auto method_header = [&](std::size_t brace) -> std::optional<std::string> {
    if (brace == 0) return std::nullopt;
    std::size_t j = brace - 1;
    if (!is_punct(toks[j], src, ")")) {
      // throws clause: identifiers, dots, commas and generic brackets.
      std::size_t k = j;
      while (k > 0 && (toks[k].kind == TokenKind::Identifier || is_punct(toks[k], src, ".") ||
                       is_punct(toks[k], src, ",") || is_punct(toks[k], src, "<") ||
                       is_punct(toks[k], src, ">"))) {
        if (toks[k].text(src) == "throws") break;
        --k;
      }
      if (toks[k].text(src) != "throws" || k == 0 || !is_punct(toks[k - 1], src, ")")) {
        return std::nullopt;
      }
      j = k - 1;
    }
    const auto open = matching_open_paren(j);
    if (!open || *open == 0) return std::nullopt;
    const Token& name = toks[*open - 1];
    if (name.kind != TokenKind::Identifier || java::is_keyword(name.text(src))) return std::nullopt;
    if (*open < 2) return std::nullopt;
    const Token& before = toks[*open - 2];
    const bool ok = (before.kind == TokenKind::Identifier && before.text(src) != "new") ||
                    is_punct(before, src, ">") || is_punct(before, src, "]");
    if (!ok) return std::nullopt;
    return std::string(name.text(src));
  };

  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& t = toks[i];
    const std::string_view text = t.text(src);
    if (t.kind == TokenKind::Identifier) {
      const bool after_dot = i > 0 && is_punct(toks[i - 1], src, ".");
      const bool after_at = i > 0 && is_punct(toks[i - 1], src, "@");
      if (!after_dot && i + 1 < toks.size() && toks[i + 1].kind == TokenKind::Identifier &&
          !java::is_keyword(toks[i + 1].text(src))) {
        std::optional<TypeKind> kind;
        if (text == "class") kind = TypeKind::Class;
        else if (text == "interface") kind = after_at ? TypeKind::Annotation : TypeKind::Interface;
        else if (text == "enum") kind = TypeKind::Enum;
        else if (text == "record" && i + 2 < toks.size() && (is_punct(toks[i + 2], src, "(") ||
                                                             is_punct(toks[i + 2], src, "<"))) {
          kind = TypeKind::Record;
        }
        if (kind) pending_type = std::make_pair(std::string(toks[i + 1].text(src)), *kind);
      }
      continue;
    }
    if (t.kind != TokenKind::Punct) continue;
    if (text == "(") {
      ++paren_depth;
    } else if (text == ")") {
      --paren_depth;
    } else if (text == ";" && paren_depth == 0) {
      pending_type.reset();
    } else if (text == "{") {
      const Frame* enclosing = stack.empty() ? nullptr : &stack.back();
      const bool in_type_body = stack.empty() || enclosing->kind == FrameKind::Type;
      if (pending_type) {
        TypeSpan span;
        span.name = pending_type->first;
        span.kind = pending_type->second;
        span.open_brace = t.offset;
        span.depth = static_cast<int>(stack.size());
        fi.types.push_back(span);
        stack.push_back({FrameKind::Type, fi.types.size() - 1, i});
        pending_type.reset();
        if (span.kind == TypeKind::Class || span.kind == TypeKind::Interface) {
          InsertionPoint p = point_after(src, all, all_index_of(t));
          p.indent = line_indent(src, t.offset) + "    ";
          p.owner = span.name;
          p.owner_kind = span.kind;
          fi.member_points.push_back(p);
        }
        continue;
      }
      if (in_type_body && enclosing != nullptr && paren_depth == 0) {
        if (auto name = method_header(i)) {
          const TypeSpan& owner = fi.types[enclosing->type_index];
          stack.push_back({FrameKind::Method, 0, i});
          if (*name != owner.name) {
            InsertionPoint p = point_after(src, all, all_index_of(t));
            p.indent = line_indent(src, t.offset) + "    ";
            p.owner = owner.name;
            p.owner_kind = owner.kind;
            fi.body_points.push_back(p);
          }
          continue;
        }
      }
      stack.push_back({FrameKind::Other, 0, i});
    } else if (text == "}") {
      if (stack.empty()) {
        throw ScanError(ScanError::Kind::UnbalancedBraces,
                        file.path + ": unmatched '}' at line " + std::to_string(t.line));
      }
      const Frame f = stack.back();
      stack.pop_back();
      if (f.kind == FrameKind::Type) fi.types[f.type_index].close_brace = t.offset;
    }
  }
  if (!stack.empty()) {
    throw ScanError(ScanError::Kind::UnbalancedBraces,
                    file.path + ": unclosed '{' at line " +
                        std::to_string(toks[stack.back().open_token].line));
  }
  return fi;
}

StructuralIndex index_structure(const SourceSet& src) {
  StructuralIndex idx;
  for (const SourceFile& f : src.files) idx.files.push_back(index_file(f, idx.identifiers));
  return idx;
}

}  // namespace reforacle::mt
