#include "reforacle/java_lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace reforacle::java {

namespace {

bool ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}
bool ident_part(unsigned char c) { return ident_start(c) || std::isdigit(c); }

constexpr std::array<std::string_view, 51> kKeywords = {
    "abstract",   "assert",       "boolean",   "break",      "byte",
    "case",       "catch",        "char",      "class",      "const",
    "continue",   "default",      "do",        "double",     "else",
    "enum",       "extends",      "final",     "finally",    "float",
    "for",        "goto",         "if",        "implements", "import",
    "instanceof", "int",          "interface", "long",       "native",
    "new",        "package",      "private",   "protected",  "public",
    "return",     "short",        "static",    "strictfp",   "super",
    "switch",     "synchronized", "this",      "throw",      "throws",
    "transient",  "try",          "void",      "volatile",   "while",
    "_"};

}  // namespace

bool is_keyword(std::string_view word) {
  if (word == "true" || word == "false" || word == "null") return true;
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  const std::size_t n = src.size();
  std::size_t i = 0;
  int line = 1;
  auto count_newlines = [&](std::size_t from, std::size_t to) {
    line += static_cast<int>(std::count(src.begin() + from, src.begin() + to, '\n'));
  };

  while (i < n) {
    const unsigned char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    const int start_line = line;

    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n') ++i;
      out.push_back({TokenKind::LineComment, start, i - start, start_line});
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      const std::size_t end = src.find("*/", i + 2);
      if (end == std::string_view::npos) {
        throw LexError(LexError::Kind::UnterminatedComment, start_line,
                       "unterminated block comment at line " +
                           std::to_string(start_line));
      }
      i = end + 2;
      count_newlines(start, i);
      out.push_back({TokenKind::BlockComment, start, i - start, start_line});
      continue;
    }
    if (c == '"' && src.substr(i, 3) == "\"\"\"") {
      std::size_t j = i + 3;
      bool closed = false;
      while (j < n) {
        if (src[j] == '\\') {
          j += 2;
          continue;
        }
        if (src.substr(j, 3) == "\"\"\"") {
          j += 3;
          closed = true;
          break;
        }
        ++j;
      }
      if (!closed) {
        throw LexError(LexError::Kind::UnterminatedLiteral, start_line,
                       "unterminated text block at line " +
                           std::to_string(start_line));
      }
      i = j;
      count_newlines(start, i);
      out.push_back({TokenKind::TextBlock, start, i - start, start_line});
      continue;
    }
    if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      bool closed = false;
      while (j < n && src[j] != '\n') {
        if (src[j] == '\\') {
          j += 2;
          continue;
        }
        if (src[j] == static_cast<char>(c)) {
          ++j;
          closed = true;
          break;
        }
        ++j;
      }
      if (!closed) {
        throw LexError(LexError::Kind::UnterminatedLiteral, start_line,
                       std::string("unterminated ") +
                           (c == '"' ? "string" : "char") +
                           " literal at line " + std::to_string(start_line));
      }
      i = j;
      out.push_back({c == '"' ? TokenKind::String : TokenKind::Char, start,
                     i - start, start_line});
      continue;
    }
    if (ident_start(c)) {
      while (i < n && ident_part(static_cast<unsigned char>(src[i]))) ++i;
      out.push_back({TokenKind::Identifier, start, i - start, start_line});
      continue;
    }
    if (std::isdigit(c) ||
        (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      const bool hex = src.substr(start, 2) == "0x" || src.substr(start, 2) == "0X";
      ++i;
      while (i < n) {
        const unsigned char d = src[i];
        const char prev = src[i - 1];
        const bool exponent_sign =
            (d == '+' || d == '-') &&
            (prev == 'p' || prev == 'P' || (!hex && (prev == 'e' || prev == 'E')));
        if (std::isalnum(d) || d == '_' || d == '.' || exponent_sign) {
          ++i;
        } else {
          break;
        }
      }
      out.push_back({TokenKind::Number, start, i - start, start_line});
      continue;
    }
    std::size_t len = 1;
    if (src.substr(i, 3) == "...") {
      len = 3;
    } else if (src.substr(i, 2) == "->" || src.substr(i, 2) == "::") {
      len = 2;
    }
    i += len;
    out.push_back({TokenKind::Punct, start, len, start_line});
  }
  return out;
}

std::string strip_comments(std::string_view src) {
  std::string out(src);
  for (const Token& t : tokenize(src)) {
    if (!t.is_comment()) continue;
    for (std::size_t k = t.offset; k < t.offset + t.length; ++k) {
      if (out[k] != '\n') out[k] = ' ';
    }
  }
  return out;
}

int count_loc(std::string_view src) {
  const std::string stripped = strip_comments(src);
  int loc = 0;
  bool blank = true;
  for (char c : stripped) {
    if (c == '\n') {
      if (!blank) ++loc;
      blank = true;
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      blank = false;
    }
  }
  if (!blank) ++loc;
  return loc;
}

std::vector<std::string> public_top_level_types(std::string_view src) {
  std::vector<std::string> names;
  std::vector<Token> toks = tokenize(src);
  std::erase_if(toks, [](const Token& t) { return t.is_comment(); });
  int depth = 0;
  bool saw_public = false;
  for (std::size_t k = 0; k < toks.size(); ++k) {
    const std::string_view text = toks[k].text(src);
    if (toks[k].kind == TokenKind::Punct) {
      if (text == "{") ++depth;
      if (text == "}") --depth;
      if (text == ";" || text == "{" || text == "}") saw_public = false;
      continue;
    }
    if (depth != 0 || toks[k].kind != TokenKind::Identifier) continue;
    if (text == "public") {
      saw_public = true;
      continue;
    }
    const bool type_kw = text == "class" || text == "interface" ||
                         text == "enum" || text == "record";
    if (type_kw && saw_public && k + 1 < toks.size() &&
        toks[k + 1].kind == TokenKind::Identifier) {
      names.emplace_back(toks[k + 1].text(src));
      saw_public = false;
    }
  }
  return names;
}

std::string package_name(std::string_view src) {
  std::vector<Token> toks = tokenize(src);
  std::erase_if(toks, [](const Token& t) { return t.is_comment(); });
  // Annotations may precede the package keyword (package-info style).
  for (std::size_t k = 0; k < toks.size(); ++k) {
    if (toks[k].kind != TokenKind::Identifier) continue;
    const std::string_view text = toks[k].text(src);
    if (text != "package") {
      if (text == "import" || text == "class" || text == "interface" ||
          text == "enum" || text == "record" || text == "public") {
        return {};
      }
      continue;
    }
    std::string name;
    for (std::size_t j = k + 1; j < toks.size(); ++j) {
      const std::string_view part = toks[j].text(src);
      if (part == ";") break;
      name += part;
    }
    return name;
  }
  return {};
}

}  // namespace reforacle::java
