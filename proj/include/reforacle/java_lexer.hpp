#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace reforacle::java {

enum class TokenKind {
  Identifier,  // includes keywords; see is_keyword()
  Number,
  String,
  Char,
  TextBlock,
  Punct,
  LineComment,
  BlockComment,
};

struct Token {
  TokenKind kind;
  std::size_t offset;
  std::size_t length;
  int line;  // 1-based line of the first character

  std::string_view text(std::string_view src) const {
    return src.substr(offset, length);
  }
  bool is_comment() const {
    return kind == TokenKind::LineComment || kind == TokenKind::BlockComment;
  }
};

class LexError : public std::runtime_error {
 public:
  enum class Kind { UnterminatedLiteral, UnterminatedComment };
  LexError(Kind kind, int line, const std::string& what)
      : std::runtime_error(what), kind_(kind), line_(line) {}
  Kind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

/// Lexes Java source into tokens, comments included. Whitespace is dropped.
/// Multi-character punctuation is limited to `->`, `::` and `...`.
std::vector<Token> tokenize(std::string_view src);

bool is_keyword(std::string_view word);

/// Source with every comment replaced by spaces; newlines are preserved so
/// line numbers stay valid.
std::string strip_comments(std::string_view src);

/// Non-blank lines once comments are removed.
int count_loc(std::string_view src);

/// Top-level `public` class/interface/enum/record names, in order.
std::vector<std::string> public_top_level_types(std::string_view src);

/// Name declared by the `package` statement, empty for the default package.
std::string package_name(std::string_view src);

}  // namespace reforacle::java
