#pragma once

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "reforacle/source_set.hpp"

namespace reforacle::mt {

class ScanError : public std::runtime_error {
 public:
  enum class Kind { UnbalancedBraces, UnterminatedLiteral };
  ScanError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

enum class TypeKind { Class, Interface, Enum, Record, Annotation };

struct TypeSpan {
  std::string name;
  TypeKind kind = TypeKind::Class;
  std::size_t open_brace = 0;   // offset of '{'
  std::size_t close_brace = 0;  // offset of the matching '}'
  int depth = 0;                // 0 for top-level types
};

/// A place where text may be inserted. When `line_start` is set the offset
/// is the first byte of a line and inserted text should be whole lines.
struct InsertionPoint {
  std::size_t offset = 0;
  bool line_start = false;
  std::string indent;  // indentation for inserted lines
  std::string owner;   // enclosing type name (empty for file-level points)
  TypeKind owner_kind = TypeKind::Class;
};

struct FileIndex {
  std::string path;
  std::vector<TypeSpan> types;
  /// Just inside the body of each class or interface.
  std::vector<InsertionPoint> member_points;
  /// Just inside the body of each method (constructors excluded).
  std::vector<InsertionPoint> body_points;
  /// After the package declaration, or at the start of the file.
  InsertionPoint import_point;
  /// Line starts outside block comments and text blocks.
  std::vector<std::size_t> line_boundaries;
};

struct StructuralIndex {
  std::vector<FileIndex> files;
  /// Every non-keyword identifier of the program.
  std::set<std::string> identifiers;

  std::size_t type_count() const;
};

/// Lexical scan of every file: tracks comments, literals and brace depth and
/// recognizes type and method headers.
StructuralIndex index_structure(const SourceSet& src);

}  // namespace reforacle::mt
