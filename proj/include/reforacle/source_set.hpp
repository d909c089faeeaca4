#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace reforacle {

struct SourceFile {
  std::string path;  // relative, '/'-separated
  std::string content;

  bool operator==(const SourceFile&) const = default;
};

/// An ordered set of Java compilation units forming one program version.
struct SourceSet {
  std::vector<SourceFile> files;

  bool empty() const { return files.empty(); }
  bool operator==(const SourceSet&) const = default;

  /// Unambiguous byte serialization; the basis of content hashes.
  std::string canonical_bytes() const;
  std::string content_hash() const;

  /// All files concatenated in order, separated by a blank line. Used as the
  /// prompt payload for multi-file programs.
  std::string joined() const;

  const SourceFile* find(std::string_view path) const;
};

class SourceSetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checks the invariants: paths unique, every path ends in ".java", every
/// content non-empty. Throws SourceSetError.
void validate_source_set(const SourceSet& set);

/// Reads every `*.java` file below `dir`, sorted by relative path.
SourceSet read_source_tree(const std::filesystem::path& dir);

/// Writes every file of `set` below `dir`, creating parent directories.
void write_source_tree(const SourceSet& set, const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace reforacle
