#include "reforacle/source_set.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "reforacle/hash.hpp"

namespace fs = std::filesystem;

namespace reforacle {

std::string SourceSet::canonical_bytes() const {
  std::string out;
  for (const SourceFile& f : files) {
    out += f.path;
    out.push_back('\0');
    out += std::to_string(f.content.size());
    out.push_back('\0');
    out += f.content;
  }
  return out;
}

std::string SourceSet::content_hash() const { return sha256_hex(canonical_bytes()); }

std::string SourceSet::joined() const {
  std::string out;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (i > 0) {
      if (!out.empty() && out.back() != '\n') out.push_back('\n');
      out.push_back('\n');
    }
    out += files[i].content;
  }
  return out;
}

const SourceFile* SourceSet::find(std::string_view path) const {
  for (const SourceFile& f : files) {
    if (f.path == path) return &f;
  }
  return nullptr;
}

void validate_source_set(const SourceSet& set) {
  std::set<std::string> seen;
  for (const SourceFile& f : set.files) {
    if (!f.path.ends_with(".java")) {
      throw SourceSetError("source path does not end in .java: " + f.path);
    }
    if (!seen.insert(f.path).second) {
      throw SourceSetError("duplicate source path: " + f.path);
    }
    if (f.content.empty()) {
      throw SourceSetError("empty source file: " + f.path);
    }
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

SourceSet read_source_tree(const fs::path& dir) {
  SourceSet set;
  if (!fs::is_directory(dir)) return set;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".java") continue;
    set.files.push_back({fs::relative(entry.path(), dir).generic_string(),
                         read_file(entry.path())});
  }
  std::sort(set.files.begin(), set.files.end(),
            [](const SourceFile& a, const SourceFile& b) { return a.path < b.path; });
  return set;
}

void write_source_tree(const SourceSet& set, const fs::path& dir) {
  for (const SourceFile& f : set.files) write_file(dir / f.path, f.content);
}

}  // namespace reforacle
