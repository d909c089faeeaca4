#include "reforacle/unified_diff.hpp"

#include <algorithm>
#include <vector>

namespace reforacle {

namespace {

// Lines keep their terminating newline so that a missing final newline is a
// real difference.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    end = end == std::string_view::npos ? text.size() : end + 1;
    lines.push_back(text.substr(pos, end - pos));
    pos = end;
  }
  return lines;
}

enum class OpKind { Equal, Delete, Insert };

struct Op {
  OpKind kind;
  std::size_t a;  // index into a (Equal/Delete)
  std::size_t b;  // index into b (Equal/Insert)
};

std::vector<Op> edit_script(const std::vector<std::string_view>& a,
                            const std::vector<std::string_view>& b) {
  std::size_t prefix = 0;
  while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  std::size_t suffix = 0;
  while (suffix < a.size() - prefix && suffix < b.size() - prefix &&
         a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix]) {
    ++suffix;
  }
  const std::size_t n = a.size() - prefix - suffix;
  const std::size_t m = b.size() - prefix - suffix;

  // lcs[i][j]: LCS length of a[prefix+i..] and b[prefix+j..] within the middle.
  std::vector<std::uint32_t> lcs((n + 1) * (m + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return lcs[i * (m + 1) + j]; };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      at(i, j) = a[prefix + i] == b[prefix + j] ? at(i + 1, j + 1) + 1
                                                : std::max(at(i + 1, j), at(i, j + 1));
    }
  }

  std::vector<Op> ops;
  for (std::size_t k = 0; k < prefix; ++k) ops.push_back({OpKind::Equal, k, k});
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[prefix + i] == b[prefix + j]) {
      ops.push_back({OpKind::Equal, prefix + i, prefix + j});
      ++i;
      ++j;
    } else if (j == m || (i < n && at(i + 1, j) >= at(i, j + 1))) {
      ops.push_back({OpKind::Delete, prefix + i, prefix + j});
      ++i;
    } else {
      ops.push_back({OpKind::Insert, prefix + i, prefix + j});
      ++j;
    }
  }
  for (std::size_t k = 0; k < suffix; ++k) {
    ops.push_back({OpKind::Equal, prefix + n + k, prefix + m + k});
  }
  return ops;
}

void emit_line(std::string& out, char mark, std::string_view line) {
  out += mark;
  if (!line.empty() && line.back() == '\n') {
    out += line;
  } else {
    out += line;
    out += "\n\\ No newline at end of file\n";
  }
}

std::string range(std::size_t start, std::size_t count) {
  // Unified diff convention: an empty range names the line before it.
  std::string s = std::to_string(count == 0 ? start : start + 1);
  if (count != 1) s += "," + std::to_string(count);
  return s;
}

}  // namespace

std::string unified_diff(std::string_view path, std::string_view before,
                         std::string_view after, int context) {
  if (before == after) return {};
  const auto a = split_lines(before);
  const auto b = split_lines(after);
  const std::vector<Op> ops = edit_script(a, b);
  const std::size_t ctx = static_cast<std::size_t>(std::max(0, context));

  std::string out;
  out += before.empty() ? std::string("--- /dev/null\n") : "--- a/" + std::string(path) + "\n";
  out += after.empty() ? std::string("+++ /dev/null\n") : "+++ b/" + std::string(path) + "\n";

  std::size_t k = 0;
  while (k < ops.size()) {
    while (k < ops.size() && ops[k].kind == OpKind::Equal) ++k;
    if (k == ops.size()) break;
    const std::size_t begin = k >= ctx ? k - ctx : 0;
    std::size_t last_change = k;
    std::size_t scan = k;
    while (scan < ops.size()) {
      if (ops[scan].kind != OpKind::Equal) {
        last_change = scan;
        ++scan;
        continue;
      }
      std::size_t run_end = scan;
      while (run_end < ops.size() && ops[run_end].kind == OpKind::Equal) ++run_end;
      if (run_end == ops.size() || run_end - scan > 2 * ctx) break;
      scan = run_end;
    }
    const std::size_t end = std::min(ops.size(), last_change + ctx + 1);

    std::size_t a_count = 0;
    std::size_t b_count = 0;
    for (std::size_t t = begin; t < end; ++t) {
      if (ops[t].kind != OpKind::Insert) ++a_count;
      if (ops[t].kind != OpKind::Delete) ++b_count;
    }
    out += "@@ -" + range(ops[begin].a, a_count) + " +" + range(ops[begin].b, b_count) + " @@\n";
    for (std::size_t t = begin; t < end; ++t) {
      switch (ops[t].kind) {
        case OpKind::Equal: emit_line(out, ' ', a[ops[t].a]); break;
        case OpKind::Delete: emit_line(out, '-', a[ops[t].a]); break;
        case OpKind::Insert: emit_line(out, '+', b[ops[t].b]); break;
      }
    }
    k = end;
  }
  return out;
}

std::string unified_diff(const SourceSet& before, const SourceSet& after, int context) {
  std::vector<std::string> paths;
  for (const SourceFile& f : before.files) paths.push_back(f.path);
  for (const SourceFile& f : after.files) {
    if (!before.find(f.path)) paths.push_back(f.path);
  }
  std::string out;
  for (const std::string& p : paths) {
    const SourceFile* x = before.find(p);
    const SourceFile* y = after.find(p);
    out += unified_diff(p, x ? std::string_view(x->content) : std::string_view(),
                        y ? std::string_view(y->content) : std::string_view(), context);
  }
  return out;
}

}  // namespace reforacle
