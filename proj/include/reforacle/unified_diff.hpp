#pragma once

#include <string>
#include <string_view>

#include "reforacle/source_set.hpp"

namespace reforacle {

/// Unified diff of one file (`--- a/<path>` / `+++ b/<path>` headers).
/// Returns an empty string when the texts are equal. An empty `before` or
/// `after` is rendered against /dev/null.
std::string unified_diff(std::string_view path, std::string_view before,
                         std::string_view after, int context = 3);

/// Concatenated per-file diffs, files in order of first appearance
/// (original order, then files only present in `after`).
std::string unified_diff(const SourceSet& before, const SourceSet& after, int context = 3);

}  // namespace reforacle
