#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace reforacle {

/// Lowercase hex SHA-256 digest of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// 64-bit FNV-1a. Stable across platforms; used for seed derivation only.
std::uint64_t fnv1a64(std::string_view bytes);

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace reforacle
