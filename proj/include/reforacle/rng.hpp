#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace reforacle {

/// Philox4x32-10 block function. Stateless; output depends only on
/// (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream. Each stream is identified by a 64-bit key;
/// draws walk the counter. Streams for distinct keys are independent, so
/// per-instance streams do not depend on iteration order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  /// Stream keyed by `(seed, tag)`, e.g. (master seed, instance id).
  static CounterRng derive(std::uint64_t seed, std::string_view tag);

  std::uint64_t key() const { return key_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t uniform(std::uint64_t bound);

  /// Independent child stream; does not advance this stream.
  CounterRng split(std::string_view tag) const;

 private:
  std::uint64_t key_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int available_ = 0;
};

}  // namespace reforacle
