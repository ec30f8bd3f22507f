#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace rcs {

// SplitMix64 finalizer; used for key derivation and stream-id hashing.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Stream id for replication `rep` of experiment `experiment`.
std::uint64_t stream_id_for(std::uint64_t experiment, std::uint64_t rep) noexcept;

// Stable 64-bit hash of a name, for turning experiment kinds into ids.
std::uint64_t hash_name(const char* name) noexcept;

// Counter-based random stream (Philox4x32-10). The key is derived from
// (seed, stream_id); draws come from encrypting an incrementing counter, so
// identical (seed, stream_id) pairs reproduce identical sequences and
// distinct stream ids are independent. Satisfies UniformRandomBitGenerator.
//
// A stream is single-consumer; give each replication its own.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform on (0, 1]; safe for log().
  double uniform_pos() noexcept;
  // +1 or -1 with probability 1/2 each.
  int rademacher() noexcept;

  // Child stream keyed by `tag`; independent of the parent and of siblings.
  RngStream split(std::uint64_t tag) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> block_{};
  int next_ = 4;
};

}  // namespace rcs
