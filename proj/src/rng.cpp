#include "rcs/rng.hpp"

namespace rcs {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t stream_id_for(std::uint64_t experiment, std::uint64_t rep) noexcept {
  return mix64(mix64(experiment) ^ (rep * 0xD6E8FEB86659FD93ull + 1));
}

std::uint64_t hash_name(const char* name) noexcept {
  // FNV-1a
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (; *name != '\0'; ++name) {
    h ^= static_cast<unsigned char>(*name);
    h *= 0x100000001B3ull;
  }
  return h;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : seed_(seed), stream_id_(stream_id) {
  const std::uint64_t k = mix64(seed ^ mix64(stream_id));
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  // The high counter words carry the stream id so that two streams whose
  // derived keys collide still produce distinct blocks.
  counter_ = {0, 0, static_cast<std::uint32_t>(stream_id),
              static_cast<std::uint32_t>(stream_id >> 32)};
}

void RngStream::refill() noexcept {
  block_ = philox4x32_10(counter_, key_);
  if (++counter_[0] == 0) ++counter_[1];
  next_ = 0;
}

RngStream::result_type RngStream::operator()() noexcept {
  if (next_ > 2) refill();
  const std::uint64_t v = (static_cast<std::uint64_t>(block_[next_]) << 32) |
                          block_[next_ + 1];
  next_ += 2;
  return v;
}

double RngStream::uniform() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_pos() noexcept {
  return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
}

int RngStream::rademacher() noexcept { return ((*this)() >> 63) ? 1 : -1; }

RngStream RngStream::split(std::uint64_t tag) const noexcept {
  return RngStream(seed_, mix64(stream_id_ ^ mix64(tag + 0x632BE59BD9B4E019ull)));
}

}  // namespace rcs
