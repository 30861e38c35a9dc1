#pragma once

// Counter-based random streams.
//
// Every random number in the library is a pure function of
// (master seed, stream id, position). The generator is Philox4x32-10: the
// 64-bit seed is the key, the 128-bit counter is (position, stream id).
// Trials own disjoint stream ids, so results never depend on the order in
// which trials are scheduled or on the number of workers.

#include <array>
#include <cstdint>

namespace anderson {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
Philox4x32Counter philox4x32_10(Philox4x32Counter ctr, Philox4x32Key key) noexcept;

/// Sequential view of one stream. Cheap to construct; copying it forks the
/// position.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// 64 uniformly distributed bits.
  std::uint64_t next_u64() noexcept {
    if (lane_ == 2) refill();
    return buffer_[lane_++];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  /// Jumps to the position-th 64-bit output of the stream.
  void seek(std::uint64_t position) noexcept {
    block_ = position / 2;
    refill();
    lane_ = static_cast<int>(position % 2);
  }

private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int lane_ = 2;
};

/// Stream-id namespaces so that different consumers inside one experiment
/// never share a stream.
namespace streams {
constexpr std::uint64_t kPotential = 0;
constexpr std::uint64_t kInverseIteration = 1ULL << 60;

/// Stream id for trial `trial` of purpose `purpose` (purpose < 2^12).
constexpr std::uint64_t trial(std::uint64_t purpose, std::uint64_t trial) noexcept {
  return (purpose << 48) | trial;
}
}  // namespace streams

}  // namespace anderson
