#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace pdmp {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Pure: the output depends only on counter and key.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

// Sub-stream lanes used by the process simulators. A simulation driven by one
// RngStream draws each kind of randomness from its own lane so that coupled
// simulations consume identical draws for the shared parts.
enum class Lane : std::uint8_t {
  Switching = 0,
  Overshoot = 1,
  JumpTarget = 2,
  Initial = 3,
};

/// Counter-based stream keyed by (seed, stream_id). The key is the seed; the
/// upper half of the Philox counter is the stream id, the lower half counts
/// blocks. Streams with distinct ids never share a counter value.
class RngStream {
 public:
  // Stream ids at or above this bound are reserved for sub-stream lanes.
  static constexpr std::uint64_t kMaxStreamId = (std::uint64_t{1} << 56) - 1;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Independent stream for one lane, starting at block 0.
  RngStream substream(Lane lane) const;

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0,1), 53-bit resolution.
  double uniform() noexcept;
  /// Exponential with the given rate (mean 1/rate); strictly positive.
  double exponential(double rate) noexcept;
  /// Index drawn with probability proportional to weights (all >= 0).
  std::size_t discrete(std::span<const double> weights) noexcept;

 private:
  RngStream(std::uint64_t seed, std::uint64_t stream_id, bool);

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned used_ = 4;  // 32-bit words consumed from buffer_
};

}  // namespace pdmp
