#include "pdmp/rng.hpp"

#include <cmath>

#include "pdmp/error.hpp"

namespace pdmp {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
  if (stream_id > kMaxStreamId) throw Error(Errc::ConfigInvalid, "stream id out of range");
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id, bool) : seed_(seed), stream_id_(stream_id) {}

RngStream RngStream::substream(Lane lane) const {
  const std::uint64_t base = stream_id_ & kMaxStreamId;
  const std::uint64_t tag = static_cast<std::uint64_t>(static_cast<std::uint8_t>(lane)) + 1;
  return RngStream(seed_, base | (tag << 56), true);
}

std::uint64_t RngStream::next_u64() noexcept {
  if (used_ + 2 > 4) {
    buffer_ = philox4x32_10({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                             static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)},
                            {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    ++block_;
    used_ = 0;
  }
  const std::uint64_t v = (static_cast<std::uint64_t>(buffer_[used_]) << 32) | buffer_[used_ + 1];
  used_ += 2;
  return v;
}

double RngStream::uniform() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

std::size_t RngStream::discrete(std::span<const double> weights) noexcept {
  double total = 0.0;
  for (const double w : weights) total += w;
  const double target = uniform() * total;
  double cum = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = i;
    cum += weights[i];
    if (target < cum) return i;
  }
  return last;
}

}  // namespace pdmp
