#pragma once

#include <cstdint>

namespace karlin {

/// Seeded, splittable deterministic random stream.
///
/// Every sampler in this library draws only from a stream handed to it, so a
/// fixed (seed, stream_id) pair reproduces every draw sequence bit-exactly,
/// independent of thread scheduling. Substreams derived from distinct ids are
/// far apart in the underlying sequence and statistically independent for all
/// practical purposes.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}

  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {
    state_ = mix(mix(seed + kGolden) ^ mix(stream_id * kGolden + 0x1d8e4e27c47d124full));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// New stream keyed off this stream's identity; does not consume draws.
  RngStream substream(std::uint64_t id) const {
    return RngStream(seed_, mix(stream_id_ + kGolden) ^ mix(id + 0x94d049bb133111ebull));
  }

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1); never returns exactly 0.
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_;
};

}  // namespace karlin
