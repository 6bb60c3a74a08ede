#pragma once

#include <cstdint>
#include <random>

namespace drag {

/// Reproducible random stream identified by (seed, stream_id).
///
/// The engine is std::mt19937_64 seeded through std::seed_seq with the four
/// 32-bit halves of seed and stream_id; both algorithms are fully specified by
/// the C++ standard, so sequences are bit-identical across platforms. Uniform
/// and Gaussian variates are derived here rather than through the
/// implementation-defined <random> distributions for the same reason.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal variate (Box-Muller, pairs cached).
  double normal();
  std::uint64_t next_u64() { return engine_(); }

  /// Independent child stream; children of distinct (stream_id, index) pairs
  /// never share a stream id with high probability.
  RngStream split(std::uint64_t index) const;

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace drag
