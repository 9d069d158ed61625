#pragma once

#include <cstdint>

#include "casefit/types.hpp"

namespace casefit {

/// Counter-based random stream. Every draw is a pure function of
/// (seed, stream, counter): three 64-bit words absorbed through chained
/// SplitMix64 finalizer rounds. Streams are stateless, so distinct stream
/// ids can never overlap and any draw can be replayed from its coordinates.
///
/// Normal deviates come from the inverse normal CDF applied to a 53-bit
/// uniform in (0,1). Both the mixing constants and the transform are part
/// of the reproducibility contract and must not change.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64() { return word(seed_, stream_, counter_++); }

  /// Uniform on the open interval (0,1) with 53 significant bits.
  double next_uniform();

  double next_normal();

  Vector normal_vector(Index n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Stateless draw: the t-th word of stream `stream` under `seed`.
  static std::uint64_t word(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace casefit
