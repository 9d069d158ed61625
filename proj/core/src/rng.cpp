#include "casefit/rng.hpp"

#include "casefit/distributions.hpp"

namespace casefit {

namespace {

// SplitMix64 finalizer (Stafford mix 13): full-avalanche 64-bit bijection.
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::word(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  // absorb each coordinate with a distinct additive constant, mixing between
  std::uint64_t h = mix(seed + 0x9E3779B97F4A7C15ull);
  h = mix(h ^ (stream + 0xD1B54A32D192ED03ull));
  h = mix(h ^ (counter + 0x8CB92BA72F3D8DD7ull));
  return h;
}

double CounterRng::next_uniform() {
  // 53-bit mantissa, offset by half a grid step so 0 and 1 are unreachable
  const std::uint64_t bits = next_u64() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_normal() { return inverse_normal_cdf(next_uniform()); }

Vector CounterRng::normal_vector(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = next_normal();
  return v;
}

}  // namespace casefit
