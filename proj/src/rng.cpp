#include "mvcca/rng.hpp"

#include <cmath>
#include <numbers>

namespace mvcca {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

SplitRng::SplitRng(std::uint64_t seed) : key_(mix64(seed ^ kGolden)) {}

SplitRng SplitRng::substream(std::string_view label) const {
  SplitRng child(0);
  child.key_ = mix64(key_ ^ fnv1a(label));
  child.counter_ = 0;
  child.has_cached_gaussian_ = false;
  return child;
}

SplitRng SplitRng::substream(std::uint64_t index) const {
  SplitRng child(0);
  child.key_ = mix64(key_ + kGolden * (index + 1));
  child.counter_ = 0;
  child.has_cached_gaussian_ = false;
  return child;
}

std::uint64_t SplitRng::next_u64() {
  ++counter_;
  return mix64(key_ + kGolden * counter_);
}

double SplitRng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SplitRng::next_uniform(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

double SplitRng::next_gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  // u1 in (0, 1] so the log is finite.
  const double u1 =
      (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = next_double();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_gaussian_ = radius * std::sin(angle);
  has_cached_gaussian_ = true;
  return radius * std::cos(angle);
}

std::uint64_t SplitRng::next_below(std::uint64_t n) {
  // Lemire's multiply-shift rejection sampler: unbiased and branch-light.
  const std::uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (lo < threshold) {
      m = static_cast<__uint128_t>(next_u64()) * n;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace mvcca
