#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace mvcca {

// Splittable counter-based generator. Output i of a stream is
// mix64(key + i * GOLDEN), the splitmix64 finalizer over an affine counter,
// so a stream is a pure function of (key, position). Substreams derive a new
// key by hashing a label or index into the parent key; datasets generated
// from named substreams are therefore reproducible regardless of generation
// order or parallelism.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed);

  SplitRng substream(std::string_view label) const;
  SplitRng substream(std::uint64_t index) const;

  std::uint64_t next_u64();
  // Uniform in [0, 1), 53-bit resolution.
  double next_double();
  double next_uniform(double lo, double hi);
  // Standard normal via Box-Muller; draws two u64 per pair, caches the
  // second value.
  double next_gaussian();
  // Uniform integer in [0, n), n >= 1.
  std::uint64_t next_below(std::uint64_t n);

  // Deterministic Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_cached_gaussian_ = false;
  double cached_gaussian_ = 0.0;
};

}  // namespace mvcca
