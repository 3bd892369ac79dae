#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace einst {

// Seeded random source. Only the raw mt19937_64 stream (fully specified by
// the standard) is consumed, so samples are identical across standard
// library implementations; std::uniform_int_distribution and std::shuffle
// are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  // Independent stream for a sub-task. Depends only on the original seed
  // and the stream id, never on how much of this stream was consumed.
  Rng derive(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

  // k distinct indices drawn uniformly from [0, n), in draw order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace einst
