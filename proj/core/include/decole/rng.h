#ifndef DECOLE_RNG_H_
#define DECOLE_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace decole {

// Portable random source. Every draw is defined here in terms of raw 64-bit
// outputs of std::mt19937_64, whose sequence is fixed by the C++ standard, so
// the same seed reproduces the same stream on any conforming platform. The
// <random> distributions are deliberately not used: their algorithms are
// implementation-defined.
//
//   Uniform01()    (x >> 11) * 2^-53, in [0, 1)
//   UniformInt(m)  Lemire's multiply-shift with rejection, in [0, m)
//   Normal()       Box-Muller on two Uniform01 draws; the sine branch is
//                  cached and returned by the next call
//   Shuffle()      Fisher-Yates from the back using UniformInt
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  double Uniform01();
  std::uint64_t UniformInt(std::uint64_t bound);
  double Normal();
  double Normal(double mean, double sd) { return mean + sd * Normal(); }

  template <typename T>
  void Shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = UniformInt(i);
      std::swap(values[i - 1], values[j]);
    }
  }

  // k distinct indices from [0, n), uniformly, in selection order.
  std::vector<std::size_t> SampleWithoutReplacement(std::size_t n,
                                                    std::size_t k);

 private:
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

std::uint64_t SplitMix64(std::uint64_t x);
std::uint64_t Fnv1a64(std::string_view bytes);

// Substream seed for a labelled stage. Stages with different labels get
// statistically independent streams, so adding a stage never shifts the
// randomness of another.
//   DeriveSeed(s, label) = SplitMix64(s ^ Fnv1a64(label))
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view label);
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view label,
                         std::uint64_t index);

}  // namespace decole

#endif  // DECOLE_RNG_H_
