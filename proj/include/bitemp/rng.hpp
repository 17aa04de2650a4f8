#ifndef BITEMP_RNG_HPP_
#define BITEMP_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace bitemp {

// Seeded generator with fully specified output streams. std::mt19937_64 is
// pinned by the standard; the uniform/normal transforms below avoid
// std::uniform_real_distribution and friends, whose output is
// implementation-defined. Experiment reports must be byte-identical across
// runs, so every random draw in the library goes through this class.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Uniform integer in [0, n), n > 0. Rejection sampling keeps it unbiased.
  std::uint64_t integer(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = gen_();
    while (x >= limit) x = gen_();
    return x % n;
  }

  /// Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[integer(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent child seed from a parent seed and a stream index
/// (splitmix64 finalizer over the combined value).
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
  std::uint64_t z = parent + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace bitemp

#endif  // BITEMP_RNG_HPP_
