#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gdfl {

/// splitmix64 finalizer; combines a base seed with up to three stream tags so
/// every (purpose, round, node) gets an independent deterministic stream.
uint64_t mix_seed(uint64_t base, uint64_t a = 0, uint64_t b = 0, uint64_t c = 0);

/// mt19937_64 with hand-rolled distributions. The standard specifies the
/// engine bit-for-bit but not the distributions, so we implement uniform,
/// normal, gamma and Dirichlet sampling ourselves to keep runs reproducible
/// across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1]; safe as a log argument.
  double uniform_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n) by rejection.
  uint64_t below(uint64_t n);

  /// Standard normal via Box-Muller, one spare cached.
  double normal();

  /// Gamma(alpha, 1) via Marsaglia-Tsang, boosted for alpha < 1.
  double gamma(double alpha);

  /// Symmetric Dirichlet(alpha * 1_k).
  std::vector<double> dirichlet(double alpha, size_t k);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gdfl
