#include "gdfl/rng.hpp"

#include <cmath>

#include "gdfl/error.hpp"

namespace gdfl {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

uint64_t mix_seed(uint64_t base, uint64_t a, uint64_t b, uint64_t c) {
  uint64_t h = splitmix64(base);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  return h;
}

uint64_t Rng::below(uint64_t n) {
  if (n == 0) fail(ErrorKind::InvalidArgs, "Rng::below: n must be positive");
  if (n == 1) return 0;
  const uint64_t bound = UINT64_MAX - UINT64_MAX % n;
  uint64_t x = next_u64();
  while (x >= bound) x = next_u64();
  return x % n;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

double Rng::gamma(double alpha) {
  if (!(alpha > 0.0)) fail(ErrorKind::InvalidArgs, "gamma: alpha must be positive");
  if (alpha < 1.0) {
    // boost: Gamma(a) = Gamma(a+1) * U^(1/a)
    const double g = gamma(alpha + 1.0);
    const double u = uniform_open();
    return g * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::vector<double> Rng::dirichlet(double alpha, size_t k) {
  std::vector<double> p(k);
  double sum = 0.0;
  for (size_t i = 0; i < k; ++i) {
    p[i] = gamma(alpha);
    sum += p[i];
  }
  // gamma(alpha<1) can underflow to 0 for extreme skew; keep a valid simplex
  if (sum <= 0.0) {
    for (auto& v : p) v = 1.0 / static_cast<double>(k);
    return p;
  }
  for (auto& v : p) v /= sum;
  return p;
}

}  // namespace gdfl
