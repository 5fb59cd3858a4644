// Seedable RNG wrapper. One Rng per chain/worker; streams derived from a base
// seed via splitmix so replicate cells stay independent and reproducible.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mgrf {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives the seed for stream `stream` of a run seeded with `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 1));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Gamma(shape, scale); mean = shape * scale.
  double gamma(double shape, double scale) {
    std::gamma_distribution<double> g(shape, scale);
    return g(engine_);
  }

  // InverseGamma(shape, rate): 1/x ~ Gamma(shape, 1/rate).
  double inverse_gamma(double shape, double rate) {
    double g = gamma(shape, 1.0 / rate);
    return 1.0 / g;
  }

  double chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }

  // Scalar Student-t scale mixing factor for a multivariate-t proposal.
  double t_scale(double dof) { return std::sqrt(dof / chi_squared(dof)); }

  std::uint64_t raw() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace mgrf
