#include "mgrf/pc_prior.hpp"

#include <algorithm>
#include <cmath>

namespace mgrf {

namespace {
constexpr double kBaseTol = 1e-12;
}

double pc_distance(int w, double rho) {
  const double wm1 = static_cast<double>(w - 1);
  if (std::abs(rho) < 1e-5) {
    // -log R = w(w-1)/2 rho^2 (1 - 2(w-2)/3 rho + O(rho^2))
    double lead = 0.5 * w * wm1 * rho * rho;
    double corr = 1.0 - (2.0 * (w - 2) / 3.0) * rho;
    return std::sqrt(lead * std::max(corr, 0.0));
  }
  double neg_lr = -(std::log1p(wm1 * rho) + wm1 * std::log1p(-rho));
  return std::sqrt(std::max(neg_lr, 0.0));
}

double pc_log_density(const PcRhoPrior& prior, double rho) {
  if (rho <= prior.support_lo() || rho >= prior.support_hi()) throw OutOfSupport(rho);
  if (std::abs(rho) < kBaseTol) throw AtBaseModel();
  const double wm1 = static_cast<double>(prior.w - 1);
  const double d = pc_distance(prior.w, rho);
  // |dlogR/drho| = w(w-1)|rho| / ((1+(w-1)rho)(1-rho)), exact for all rho
  const double abs_lr_prime =
      prior.w * wm1 * std::abs(rho) / ((1.0 + wm1 * rho) * (1.0 - rho));
  // p = 1/2 * lambda e^{-lambda d} * |d'|,  |d'| = |logR'| / (2 d)
  return std::log(prior.lambda) + std::log(abs_lr_prime) - std::log(4.0) - std::log(d) -
         prior.lambda * d;
}

double pc_calibrate_lambda(int w, double U, double a) {
  if (!(U > 0.0 && U < 1.0)) throw NoSolution("U must lie in (0, 1)");
  if (!(a > 0.0 && a < 1.0)) throw NoSolution("a must lie in (0, 1)");
  const double lo_support = -1.0 / (w - 1);
  const double d_pos = pc_distance(w, U);
  const bool neg_reachable = -U > lo_support;
  const double d_neg = neg_reachable ? pc_distance(w, -U) : 0.0;
  auto tail = [&](double lambda) {
    double t = 0.5 * std::exp(-lambda * d_pos);
    if (neg_reachable) t += 0.5 * std::exp(-lambda * d_neg);
    return t;
  };
  // tail(0) = 1 (or 1/2 when -U falls outside the support)
  if (tail(0.0) <= a) throw NoSolution("requested tail mass unreachable for this U, w");
  double lo = 0.0, hi = 1.0;
  while (tail(hi) > a) {
    hi *= 2.0;
    if (hi > 1e12) throw NoSolution("tail equation did not bracket");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (tail(mid) > a)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

// monotone table of (d, rho) on one branch, clustered toward the support
// edge where d diverges
void build_branch(int w, double edge, std::vector<double>& ds, std::vector<double>& rhos) {
  const int n_grid = 512;
  ds.clear();
  rhos.clear();
  ds.reserve(n_grid);
  rhos.reserve(n_grid);
  for (int k = 1; k <= n_grid; ++k) {
    double frac = static_cast<double>(k) / n_grid;  // (0, 1]
    double rho = edge * (1.0 - std::pow(10.0, -9.0 * frac));
    ds.push_back(pc_distance(w, rho));
    rhos.push_back(rho);
  }
}

double invert_branch(int w, double edge, const std::vector<double>& ds,
                     const std::vector<double>& rhos, double d_target) {
  double a = 0.0, b;  // bracket between the base model and the edge
  if (d_target <= ds.front()) {
    b = rhos.front();
  } else {
    auto it = std::lower_bound(ds.begin(), ds.end(), d_target);
    if (it == ds.end()) return rhos.back();
    std::size_t hi = static_cast<std::size_t>(it - ds.begin());
    a = hi == 0 ? 0.0 : rhos[hi - 1];
    b = rhos[hi];
  }
  for (int k = 0; k < 50; ++k) {
    double mid = 0.5 * (a + b);
    if (pc_distance(w, mid) < d_target)
      a = mid;
    else
      b = mid;
  }
  (void)edge;
  return 0.5 * (a + b);
}

}  // namespace

PcRhoPrior make_pc_prior(int w, double U, double a) {
  if (w < 2) throw NoSolution("w must be at least 2");
  PcRhoPrior prior;
  prior.w = w;
  prior.U = U;
  prior.a = a;
  prior.lambda = pc_calibrate_lambda(w, U, a);
  build_branch(w, prior.support_hi(), prior.d_pos, prior.rho_pos);
  build_branch(w, prior.support_lo(), prior.d_neg, prior.rho_neg);
  return prior;
}

double pc_sample(const PcRhoPrior& prior, Rng& rng) {
  const bool positive = rng.uniform() < 0.5;
  const double e = -std::log(rng.uniform()) / prior.lambda;  // Exp(lambda) distance
  if (positive) return invert_branch(prior.w, 1.0, prior.d_pos, prior.rho_pos, e);
  return invert_branch(prior.w, prior.support_lo(), prior.d_neg, prior.rho_neg, e);
}

double fisher_z(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) throw OutOfSupport(rho);
  return std::log((1.0 + rho) / (1.0 - rho));
}

double fisher_z_inv(double rho_star) {
  // tanh(rho*/2), written to stay finite for large |rho*|
  return std::tanh(0.5 * rho_star);
}

double fisher_log_jacobian(double rho_star) {
  // d rho / d rho* = 2 e^{rho*} / (1 + e^{rho*})^2
  return std::log(2.0) + rho_star - 2.0 * std::log1p(std::exp(rho_star));
}

}  // namespace mgrf
