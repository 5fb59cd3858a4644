// Penalized-complexity prior on the confounding correlation rho, with base
// model rho = 0 and support (-1/(w-1), 1). The distance from the base model
// is d(rho) = sqrt(-log R(rho)) with R(rho) = (1 + (w-1) rho)(1 - rho)^{w-1};
// d is exponentially penalized at rate lambda and each side of the base model
// carries half the mass, so the density integrates to one and the scaling
// equation Prob(|rho| > U) = a has the closed form
// a = (exp(-lambda d(U)) + exp(-lambda d(-U))) / 2.
#pragma once

#include "mgrf/rng.hpp"
#include "mgrf/types.hpp"

#include <vector>

namespace mgrf {

struct PcRhoPrior {
  int w = 2;
  double lambda = 1.0;
  double U = 0.8;
  double a = 0.05;
  // tabulated inverse of d(rho) per branch, for inverse-CDF sampling
  std::vector<double> d_neg, rho_neg;
  std::vector<double> d_pos, rho_pos;

  double support_lo() const { return -1.0 / (w - 1); }
  double support_hi() const { return 1.0; }
};

// sqrt(-log R(rho)); series near zero avoids cancellation.
double pc_distance(int w, double rho);

double pc_log_density(const PcRhoPrior& prior, double rho);

// lambda solving Prob(|rho| > U) = a by monotone bisection.
double pc_calibrate_lambda(int w, double U, double a);

PcRhoPrior make_pc_prior(int w, double U, double a);

double pc_sample(const PcRhoPrior& prior, Rng& rng);

// Fisher z-transformation rho* = log((1+rho)/(1-rho)) and its inverse;
// log_jacobian returns log |d rho / d rho*| for density corrections.
double fisher_z(double rho);
double fisher_z_inv(double rho_star);
double fisher_log_jacobian(double rho_star);

}  // namespace mgrf
