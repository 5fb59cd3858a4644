// Matern-SPDE precision assembly (alpha = 2, i.e. nu = 1 on R^2) and the
// translation between (tau, kappa), (sigma^2, range) and the log-scale theta
// parameterization used by the sampler.
#pragma once

#include "mgrf/mesh.hpp"
#include "mgrf/sparse.hpp"
#include "mgrf/types.hpp"

#include <memory>

namespace mgrf {

// Mesh-level operators shared by every field on the mesh. The three terms of
// Q = tau^2 (kappa^4 C + 2 kappa^2 G + G C^{-1} G) are stored as value arrays
// aligned on one union sparsity pattern, so assembling a precision for new
// (tau, kappa) is a single axpy pass and all precisions on the mesh share a
// symbolic factorization.
struct SpdeOperators {
  SpMat pattern;   // union lower-triangle pattern (values unused)
  Vec c_vals, g_vals, gcg_vals;
  Vec mass_diag;
  double total_area = 0.0;
  Index dim = 0;
};

std::shared_ptr<const SpdeOperators> build_spde_operators(const TriMesh& mesh,
                                                          const FemMatrices& fem);

struct GmrfSpec {
  double theta_tau = 0.0;    // log tau
  double theta_kappa = 0.0;  // log kappa
  std::shared_ptr<const SpdeOperators> ops;

  double tau() const { return std::exp(theta_tau); }
  double kappa() const { return std::exp(theta_kappa); }
};

SparseSym precision(const GmrfSpec& spec);

// Writes the precision values for (tau, kappa) into a value array aligned
// with ops.pattern (the hot path of the sampler).
void precision_values(const SpdeOperators& ops, double tau, double kappa, double* out);

// sigma^2 = 1 / (4 pi kappa^2 tau^2), r = sqrt(8) / kappa  (nu = 1)
std::pair<double, double> params_to_interpretable(const GmrfSpec& spec);

GmrfSpec interpretable_to_params(double sigma2, double range,
                                 std::shared_ptr<const SpdeOperators> ops);

}  // namespace mgrf
