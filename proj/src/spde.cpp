#include "mgrf/spde.hpp"

#include <cmath>

namespace mgrf {

std::shared_ptr<const SpdeOperators> build_spde_operators(const TriMesh& mesh,
                                                          const FemMatrices& fem) {
  auto ops = std::make_shared<SpdeOperators>();
  const Index m = mesh.node_count();
  ops->dim = m;
  ops->mass_diag = fem.mass_diag;
  ops->total_area = fem.total_area;

  SpMat g_full = fem.stiffness.lower.selfadjointView<Eigen::Lower>();
  Vec cinv = fem.mass_diag.cwiseInverse();
  SpMat gcg_full = g_full * cinv.asDiagonal() * g_full;
  SpMat c_full(m, m);
  {
    std::vector<Triplet> t;
    t.reserve(m);
    for (Index i = 0; i < m; ++i) t.emplace_back(i, i, fem.mass_diag[i]);
    c_full.setFromTriplets(t.begin(), t.end());
  }

  // identical union pattern for all three terms: summing with zero weights
  // keeps the pattern while isolating each term's values
  SpMat c_u = (c_full + 0.0 * g_full + 0.0 * gcg_full).triangularView<Eigen::Lower>();
  SpMat g_u = (0.0 * c_full + g_full + 0.0 * gcg_full).triangularView<Eigen::Lower>();
  SpMat gcg_u = (0.0 * c_full + 0.0 * g_full + gcg_full).triangularView<Eigen::Lower>();
  c_u.makeCompressed();
  g_u.makeCompressed();
  gcg_u.makeCompressed();
  const Index nnz = c_u.nonZeros();
  if (g_u.nonZeros() != nnz || gcg_u.nonZeros() != nnz)
    throw DimensionMismatch("spde operator patterns failed to align");
  for (Index k = 0; k < nnz; ++k)
    if (c_u.innerIndexPtr()[k] != g_u.innerIndexPtr()[k] ||
        c_u.innerIndexPtr()[k] != gcg_u.innerIndexPtr()[k])
      throw DimensionMismatch("spde operator patterns failed to align");

  ops->pattern = c_u;
  ops->c_vals = Eigen::Map<const Vec>(c_u.valuePtr(), nnz);
  ops->g_vals = Eigen::Map<const Vec>(g_u.valuePtr(), nnz);
  ops->gcg_vals = Eigen::Map<const Vec>(gcg_u.valuePtr(), nnz);
  return ops;
}

void precision_values(const SpdeOperators& ops, double tau, double kappa, double* out) {
  const double t2 = tau * tau;
  const double k2 = kappa * kappa;
  const double a = t2 * k2 * k2;
  const double b = 2.0 * t2 * k2;
  const Index nnz = ops.c_vals.size();
  for (Index k = 0; k < nnz; ++k)
    out[k] = a * ops.c_vals[k] + b * ops.g_vals[k] + t2 * ops.gcg_vals[k];
}

SparseSym precision(const GmrfSpec& spec) {
  if (!spec.ops) throw DimensionMismatch("GmrfSpec missing operators");
  SparseSym q;
  q.lower = spec.ops->pattern;
  precision_values(*spec.ops, spec.tau(), spec.kappa(), q.lower.valuePtr());
  return q;
}

std::pair<double, double> params_to_interpretable(const GmrfSpec& spec) {
  const double tau = spec.tau(), kappa = spec.kappa();
  const double sigma2 = 1.0 / (4.0 * M_PI * kappa * kappa * tau * tau);
  const double range = std::sqrt(8.0) / kappa;
  return {sigma2, range};
}

GmrfSpec interpretable_to_params(double sigma2, double range,
                                 std::shared_ptr<const SpdeOperators> ops) {
  if (!(sigma2 > 0.0)) throw NonPositiveInput("sigma2 must be positive");
  if (!(range > 0.0)) throw NonPositiveInput("range must be positive");
  GmrfSpec spec;
  const double kappa = std::sqrt(8.0) / range;
  const double tau = 1.0 / std::sqrt(4.0 * M_PI * kappa * kappa * sigma2);
  spec.theta_kappa = std::log(kappa);
  spec.theta_tau = std::log(tau);
  spec.ops = std::move(ops);
  return spec;
}

}  // namespace mgrf
