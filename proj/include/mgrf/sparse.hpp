// Sparse symmetric matrices and their Cholesky factorization.
//
// SparseSym stores the lower triangle in compressed sparse column form; the
// matrix is symmetric by construction. factorize() computes P A P^T = L L^T
// with a fill-reducing (AMD), band-reducing (reverse Cuthill-McKee) or natural
// ordering. The symbolic analysis (ordering, elimination tree, pattern of L)
// is cached in SymbolicChol so repeated factorizations with a fixed sparsity
// pattern only run the numeric sweep.
//
// Frame conventions (P has rows e_{perm[i]}^T, so (Px)_i = x_{perm[i]}):
//   solve_lower(F, b) = L^{-1} P b          original frame in, permuted out
//   solve_upper(F, b) = P^T L^{-T} b        permuted in, original out
//   solve_full (F, b) = A^{-1} b            original in and out
//   mult_upper (F, x) = L^T P x             original in, permuted out
//   mult_lower (F, w) = P^T L w             permuted in, original out
// Composites built from these stay consistent across factors that share the
// same permutation (e.g. the cross operator P^T L_g^{-T} L_z^T P).
#pragma once

#include "mgrf/rng.hpp"
#include "mgrf/types.hpp"

#include <memory>
#include <vector>

namespace mgrf {

struct SparseSym {
  SpMat lower;  // lower triangle incl. diagonal, compressed, sorted

  Index dim() const { return lower.rows(); }
  Index nnz() const { return lower.nonZeros(); }
  double* values() { return lower.valuePtr(); }
  const double* values() const { return lower.valuePtr(); }
};

// Builds a SparseSym from triplets given in either triangle; (i,j) and (j,i)
// contributions are folded into the lower triangle and duplicates summed.
// Missing diagonal entries are inserted as explicit zeros.
SparseSym sparse_sym_from_triplets(Index dim, const std::vector<Triplet>& entries);

SparseSym sparse_sym_from_dense(const Mat& dense);

Mat to_dense(const SparseSym& a);

enum class Ordering { Natural, BandReducing, FillReducing };

struct SymbolicChol {
  Ordering ordering = Ordering::FillReducing;
  Index dim = 0;
  IVec perm;    // perm[new] = old
  IVec iperm;   // iperm[old] = new
  // permuted upper-triangle pattern (CSC) and gather map from A.lower values
  std::vector<int> up, ui;
  std::vector<int> value_src;
  // pattern of L (CSC, rows sorted ascending within a column)
  std::vector<int> lp, li;
  // row-wise pattern of L in elimination (topological) order, for the
  // up-looking numeric sweep
  std::vector<int> rp, ri;
  std::vector<int> parent;  // elimination tree
};

struct CholFactor {
  std::shared_ptr<const SymbolicChol> symbolic;
  std::vector<double> lx;  // values of L aligned with symbolic->lp/li

  Index dim() const { return symbolic ? symbolic->dim : 0; }
};

// Symbolic analysis only (ordering + elimination tree + pattern of L).
std::shared_ptr<const SymbolicChol> analyze(const SparseSym& a, Ordering ordering);

// Numeric factorization reusing a cached symbolic analysis. The sparsity
// pattern of `a` must be the one `symbolic` was computed from.
// Throws NotPositiveDefinite when a pivot falls below 1e-12 * max diagonal.
CholFactor factorize_with(std::shared_ptr<const SymbolicChol> symbolic, const SparseSym& a);

// In-place numeric refactorization (reuses the factor's storage).
void refactorize(CholFactor& f, const SparseSym& a);

CholFactor factorize(const SparseSym& a, Ordering ordering = Ordering::FillReducing);

Vec solve_lower(const CholFactor& f, const Vec& b);
Vec solve_upper(const CholFactor& f, const Vec& b);
Vec solve_full(const CholFactor& f, const Vec& b);
Vec mult_upper(const CholFactor& f, const Vec& x);
Vec mult_lower(const CholFactor& f, const Vec& w);

double logdet(const CholFactor& f);

// Exact draw from N(mean, A^{-1}) where f factorizes the precision A.
Vec sample_gmrf(const CholFactor& f, const Vec& mean, Rng& rng);

double quad_form(const SparseSym& a, const Vec& x);
Vec matvec(const SparseSym& a, const Vec& x);

// Lower bandwidth of the factor (max over columns of last_row - column).
Index factor_bandwidth(const CholFactor& f);
Index factor_nnz(const CholFactor& f);

// Reverse Cuthill-McKee ordering of the pattern (perm[new] = old).
IVec rcm_ordering(const SparseSym& a);

// MatrixMarket coordinate format, symmetric, for debugging.
void write_matrix_market(const SparseSym& a, const std::string& path);
SparseSym read_matrix_market(const std::string& path);

}  // namespace mgrf
