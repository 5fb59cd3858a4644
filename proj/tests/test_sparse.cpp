#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mgrf/sparse.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <cstdio>

using namespace mgrf;

namespace {

SparseSym tridiag_chain(Index n) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) t.emplace_back(i, i, 2.0);
  for (Index i = 1; i < n; ++i) t.emplace_back(i, i - 1, -1.0);
  return sparse_sym_from_triplets(n, t);
}

SparseSym identity_sym(Index n) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) t.emplace_back(i, i, 1.0);
  return sparse_sym_from_triplets(n, t);
}

// random sparse diagonally dominant SPD matrix
SparseSym random_spd(Index n, double density, Rng& rng) {
  std::vector<Triplet> t;
  Vec rowsum = Vec::Zero(n);
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i)
      if (rng.uniform() < density) {
        double v = rng.uniform(-1.0, 1.0);
        t.emplace_back(i, j, v);
        rowsum[i] += std::abs(v);
        rowsum[j] += std::abs(v);
      }
  for (Index i = 0; i < n; ++i) t.emplace_back(i, i, rowsum[i] + rng.uniform(0.5, 1.5));
  return sparse_sym_from_triplets(n, t);
}

Mat permuted_dense(const SparseSym& a, const IVec& perm) {
  Mat d = to_dense(a);
  Mat b(d.rows(), d.cols());
  for (Index i = 0; i < d.rows(); ++i)
    for (Index j = 0; j < d.cols(); ++j) b(i, j) = d(perm[i], perm[j]);
  return b;
}

Mat factor_dense(const CholFactor& f) {
  const auto& s = *f.symbolic;
  Mat l = Mat::Zero(s.dim, s.dim);
  for (Index j = 0; j < s.dim; ++j)
    for (int p = s.lp[j]; p < s.lp[j + 1]; ++p) l(s.li[p], j) = f.lx[p];
  return l;
}

constexpr Ordering kOrderings[] = {Ordering::Natural, Ordering::BandReducing,
                                   Ordering::FillReducing};

}  // namespace

TEST_CASE("identity factorizes to identity under any ordering") {
  SparseSym a = identity_sym(5);
  for (auto ord : kOrderings) {
    CholFactor f = factorize(a, ord);
    Mat l = factor_dense(f);
    CHECK((l - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }
}

TEST_CASE("chain precision reproduces the dense Cholesky oracle") {
  SparseSym a = tridiag_chain(4);
  Mat dense = to_dense(a);
  for (auto ord : kOrderings) {
    CholFactor f = factorize(a, ord);
    Mat l = factor_dense(f);
    Mat reconstructed = l * l.transpose();
    Mat permuted = permuted_dense(a, f.symbolic->perm);
    CHECK((reconstructed - permuted).cwiseAbs().maxCoeff() < 1e-12);
  }
  // oracle: Eigen dense LLT of the same matrix
  Eigen::LLT<Mat> llt(dense);
  REQUIRE(llt.info() == Eigen::Success);
}

TEST_CASE("indefinite matrix is rejected") {
  std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, -1.0}, {2, 2, 1.0}};
  SparseSym a = sparse_sym_from_triplets(3, t);
  CHECK_THROWS_AS(factorize(a), NotPositiveDefinite);
}

TEST_CASE("solves match dense oracles") {
  SparseSym eye = identity_sym(3);
  CholFactor fi = factorize(eye);
  Vec b(3);
  b << 1, 2, 3;
  CHECK((solve_full(fi, b) - b).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  SparseSym a = tridiag_chain(4);
  Mat dense = to_dense(a);
  Vec e1 = Vec::Zero(4);
  e1[0] = 1.0;
  Vec oracle = Eigen::PartialPivLU<Mat>(dense).solve(e1);
  for (auto ord : kOrderings) {
    CholFactor f = factorize(a, ord);
    CHECK((solve_full(f, e1) - oracle).cwiseAbs().maxCoeff() < 1e-12);
  }

  Vec wrong(3);
  wrong << 1, 2, 3;
  CholFactor f = factorize(a);
  CHECK_THROWS_AS(solve_full(f, wrong), DimensionMismatch);
}

TEST_CASE("half solves compose and match the factor") {
  Rng rng(7);
  SparseSym a = random_spd(30, 0.15, rng);
  CholFactor f = factorize(a);
  Vec b(30);
  for (Index i = 0; i < 30; ++i) b[i] = rng.normal();
  Vec x = solve_upper(f, solve_lower(f, b));
  CHECK((matvec(a, x) - b).cwiseAbs().maxCoeff() < 1e-8 * b.cwiseAbs().maxCoeff());
  // mult_upper inverts solve_upper and mult_lower inverts solve_lower
  Vec w = mult_upper(f, x);
  CHECK((solve_upper(f, w) - x).cwiseAbs().maxCoeff() < 1e-10);
  Vec lw = mult_lower(f, solve_lower(f, b));
  CHECK((lw - b).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("logdet") {
  CHECK(logdet(factorize(identity_sym(7))) == doctest::Approx(0.0));
  std::vector<Triplet> t{{0, 0, 2.0}, {1, 1, 8.0}};
  CHECK(logdet(factorize(sparse_sym_from_triplets(2, t))) == doctest::Approx(std::log(16.0)));
  // det tridiag(-1,2,-1) of dim n is n+1; oracle via dense LU
  SparseSym a = tridiag_chain(4);
  double oracle = std::log(Eigen::PartialPivLU<Mat>(to_dense(a)).determinant());
  CHECK(logdet(factorize(a)) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(logdet(factorize(a)) == doctest::Approx(std::log(5.0)));
}

TEST_CASE("sampling law: identity and scaled diagonal") {
  const int n_draws = 100000;
  Rng rng(13);
  {
    CholFactor f = factorize(identity_sym(3));
    Vec mean = Vec::Zero(3), m1 = Vec::Zero(3), m2 = Vec::Zero(3);
    for (int k = 0; k < n_draws; ++k) {
      Vec x = sample_gmrf(f, mean, rng);
      m1 += x;
      m2 += x.cwiseProduct(x);
    }
    m1 /= n_draws;
    Vec var = m2 / n_draws - m1.cwiseProduct(m1);
    for (Index i = 0; i < 3; ++i) CHECK(var[i] == doctest::Approx(1.0).epsilon(0.05));
  }
  {
    std::vector<Triplet> t{{0, 0, 4.0}, {1, 1, 4.0}};
    CholFactor f = factorize(sparse_sym_from_triplets(2, t));
    Vec mean = Vec::Zero(2), m1 = Vec::Zero(2), m2 = Vec::Zero(2);
    for (int k = 0; k < n_draws; ++k) {
      Vec x = sample_gmrf(f, mean, rng);
      m1 += x;
      m2 += x.cwiseProduct(x);
    }
    m1 /= n_draws;
    Vec var = m2 / n_draws - m1.cwiseProduct(m1);
    for (Index i = 0; i < 2; ++i) CHECK(var[i] == doctest::Approx(0.25).epsilon(0.08));
  }
}

TEST_CASE("sampling law matches the dense inverse within 3 MC standard errors") {
  const int n_draws = 100000;
  Rng rng(29);
  SparseSym a = tridiag_chain(4);
  Mat cov_oracle = to_dense(a).inverse();
  Mat sum = Mat::Zero(4, 4);
  Vec mean = Vec::Zero(4), m1 = Vec::Zero(4);
  CholFactor f = factorize(a);
  std::vector<Vec> draws;
  draws.reserve(n_draws);
  for (int k = 0; k < n_draws; ++k) draws.push_back(sample_gmrf(f, mean, rng));
  for (const Vec& x : draws) m1 += x;
  m1 /= n_draws;
  for (const Vec& x : draws) sum += (x - m1) * (x - m1).transpose();
  Mat cov = sum / (n_draws - 1);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) {
      double se = std::sqrt((cov_oracle(i, i) * cov_oracle(j, j) + cov_oracle(i, j) * cov_oracle(i, j)) /
                            n_draws);
      CHECK(std::abs(cov(i, j) - cov_oracle(i, j)) < 3.0 * se);
    }
}

TEST_CASE("quad_form and matvec") {
  SparseSym eye = identity_sym(2);
  Vec x(2);
  x << 3, 4;
  CHECK(quad_form(eye, x) == doctest::Approx(25.0));
  CHECK(quad_form(eye, Vec::Zero(2)) == doctest::Approx(0.0));

  Rng rng(3);
  SparseSym a = random_spd(6, 0.5, rng);
  Mat d = to_dense(a);
  Vec v(6);
  for (Index i = 0; i < 6; ++i) v[i] = rng.normal();
  CHECK(std::abs(quad_form(a, v) - v.dot(d * v)) < 1e-12 * std::abs(v.dot(d * v)) + 1e-12);
  CHECK((matvec(a, v) - d * v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reconstruction property across random SPD matrices up to dim 200") {
  Rng rng(101);
  for (Index n : {5, 23, 60, 121, 200}) {
    SparseSym a = random_spd(n, 0.05, rng);
    double amax = to_dense(a).cwiseAbs().maxCoeff();
    for (auto ord : kOrderings) {
      CholFactor f = factorize(a, ord);
      Mat l = factor_dense(f);
      Mat err = l * l.transpose() - permuted_dense(a, f.symbolic->perm);
      CHECK(err.cwiseAbs().maxCoeff() < 1e-10 * amax);
    }
  }
}

TEST_CASE("ordering invariance of logdet and solve_full") {
  Rng rng(47);
  SparseSym a = random_spd(80, 0.08, rng);
  Vec b(80);
  for (Index i = 0; i < 80; ++i) b[i] = rng.normal();
  CholFactor f0 = factorize(a, Ordering::Natural);
  CholFactor f1 = factorize(a, Ordering::BandReducing);
  CholFactor f2 = factorize(a, Ordering::FillReducing);
  CHECK(std::abs(logdet(f0) - logdet(f1)) < 1e-9);
  CHECK(std::abs(logdet(f0) - logdet(f2)) < 1e-9);
  Vec x0 = solve_full(f0, b), x1 = solve_full(f1, b), x2 = solve_full(f2, b);
  CHECK((x0 - x1).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((x0 - x2).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("band-reducing ordering preserves bandwidth on band matrices") {
  // pentadiagonal matrix (bandwidth 2), shuffled, then factorized with RCM
  const Index n = 40, p = 2;
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) t.emplace_back(i, i, 5.0);
  for (Index i = 0; i < n; ++i)
    for (Index k = 1; k <= p; ++k)
      if (i >= k) t.emplace_back(i, i - k, -1.0);
  SparseSym band = sparse_sym_from_triplets(n, t);
  CholFactor f = factorize(band, Ordering::BandReducing);
  CHECK(factor_bandwidth(f) <= p);

  // same matrix with rows relabeled at random: RCM recovers bandwidth <= p
  Rng rng(5);
  IVec shuffle = IVec::LinSpaced(n, 0, static_cast<int>(n) - 1);
  for (Index i = n - 1; i > 0; --i)
    std::swap(shuffle[i], shuffle[static_cast<Index>(rng.uniform() * static_cast<double>(i + 1))]);
  std::vector<Triplet> ts;
  for (const auto& tr : t) ts.emplace_back(shuffle[tr.row()], shuffle[tr.col()], tr.value());
  SparseSym shuffled = sparse_sym_from_triplets(n, ts);
  CholFactor fs = factorize(shuffled, Ordering::BandReducing);
  CHECK(factor_bandwidth(fs) <= p);
}

TEST_CASE("fill-reducing ordering beats natural on an arrow-shaped matrix") {
  const Index n = 60;
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) t.emplace_back(i, i, static_cast<double>(n));
  for (Index i = 1; i < n; ++i) t.emplace_back(i, 0, 1.0);
  SparseSym arrow = sparse_sym_from_triplets(n, t);
  CholFactor nat = factorize(arrow, Ordering::Natural);
  CholFactor amd = factorize(arrow, Ordering::FillReducing);
  CHECK(factor_nnz(amd) < factor_nnz(nat));
  CHECK(factor_nnz(amd) == 2 * n - 1);  // hub eliminated last: no fill at all
}

TEST_CASE("numeric refactorization reuses the symbolic analysis") {
  Rng rng(9);
  SparseSym a = random_spd(50, 0.1, rng);
  auto sym = analyze(a, Ordering::FillReducing);
  CholFactor f = factorize_with(sym, a);
  double ld1 = logdet(f);
  // scale values by 4: logdet increases by n log 4, same pattern
  SparseSym b = a;
  b.lower *= 4.0;
  refactorize(f, b);
  CHECK(logdet(f) == doctest::Approx(ld1 + 50 * std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("matrix market round trip") {
  Rng rng(21);
  SparseSym a = random_spd(12, 0.3, rng);
  std::string path = "test_sparse_mm.mtx";
  write_matrix_market(a, path);
  SparseSym back = read_matrix_market(path);
  CHECK((to_dense(a) - to_dense(back)).cwiseAbs().maxCoeff() < 1e-14);
  std::remove(path.c_str());
}
