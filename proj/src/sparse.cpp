#include "mgrf/sparse.hpp"

#include <Eigen/OrderingMethods>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace mgrf {

namespace {
constexpr double kPivotTol = 1e-12;
}

SparseSym sparse_sym_from_triplets(Index dim, const std::vector<Triplet>& entries) {
  std::vector<Triplet> lower;
  lower.reserve(entries.size() + static_cast<std::size_t>(dim));
  for (const auto& t : entries) {
    Index i = t.row(), j = t.col();
    if (i < 0 || j < 0 || i >= dim || j >= dim)
      throw DimensionMismatch("triplet index out of range");
    if (i >= j)
      lower.emplace_back(i, j, t.value());
    else
      lower.emplace_back(j, i, t.value());
  }
  for (Index i = 0; i < dim; ++i) lower.emplace_back(i, i, 0.0);  // pattern holds the diagonal
  SparseSym a;
  a.lower.resize(dim, dim);
  a.lower.setFromTriplets(lower.begin(), lower.end());
  a.lower.makeCompressed();
  return a;
}

SparseSym sparse_sym_from_dense(const Mat& dense) {
  if (dense.rows() != dense.cols()) throw DimensionMismatch("dense matrix not square");
  std::vector<Triplet> t;
  for (Index j = 0; j < dense.cols(); ++j)
    for (Index i = j; i < dense.rows(); ++i)
      if (dense(i, j) != 0.0 || i == j) t.emplace_back(i, j, dense(i, j));
  return sparse_sym_from_triplets(dense.rows(), t);
}

Mat to_dense(const SparseSym& a) {
  Mat d = Mat(a.lower);
  Mat full = d + Mat(d.transpose());
  full.diagonal() -= d.diagonal();
  return full;
}

namespace {

// perm[new] = old; iperm is its inverse.
IVec invert_perm(const IVec& perm) {
  IVec ip(perm.size());
  for (Index i = 0; i < perm.size(); ++i) ip[perm[i]] = static_cast<int>(i);
  return ip;
}

IVec amd_ordering(const SparseSym& a) {
  Eigen::AMDOrdering<int> amd;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p;
  SpMat m = a.lower;  // AMD symmetrizes the pattern internally
  amd(m, p);
  return p.indices();
}

}  // namespace

IVec rcm_ordering(const SparseSym& a) {
  const Index n = a.dim();
  // full symmetric adjacency (excluding the diagonal)
  std::vector<std::vector<int>> adj(n);
  for (Index j = 0; j < n; ++j)
    for (SpMat::InnerIterator it(a.lower, j); it; ++it)
      if (it.row() != j) {
        adj[it.row()].push_back(static_cast<int>(j));
        adj[j].push_back(static_cast<int>(it.row()));
      }
  std::vector<int> degree(n);
  for (Index i = 0; i < n; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    degree[i] = static_cast<int>(adj[i].size());
  }

  std::vector<char> visited(n, 0);
  std::vector<int> order;
  order.reserve(n);

  auto bfs_levels = [&](int root, std::vector<int>& last_level) {
    std::vector<char> seen(n, 0);
    std::deque<int> q{root};
    seen[root] = 1;
    int depth = 0;
    last_level = {root};
    while (!q.empty()) {
      std::vector<int> next;
      for (int u : q)
        for (int v : adj[u])
          if (!seen[v]) {
            seen[v] = 1;
            next.push_back(v);
          }
      if (next.empty()) break;
      last_level = next;
      q.assign(next.begin(), next.end());
      ++depth;
    }
    return depth;
  };

  for (Index start = 0; start < n; ++start) {
    if (visited[start]) continue;
    // pseudo-peripheral root: min-degree seed within this component, then
    // chase the level structure until the eccentricity stops growing
    int root;
    {
      int best = -1;
      std::deque<int> q{static_cast<int>(start)};
      std::vector<char> seen(n, 0);
      seen[start] = 1;
      while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        if (best < 0 || degree[u] < degree[best]) best = u;
        for (int v : adj[u])
          if (!seen[v] && !visited[v]) {
            seen[v] = 1;
            q.push_back(v);
          }
      }
      root = best;
    }
    std::vector<int> frontier;
    int ecc = bfs_levels(root, frontier);
    for (;;) {
      int cand = *std::min_element(frontier.begin(), frontier.end(),
                                   [&](int a_, int b_) { return degree[a_] < degree[b_]; });
      std::vector<int> f2;
      int ecc2 = bfs_levels(cand, f2);
      if (ecc2 > ecc) {
        ecc = ecc2;
        root = cand;
        frontier = std::move(f2);
      } else {
        break;
      }
    }
    // Cuthill-McKee from the chosen root, neighbors by increasing degree
    std::deque<int> q{root};
    visited[root] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      order.push_back(u);
      std::vector<int> nb;
      for (int v : adj[u])
        if (!visited[v]) nb.push_back(v);
      std::sort(nb.begin(), nb.end(),
                [&](int a_, int b_) { return degree[a_] != degree[b_] ? degree[a_] < degree[b_] : a_ < b_; });
      for (int v : nb) {
        visited[v] = 1;
        q.push_back(v);
      }
    }
  }
  std::reverse(order.begin(), order.end());
  IVec perm(n);
  for (Index i = 0; i < n; ++i) perm[i] = order[i];
  return perm;
}

std::shared_ptr<const SymbolicChol> analyze(const SparseSym& a, Ordering ordering) {
  const Index n = a.dim();
  auto sym = std::make_shared<SymbolicChol>();
  sym->ordering = ordering;
  sym->dim = n;
  switch (ordering) {
    case Ordering::Natural:
      sym->perm = IVec::LinSpaced(n, 0, static_cast<int>(n) - 1);
      break;
    case Ordering::BandReducing:
      sym->perm = rcm_ordering(a);
      break;
    case Ordering::FillReducing:
      sym->perm = amd_ordering(a);
      break;
  }
  sym->iperm = invert_perm(sym->perm);

  // permuted upper pattern C = (P A P^T) upper, with a gather map back into
  // the value array of a.lower so numeric refactorizations skip this step
  const int* ap = a.lower.outerIndexPtr();
  const int* ai = a.lower.innerIndexPtr();
  std::vector<int> colcnt(n, 0);
  for (Index j = 0; j < n; ++j)
    for (int p = ap[j]; p < ap[j + 1]; ++p) {
      int ni = sym->iperm[ai[p]], nj = sym->iperm[j];
      ++colcnt[std::max(ni, nj)];
    }
  sym->up.assign(n + 1, 0);
  for (Index j = 0; j < n; ++j) sym->up[j + 1] = sym->up[j] + colcnt[j];
  const int nz = sym->up[n];
  sym->ui.assign(nz, 0);
  sym->value_src.assign(nz, 0);
  {
    std::vector<std::pair<int, int>> buf;  // (row, src) per column, then sort
    std::vector<int> head(sym->up.begin(), sym->up.end() - 1);
    std::vector<int> rows(nz), srcs(nz);
    for (Index j = 0; j < n; ++j)
      for (int p = ap[j]; p < ap[j + 1]; ++p) {
        int ni = sym->iperm[ai[p]], nj = sym->iperm[j];
        int c = std::max(ni, nj), r = std::min(ni, nj);
        int pos = head[c]++;
        rows[pos] = r;
        srcs[pos] = p;
      }
    for (Index j = 0; j < n; ++j) {
      buf.clear();
      for (int p = sym->up[j]; p < sym->up[j + 1]; ++p) buf.emplace_back(rows[p], srcs[p]);
      std::sort(buf.begin(), buf.end());
      for (int p = sym->up[j], t = 0; p < sym->up[j + 1]; ++p, ++t) {
        sym->ui[p] = buf[t].first;
        sym->value_src[p] = buf[t].second;
      }
    }
  }

  // elimination tree of the permuted pattern
  sym->parent.assign(n, -1);
  {
    std::vector<int> ancestor(n, -1);
    for (Index k = 0; k < n; ++k)
      for (int p = sym->up[k]; p < sym->up[k + 1]; ++p) {
        int i = sym->ui[p];
        while (i != -1 && i < static_cast<int>(k)) {
          int inext = ancestor[i];
          ancestor[i] = static_cast<int>(k);
          if (inext == -1) sym->parent[i] = static_cast<int>(k);
          i = inext;
        }
      }
  }

  // row patterns of L in topological order (one ereach per row)
  sym->rp.assign(n + 1, 0);
  std::vector<int> mark(n, -1), chain(n), stackbuf(n);
  std::vector<std::vector<int>> rowpat(n);
  std::vector<int> lcount(n, 1);  // diagonal
  for (Index k = 0; k < n; ++k) {
    mark[k] = static_cast<int>(k);
    int top = static_cast<int>(n);
    for (int p = sym->up[k]; p < sym->up[k + 1]; ++p) {
      int i = sym->ui[p];
      if (i >= static_cast<int>(k)) continue;
      int len = 0;
      while (mark[i] != static_cast<int>(k)) {
        chain[len++] = i;
        mark[i] = static_cast<int>(k);
        i = sym->parent[i];
      }
      while (len > 0) stackbuf[--top] = chain[--len];
    }
    rowpat[k].assign(stackbuf.begin() + top, stackbuf.end());
    for (int j : rowpat[k]) ++lcount[j];
  }
  int total = 0;
  for (Index k = 0; k < n; ++k) {
    sym->rp[k + 1] = sym->rp[k] + static_cast<int>(rowpat[k].size());
    total += lcount[k];
  }
  sym->ri.assign(sym->rp[n], 0);
  for (Index k = 0; k < n; ++k)
    std::copy(rowpat[k].begin(), rowpat[k].end(), sym->ri.begin() + sym->rp[k]);

  // CSC pattern of L: diagonal first, then rows ascending
  sym->lp.assign(n + 1, 0);
  for (Index j = 0; j < n; ++j) sym->lp[j + 1] = sym->lp[j] + lcount[j];
  sym->li.assign(total, 0);
  {
    std::vector<int> ins(n);
    for (Index j = 0; j < n; ++j) {
      sym->li[sym->lp[j]] = static_cast<int>(j);
      ins[j] = sym->lp[j] + 1;
    }
    for (Index k = 0; k < n; ++k)
      for (int j : rowpat[k]) sym->li[ins[j]++] = static_cast<int>(k);
  }
  return sym;
}

namespace {

void numeric_factorize(const SymbolicChol& s, const SparseSym& a, std::vector<double>& lx) {
  const Index n = s.dim;
  if (a.dim() != n) throw DimensionMismatch("factorize: dimension changed since analysis");
  if (static_cast<int>(a.nnz()) != static_cast<int>(s.value_src.size()))
    throw DimensionMismatch("factorize: sparsity pattern changed since analysis");
  lx.assign(s.lp[n], 0.0);
  const double* av = a.values();
  std::vector<double> cx(s.value_src.size());
  double maxdiag = 0.0;
  for (std::size_t t = 0; t < cx.size(); ++t) cx[t] = av[s.value_src[t]];
  for (Index k = 0; k < n; ++k) {
    const int pd = s.up[k + 1] - 1;  // diagonal is the last (largest row) entry
    if (s.ui[pd] == static_cast<int>(k)) maxdiag = std::max(maxdiag, std::abs(cx[pd]));
  }
  const double tol = kPivotTol * maxdiag;

  std::vector<double> x(n, 0.0);
  std::vector<int> cnt(n);
  for (Index j = 0; j < n; ++j) cnt[j] = s.lp[j] + 1;
  for (Index k = 0; k < n; ++k) {
    for (int p = s.up[k]; p < s.up[k + 1]; ++p) x[s.ui[p]] = cx[p];
    double d = x[k];
    x[k] = 0.0;
    for (int q = s.rp[k]; q < s.rp[k + 1]; ++q) {
      const int j = s.ri[q];
      const double lkj = x[j] / lx[s.lp[j]];
      x[j] = 0.0;
      for (int p = s.lp[j] + 1; p < cnt[j]; ++p) x[s.li[p]] -= lx[p] * lkj;
      d -= lkj * lkj;
      lx[cnt[j]++] = lkj;
    }
    if (!(d > tol)) throw NotPositiveDefinite(k);
    lx[s.lp[k]] = std::sqrt(d);
  }
}

}  // namespace

CholFactor factorize_with(std::shared_ptr<const SymbolicChol> symbolic, const SparseSym& a) {
  CholFactor f;
  f.symbolic = std::move(symbolic);
  numeric_factorize(*f.symbolic, a, f.lx);
  return f;
}

void refactorize(CholFactor& f, const SparseSym& a) {
  numeric_factorize(*f.symbolic, a, f.lx);
}

CholFactor factorize(const SparseSym& a, Ordering ordering) {
  return factorize_with(analyze(a, ordering), a);
}

Vec solve_lower(const CholFactor& f, const Vec& b) {
  const SymbolicChol& s = *f.symbolic;
  if (b.size() != s.dim) throw DimensionMismatch("solve_lower: length(b) != dim");
  Vec w(s.dim);
  for (Index i = 0; i < s.dim; ++i) w[i] = b[s.perm[i]];
  for (Index j = 0; j < s.dim; ++j) {
    w[j] /= f.lx[s.lp[j]];
    const double wj = w[j];
    for (int p = s.lp[j] + 1; p < s.lp[j + 1]; ++p) w[s.li[p]] -= f.lx[p] * wj;
  }
  return w;
}

Vec solve_upper(const CholFactor& f, const Vec& b) {
  const SymbolicChol& s = *f.symbolic;
  if (b.size() != s.dim) throw DimensionMismatch("solve_upper: length(b) != dim");
  Vec y = b;
  for (Index j = s.dim - 1; j >= 0; --j) {
    double acc = y[j];
    for (int p = s.lp[j] + 1; p < s.lp[j + 1]; ++p) acc -= f.lx[p] * y[s.li[p]];
    y[j] = acc / f.lx[s.lp[j]];
  }
  Vec out(s.dim);
  for (Index i = 0; i < s.dim; ++i) out[s.perm[i]] = y[i];
  return out;
}

Vec solve_full(const CholFactor& f, const Vec& b) { return solve_upper(f, solve_lower(f, b)); }

Vec mult_upper(const CholFactor& f, const Vec& x) {
  const SymbolicChol& s = *f.symbolic;
  if (x.size() != s.dim) throw DimensionMismatch("mult_upper: length(x) != dim");
  Vec w(s.dim);
  for (Index i = 0; i < s.dim; ++i) w[i] = x[s.perm[i]];
  Vec out(s.dim);
  for (Index j = 0; j < s.dim; ++j) {
    double acc = 0.0;
    for (int p = s.lp[j]; p < s.lp[j + 1]; ++p) acc += f.lx[p] * w[s.li[p]];
    out[j] = acc;
  }
  return out;
}

Vec mult_lower(const CholFactor& f, const Vec& w) {
  const SymbolicChol& s = *f.symbolic;
  if (w.size() != s.dim) throw DimensionMismatch("mult_lower: length(w) != dim");
  Vec tmp = Vec::Zero(s.dim);
  for (Index j = 0; j < s.dim; ++j) {
    const double wj = w[j];
    if (wj == 0.0) continue;
    for (int p = s.lp[j]; p < s.lp[j + 1]; ++p) tmp[s.li[p]] += f.lx[p] * wj;
  }
  Vec out(s.dim);
  for (Index i = 0; i < s.dim; ++i) out[s.perm[i]] = tmp[i];
  return out;
}

double logdet(const CholFactor& f) {
  const SymbolicChol& s = *f.symbolic;
  double acc = 0.0;
  for (Index j = 0; j < s.dim; ++j) acc += std::log(f.lx[s.lp[j]]);
  return 2.0 * acc;
}

Vec sample_gmrf(const CholFactor& f, const Vec& mean, Rng& rng) {
  const SymbolicChol& s = *f.symbolic;
  if (mean.size() != s.dim) throw DimensionMismatch("sample_gmrf: length(mean) != dim");
  Vec u(s.dim);
  for (Index i = 0; i < s.dim; ++i) u[i] = rng.normal();
  for (Index j = s.dim - 1; j >= 0; --j) {
    double acc = u[j];
    for (int p = s.lp[j] + 1; p < s.lp[j + 1]; ++p) acc -= f.lx[p] * u[s.li[p]];
    u[j] = acc / f.lx[s.lp[j]];
  }
  Vec out(s.dim);
  for (Index i = 0; i < s.dim; ++i) out[s.perm[i]] = mean[s.perm[i]] + u[i];
  return out;
}

double quad_form(const SparseSym& a, const Vec& x) {
  if (x.size() != a.dim()) throw DimensionMismatch("quad_form: length(x) != dim");
  double diag = 0.0, off = 0.0;
  for (Index j = 0; j < a.dim(); ++j)
    for (SpMat::InnerIterator it(a.lower, j); it; ++it) {
      if (it.row() == j)
        diag += it.value() * x[j] * x[j];
      else
        off += it.value() * x[it.row()] * x[j];
    }
  return diag + 2.0 * off;
}

Vec matvec(const SparseSym& a, const Vec& x) {
  if (x.size() != a.dim()) throw DimensionMismatch("matvec: length(x) != dim");
  Vec y = Vec::Zero(a.dim());
  for (Index j = 0; j < a.dim(); ++j)
    for (SpMat::InnerIterator it(a.lower, j); it; ++it) {
      y[it.row()] += it.value() * x[j];
      if (it.row() != j) y[j] += it.value() * x[it.row()];
    }
  return y;
}

Index factor_bandwidth(const CholFactor& f) {
  const SymbolicChol& s = *f.symbolic;
  Index bw = 0;
  for (Index j = 0; j < s.dim; ++j)
    if (s.lp[j + 1] > s.lp[j]) bw = std::max<Index>(bw, s.li[s.lp[j + 1] - 1] - j);
  return bw;
}

Index factor_nnz(const CholFactor& f) { return static_cast<Index>(f.lx.size()); }

void write_matrix_market(const SparseSym& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.dim() << " " << a.dim() << " " << a.nnz() << "\n";
  out.precision(17);
  for (Index j = 0; j < a.dim(); ++j)
    for (SpMat::InnerIterator it(a.lower, j); it; ++it)
      out << (it.row() + 1) << " " << (j + 1) << " " << it.value() << "\n";
}

SparseSym read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.find("%%MatrixMarket") == std::string::npos)
    throw std::runtime_error("not a MatrixMarket file: " + path);
  if (line.find("symmetric") == std::string::npos)
    throw std::runtime_error("expected a symmetric MatrixMarket matrix: " + path);
  do {
    if (!std::getline(in, line)) throw std::runtime_error("truncated MatrixMarket file");
  } while (!line.empty() && line[0] == '%');
  std::istringstream hdr(line);
  Index rows = 0, cols = 0, nnz = 0;
  hdr >> rows >> cols >> nnz;
  if (rows != cols) throw DimensionMismatch("MatrixMarket matrix not square");
  std::vector<Triplet> t;
  t.reserve(nnz);
  for (Index k = 0; k < nnz; ++k) {
    Index i, j;
    double v;
    in >> i >> j >> v;
    if (!in) throw std::runtime_error("truncated MatrixMarket entries");
    t.emplace_back(i - 1, j - 1, v);
  }
  return sparse_sym_from_triplets(rows, t);
}

}  // namespace mgrf
