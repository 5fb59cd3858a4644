#include "mgrf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace mgrf {

namespace {
constexpr double kBaryTol = 1e-10;
}

TriMesh build_mesh(const Rect& domain, Index target_nodes, double extension_fraction) {
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
    throw DegenerateDomain("domain must have positive width and height");
  if (target_nodes < 9) throw DegenerateDomain("target_nodes must be at least 9");
  if (extension_fraction < 0.0 || extension_fraction > 1.0)
    throw DegenerateDomain("extension_fraction must lie in [0, 1]");

  const double diam = std::hypot(domain.width(), domain.height());
  const double ext = extension_fraction * diam;
  const double ox = domain.x0 - ext, oy = domain.y0 - ext;
  const double w = domain.width() + 2.0 * ext, h = domain.height() + 2.0 * ext;

  // pick a grid whose node count is as close to the target as possible
  Index best_nx = 2, best_ny = 2;
  double best_err = std::numeric_limits<double>::max();
  const Index nx0 = std::max<Index>(2, static_cast<Index>(std::lround(std::sqrt(static_cast<double>(target_nodes) * w / h))));
  for (Index nx = std::max<Index>(2, nx0 - 2); nx <= nx0 + 2; ++nx) {
    Index ny = std::max<Index>(2, static_cast<Index>(std::lround(static_cast<double>(target_nodes) / static_cast<double>(nx))));
    for (Index dyy = -1; dyy <= 1; ++dyy) {
      Index nyc = std::max<Index>(2, ny + dyy);
      double err = std::abs(static_cast<double>(nx * nyc - target_nodes));
      if (err < best_err) {
        best_err = err;
        best_nx = nx;
        best_ny = nyc;
      }
    }
  }

  TriMesh mesh;
  mesh.domain = domain;
  mesh.nx = best_nx;
  mesh.ny = best_ny;
  mesh.ox = ox;
  mesh.oy = oy;
  mesh.dx = w / static_cast<double>(best_nx - 1);
  mesh.dy = h / static_cast<double>(best_ny - 1);

  const Index m = best_nx * best_ny;
  mesh.nodes.resize(m, 2);
  mesh.interior.assign(m, 0);
  const double tol = 1e-12 * diam;
  for (Index iy = 0; iy < best_ny; ++iy)
    for (Index ix = 0; ix < best_nx; ++ix) {
      Index id = iy * best_nx + ix;
      double x = ox + static_cast<double>(ix) * mesh.dx;
      double y = oy + static_cast<double>(iy) * mesh.dy;
      mesh.nodes(id, 0) = x;
      mesh.nodes(id, 1) = y;
      mesh.interior[id] = (x >= domain.x0 - tol && x <= domain.x1 + tol && y >= domain.y0 - tol &&
                           y <= domain.y1 + tol)
                              ? 1
                              : 0;
    }

  // One diagonal direction throughout: every interior node then touches six
  // triangles, so the lumped mass (and with it the nodal GMRF variance) is
  // uniform away from the boundary. Alternating diagonals would split nodes
  // into degree-4/degree-8 classes with a 2x lumped-mass imbalance.
  const Index cells = (best_nx - 1) * (best_ny - 1);
  mesh.triangles.resize(2 * cells, 3);
  Index t = 0;
  for (Index iy = 0; iy + 1 < best_ny; ++iy)
    for (Index ix = 0; ix + 1 < best_nx; ++ix) {
      int v00 = static_cast<int>(iy * best_nx + ix);
      int v10 = v00 + 1;
      int v01 = static_cast<int>((iy + 1) * best_nx + ix);
      int v11 = v01 + 1;
      mesh.triangles.row(t++) << v00, v10, v11;
      mesh.triangles.row(t++) << v00, v11, v01;
    }
  return mesh;
}

namespace {

double signed_area(const TriMesh& mesh, Index t) {
  const auto tri = mesh.triangles.row(t);
  double x0 = mesh.nodes(tri[0], 0), y0 = mesh.nodes(tri[0], 1);
  double x1 = mesh.nodes(tri[1], 0), y1 = mesh.nodes(tri[1], 1);
  double x2 = mesh.nodes(tri[2], 0), y2 = mesh.nodes(tri[2], 1);
  return 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0));
}

}  // namespace

FemMatrices assemble_fem(const TriMesh& mesh) {
  const Index m = mesh.node_count();
  FemMatrices fem;
  fem.mass_diag = Vec::Zero(m);
  std::vector<Triplet> gt;
  gt.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 6);
  double total = 0.0;
  for (Index t = 0; t < mesh.triangle_count(); ++t) {
    const auto tri = mesh.triangles.row(t);
    const double area = signed_area(mesh, t);
    if (!(area > 0.0)) throw DegenerateDomain("triangle with non-positive area");
    total += area;
    double x[3], y[3];
    for (int v = 0; v < 3; ++v) {
      x[v] = mesh.nodes(tri[v], 0);
      y[v] = mesh.nodes(tri[v], 1);
    }
    // gradients of the barycentric basis: b_i = y_j - y_k, c_i = x_k - x_j
    double b[3], c[3];
    for (int v = 0; v < 3; ++v) {
      int j = (v + 1) % 3, k = (v + 2) % 3;
      b[v] = y[j] - y[k];
      c[v] = x[k] - x[j];
    }
    for (int v = 0; v < 3; ++v) {
      fem.mass_diag[tri[v]] += area / 3.0;
      for (int u = 0; u <= v; ++u) {
        double g = (b[v] * b[u] + c[v] * c[u]) / (4.0 * area);
        Index i = std::max(tri[v], tri[u]), j = std::min(tri[v], tri[u]);
        gt.emplace_back(i, j, g);
      }
    }
  }
  fem.total_area = total;
  fem.stiffness = sparse_sym_from_triplets(m, gt);
  std::vector<Triplet> ct;
  ct.reserve(m);
  for (Index i = 0; i < m; ++i) ct.emplace_back(i, i, fem.mass_diag[i]);
  fem.mass = sparse_sym_from_triplets(m, ct);
  return fem;
}

namespace {

// barycentric coordinates of p in triangle t; returns min coordinate
double barycentric(const TriMesh& mesh, Index t, double px, double py, double lam[3]) {
  const auto tri = mesh.triangles.row(t);
  double x0 = mesh.nodes(tri[0], 0), y0 = mesh.nodes(tri[0], 1);
  double x1 = mesh.nodes(tri[1], 0), y1 = mesh.nodes(tri[1], 1);
  double x2 = mesh.nodes(tri[2], 0), y2 = mesh.nodes(tri[2], 1);
  double det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
  lam[1] = ((px - x0) * (y2 - y0) - (py - y0) * (x2 - x0)) / det;
  lam[2] = ((py - y0) * (x1 - x0) - (px - x0) * (y1 - y0)) / det;
  lam[0] = 1.0 - lam[1] - lam[2];
  return std::min({lam[0], lam[1], lam[2]});
}

}  // namespace

Projector project(const TriMesh& mesh, const Mat& locations) {
  if (locations.cols() != 2) throw DimensionMismatch("locations must be n x 2");
  const Index n = locations.rows();
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(n) * 3);
  for (Index i = 0; i < n; ++i) {
    const double px = locations(i, 0), py = locations(i, 1);
    double fx = (px - mesh.ox) / mesh.dx, fy = (py - mesh.oy) / mesh.dy;
    if (fx < -kBaryTol || fy < -kBaryTol || fx > static_cast<double>(mesh.nx - 1) + kBaryTol ||
        fy > static_cast<double>(mesh.ny - 1) + kBaryTol)
      throw PointOutsideMesh(i);
    Index cx = std::clamp<Index>(static_cast<Index>(std::floor(fx)), 0, mesh.nx - 2);
    Index cy = std::clamp<Index>(static_cast<Index>(std::floor(fy)), 0, mesh.ny - 2);
    // candidate triangles from this cell and, near cell edges, its neighbors;
    // scanning in index order makes edge ties land on the lowest index
    std::vector<Index> cand;
    for (Index oy2 = (cy > 0 ? cy - 1 : cy); oy2 <= std::min(cy + 1, mesh.ny - 2); ++oy2)
      for (Index ox2 = (cx > 0 ? cx - 1 : cx); ox2 <= std::min(cx + 1, mesh.nx - 2); ++ox2) {
        Index cell = oy2 * (mesh.nx - 1) + ox2;
        cand.push_back(2 * cell);
        cand.push_back(2 * cell + 1);
      }
    std::sort(cand.begin(), cand.end());
    bool found = false;
    for (Index t : cand) {
      double lam[3];
      if (barycentric(mesh, t, px, py, lam) >= -kBaryTol) {
        const auto tri = mesh.triangles.row(t);
        double w[3];
        double sum = 0.0;
        for (int v = 0; v < 3; ++v) {
          w[v] = std::max(lam[v], 0.0);
          sum += w[v];
        }
        for (int v = 0; v < 3; ++v)
          if (w[v] > 0.0) entries.emplace_back(i, tri[v], w[v] / sum);
        found = true;
        break;
      }
    }
    if (!found) throw PointOutsideMesh(i);
  }
  Projector proj;
  proj.psi.resize(n, mesh.node_count());
  proj.psi.setFromTriplets(entries.begin(), entries.end());
  proj.psi.makeCompressed();
  return proj;
}

Vec evaluate(const Projector& proj, const Vec& nodal) {
  if (nodal.size() != proj.cols()) throw DimensionMismatch("nodal weights have wrong length");
  return proj.psi * nodal;
}

void export_mesh_csv(const TriMesh& mesh, const std::string& nodes_path,
                     const std::string& triangles_path) {
  std::ofstream nodes(nodes_path);
  if (!nodes) throw std::runtime_error("cannot open " + nodes_path);
  nodes.precision(17);
  nodes << "id,x,y,interior\n";
  for (Index i = 0; i < mesh.node_count(); ++i)
    nodes << i << "," << mesh.nodes(i, 0) << "," << mesh.nodes(i, 1) << ","
          << static_cast<int>(mesh.interior[i]) << "\n";
  std::ofstream tris(triangles_path);
  if (!tris) throw std::runtime_error("cannot open " + triangles_path);
  tris << "id,v0,v1,v2\n";
  for (Index t = 0; t < mesh.triangle_count(); ++t)
    tris << t << "," << mesh.triangles(t, 0) << "," << mesh.triangles(t, 1) << ","
         << mesh.triangles(t, 2) << "\n";
}

}  // namespace mgrf
