// Structured triangulation of a rectangle with an optional extension ring,
// piecewise-linear FEM matrices, and the observation projector.
#pragma once

#include "mgrf/sparse.hpp"
#include "mgrf/types.hpp"

#include <string>
#include <vector>

namespace mgrf {

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

inline Rect unit_square() { return Rect{0.0, 0.0, 1.0, 1.0}; }

struct TriMesh {
  Mat nodes;                       // M x 2
  Eigen::MatrixXi triangles;       // T x 3, counter-clockwise
  std::vector<char> interior;      // 1 when the node lies in the inference domain
  Rect domain;                     // inference domain (without extension)
  // structured-grid bookkeeping for O(1) point location
  Index nx = 0, ny = 0;
  double ox = 0.0, oy = 0.0, dx = 0.0, dy = 0.0;

  Index node_count() const { return nodes.rows(); }
  Index triangle_count() const { return triangles.rows(); }
};

struct FemMatrices {
  SparseSym mass;       // lumped (diagonal)
  SparseSym stiffness;  // P1 stiffness, G 1 = 0
  Vec mass_diag;
  double total_area = 0.0;
};

struct Projector {
  SpMat psi;  // n x M, row i = barycentric weights of location i
  Index rows() const { return psi.rows(); }
  Index cols() const { return psi.cols(); }
};

// Structured grid over the domain plus an extension ring of width
// extension_fraction * domain diameter; cells split along alternating
// diagonals. Node count lands within 15% of target_nodes.
TriMesh build_mesh(const Rect& domain, Index target_nodes, double extension_fraction);

FemMatrices assemble_fem(const TriMesh& mesh);

Projector project(const TriMesh& mesh, const Mat& locations);

// Evaluates the piecewise-linear field with nodal weights at the locations.
Vec evaluate(const Projector& proj, const Vec& nodal);

void export_mesh_csv(const TriMesh& mesh, const std::string& nodes_path,
                     const std::string& triangles_path);

}  // namespace mgrf
