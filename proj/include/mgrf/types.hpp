// Common scalar/vector aliases and the error types thrown across the library.
#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mgrf {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using IVec = Eigen::VectorXi;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct NotPositiveDefinite : std::runtime_error {
  Index pivot_index;
  explicit NotPositiveDefinite(Index k)
      : std::runtime_error("matrix not positive definite at pivot " + std::to_string(k)),
        pivot_index(k) {}
};

struct DegenerateDomain : std::runtime_error {
  explicit DegenerateDomain(const std::string& what) : std::runtime_error(what) {}
};

struct PointOutsideMesh : std::runtime_error {
  Index point_index;
  explicit PointOutsideMesh(Index i)
      : std::runtime_error("location " + std::to_string(i) + " lies outside the mesh"),
        point_index(i) {}
};

struct NonPositiveInput : std::runtime_error {
  explicit NonPositiveInput(const std::string& what) : std::runtime_error(what) {}
};

struct RhoTooExtreme : std::runtime_error {
  double rho;
  explicit RhoTooExtreme(double r)
      : std::runtime_error("|rho| too close to 1 for the closed-form conditional; use the shift construction"),
        rho(r) {}
};

struct EmptyInput : std::runtime_error {
  explicit EmptyInput(const std::string& what) : std::runtime_error(what) {}
};

struct OutOfSupport : std::runtime_error {
  double value;
  explicit OutOfSupport(double v)
      : std::runtime_error("value outside the prior support"), value(v) {}
};

struct AtBaseModel : std::runtime_error {
  AtBaseModel() : std::runtime_error("density requested at the base model rho = 0; treat as a limit") {}
};

struct NoSolution : std::runtime_error {
  explicit NoSolution(const std::string& what) : std::runtime_error(what) {}
};

struct SingularConditional : std::runtime_error {
  explicit SingularConditional(const std::string& what) : std::runtime_error(what) {}
};

struct RankDeficientDesign : std::runtime_error {
  explicit RankDeficientDesign(const std::string& what) : std::runtime_error(what) {}
};

struct MissingColumn : std::runtime_error {
  std::string column;
  explicit MissingColumn(const std::string& name)
      : std::runtime_error("missing column: " + name), column(name) {}
};

struct UnparseableRow : std::runtime_error {
  Index line;
  explicit UnparseableRow(Index l, const std::string& what)
      : std::runtime_error("unparseable row at line " + std::to_string(l) + ": " + what),
        line(l) {}
};

struct ZeroVariance : std::runtime_error {
  std::string variable;
  explicit ZeroVariance(const std::string& name)
      : std::runtime_error("variable has zero sample variance: " + name), variable(name) {}
};

struct NonPositiveSigma : std::runtime_error {
  NonPositiveSigma() : std::runtime_error("predictive standard deviation must be positive") {}
};

}  // namespace mgrf
