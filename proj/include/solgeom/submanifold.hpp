#pragma once

// Submanifolds of flat semi-Euclidean space R^{n+m} with metric diag(eps_a),
// eps_a = +-1. The position vector X is the concurrent field; it splits into
// W_top (tangent) and W_perp (normal).
//
// Conventions:
//   h(d_i, d_j)  = normal part of d_i d_j X
//   <A_V d_i, d_j> = <h_ij, V>                 (V normal)
//   A_nu U       = -(d_U nu)^tangent            (Weingarten)
// For hypersurfaces the unit normal is oriented by det[J | nu] > 0, which is
// outward for the usual sphere and cylinder parametrizations.

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "solgeom/check.hpp"
#include "solgeom/curvature.hpp"
#include "solgeom/fields.hpp"

namespace solgeom {

struct Immersion {
  Chart chart;
  std::vector<Expr> components;  // X^a, a = 1..N
  std::vector<double> ambient;   // eps_a
  Signature signature;           // of the induced metric

  int dim() const { return chart.dim(); }
  int ambient_dim() const { return static_cast<int>(components.size()); }
  int codim() const { return ambient_dim() - dim(); }
};

/// Validates sizes and ambient signs. When `signature` is absent it is read
/// off the induced metric at the chart center.
Immersion make_immersion(Chart chart, std::vector<Expr> components, std::vector<double> ambient = {},
                         std::optional<Signature> signature = std::nullopt);

MetricField induced_metric(const Immersion& imm);
/// W_top as an intrinsic vector field: (W_top)^i = g^ij <d_j X, X>.
VectorField tangential_position_field(const Immersion& imm);
/// psi = <X, X> / 2, whose gradient is W_top.
ScalarField half_square_norm(const Immersion& imm);

/// All extrinsic quantities on jets at one point.
class ImmersionGeometry {
 public:
  ImmersionGeometry(const Immersion& imm, std::span<const double> p, int order = kDefaultJetOrder);
  ImmersionGeometry(const Immersion& imm, std::vector<Jet> x);

  int dim() const { return n_; }
  int ambient_dim() const { return N_; }
  LocalGeometry& intrinsic() { return *geo_; }

  Jet inner(const JetVector& a, const JetVector& b) const;
  const JetVector& position() const { return X_; }
  const std::vector<JetVector>& tangents() const { return dX_; }
  JetVector second_partial(int i, int j) const;
  /// Normal part of d_i d_j X.
  const JetVector& h(int i, int j);
  /// Orthonormal normal frame and the signs <nu_a, nu_a>.
  const std::vector<JetVector>& normals();
  const std::vector<double>& normal_signs();

  /// Components of the tangential part: g^ij <d_j X, V>.
  JetVector tangent_components(const JetVector& V);
  JetVector normal_part(const JetVector& V);
  /// <h_ij, V>.
  JetMatrix shape_lowered(const JetVector& V);
  /// m(i, j) = (A_V)^i_j.
  JetMatrix shape_operator(const JetVector& V);
  /// -(d nu_a)^tangent as m(i, j) = (A_a)^i_j, straight from the derivative of the normal.
  JetMatrix weingarten(int a);

  JetVector w_tangent() { return tangent_components(X_); }
  JetVector w_normal() { return normal_part(X_); }

 private:
  void build(const Immersion& imm, std::vector<Jet> x);

  int n_ = 0, N_ = 0;
  std::vector<double> eps_;
  JetVector X_;
  std::vector<JetVector> dX_;  // dX_[i][a] = d_i X^a
  std::optional<LocalGeometry> geo_;
  std::vector<std::optional<JetVector>> h_;
  std::vector<JetVector> normals_;
  std::vector<double> normal_signs_;
};

/// Point values of the extrinsic data.
struct HypersurfaceData {
  Eigen::MatrixXd g;
  Eigen::MatrixXd normals;                 // N x m, columns nu_a
  std::vector<double> normal_signs;
  std::vector<Eigen::MatrixXd> h;          // h[a](i, j) = <h_ij, nu_a>
  std::vector<Eigen::MatrixXd> shape;      // shape[a](i, j) = (A_{nu_a})^i_j
  Eigen::MatrixXd tangent_projector;       // N x N
  Eigen::MatrixXd normal_projector;
};

/// Throws DegenerateMetric when the Jacobian's smallest singular value is below 1e-8.
HypersurfaceData immerse(const Immersion& imm, std::span<const double> p);

struct ConcurrentSplit {
  Eigen::VectorXd tangent;          // W_top components in the chart
  Eigen::VectorXd tangent_ambient;  // W_top as an ambient vector
  Eigen::VectorXd normal;           // W_perp
  double concurrency_defect = 0.0;  // max |nabla-bar W - I|
};
ConcurrentSplit concurrent_decompose(const Immersion& imm, std::span<const double> p);

/// Gauss formula, Weingarten formula, shape operator symmetry and the Gauss equation.
std::vector<CheckReport> gauss_weingarten_check(const Immersion& imm, const PointSample& sample, double tol);

/// nabla W_top = I + A, L_{W_top} g = 2(g + A), and the second Lie derivative
/// 2(2g + 4A + 2A^2 + nabla_{W_top} A), each intrinsic vs shape-operator side;
/// A = A_{W_perp}. An info row gives the variant with U in the last slot.
std::vector<CheckReport> tangential_lie_check(const Immersion& imm, const PointSample& sample, double tol);

struct MetallicFit {
  double r = 0.0;
  double s = 0.0;
  double residual = 0.0;  // max over sample of max |A^2 - rA - sI|
};

struct ShapeClass {
  MetallicFit metallic;
  bool umbilical = false;
  std::vector<double> umbilic_factor;  // f = trace A / n per point
  bool geodesic = false;
  bool minimal = false;
};

/// Hypersurfaces only; A = A_{W_perp} for the metallic fit and umbilicity,
/// A_nu for the geodesic and minimal flags.
ShapeClass shape_classify(const Immersion& imm, const PointSample& sample, double tol);

/// Least-squares (r, s) for A^2 = rA + sI over a set of (1,1) matrices; the
/// minimum-norm solution when A vanishes.
MetallicFit fit_metallic(const std::vector<Eigen::MatrixXd>& shapes);

/// Parallel shape operator soliton relation, umbilical scalar, Yano integrand
/// through the shape operator, and the Bochner identity for minimal
/// submanifolds. `psi` defaults to <X, X> / 2.
std::vector<CheckReport> prop_checks(const Immersion& imm, double lambda, const PointSample& sample,
                                     int resolution, double tol, std::optional<ScalarField> psi = std::nullopt);

}  // namespace solgeom
