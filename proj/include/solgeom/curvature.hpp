#pragma once

// Levi-Civita connection and curvature of a metric at a point.
//
// Sign convention (the only place it is fixed):
//   R^l_ijk = d_j Gamma^l_ki - d_k Gamma^l_ji + Gamma^l_jm Gamma^m_ki - Gamma^l_km Gamma^m_ji
//   Ric_ij  = R^k_ikj,   R = g^ij Ric_ij,   Q^i_j = g^ik Ric_kj
// With it the unit round sphere has Ric = g and R = n(n-1) > 0.
//
// Every quantity is computed on jets seeded at the point, so each result is
// itself a jet and can be differentiated again (divergence of a curvature
// tensor, Lie derivative of a Lie derivative, ...). Each derivative costs one
// jet order.

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "solgeom/check.hpp"
#include "solgeom/fields.hpp"
#include "solgeom/jet.hpp"
#include "solgeom/tensor.hpp"

namespace solgeom {

class LocalGeometry {
 public:
  LocalGeometry(const MetricField& g, std::span<const double> p, int order = kDefaultJetOrder);
  /// From metric jets already evaluated at seeded coordinates `x`.
  LocalGeometry(JetMatrix g, std::vector<Jet> x);

  int dim() const { return n_; }
  int order() const { return x_.front().order(); }
  const std::vector<Jet>& x() const { return x_; }
  const Point& point() const { return point_; }

  const JetMatrix& g() const { return g_; }
  const JetMatrix& ginv();
  /// dg(k, i, j) = d_k g_ij.
  const Arr3<Jet>& dg();
  /// gamma(k, i, j) = Gamma^k_ij.
  const Arr3<Jet>& christoffel();
  const Arr4<Jet>& riemann();
  const JetMatrix& ricci();
  const Jet& scalar_curvature();
  /// Q(i, j) = Q^i_j.
  const JetMatrix& ricci_operator();

  JetVector gradient(const Jet& phi);
  JetMatrix hessian(const Jet& phi);
  Jet laplacian(const Jet& phi);

  /// m(i, j) = nabla_j X^i.
  JetMatrix covariant_derivative(const JetVector& X);
  /// t(k, i, j) = (nabla_k S)_ij.
  Arr3<Jet> covariant_derivative(const JetMatrix& S);
  Jet divergence(const JetVector& X);
  /// (div S)_j = g^ik (nabla_i S)_kj.
  JetVector divergence(const JetMatrix& S);

  /// Lowered index: X_i = g_ij X^j; raised: g^ij w_j.
  JetVector lower(const JetVector& X) const;
  JetVector raise(const JetVector& w);
  /// S(X, Y) = S_ij X^i Y^j.
  static Jet contract(const JetMatrix& S, const JetVector& X, const JetVector& Y);
  /// Hilbert-Schmidt norm squared of a (1,1) tensor m(i, j) = A^i_j:
  /// g_ik g^jl A^i_j A^k_l.
  Jet mixed_norm2(const JetMatrix& A);

  /// Max over |nabla_k g_ij|; zero up to rounding for the Levi-Civita connection.
  double metric_compatibility_defect();

  Jet zero() const { return Jet::constant_like(x_.front(), 0.0); }

 private:
  int n_;
  Point point_;
  std::vector<Jet> x_;
  JetMatrix g_;
  std::optional<JetMatrix> ginv_;
  std::optional<Arr3<Jet>> dg_;
  std::optional<Arr3<Jet>> gamma_;
  std::optional<Arr4<Jet>> riemann_;
  std::optional<JetMatrix> ricci_;
  std::optional<Jet> scalar_;
  std::optional<JetMatrix> q_;
};

/// Point values of every curvature object.
struct CurvatureBundle {
  Arr3<double> gamma;     // Gamma^k_ij
  Arr4<double> riemann;   // R^l_ijk
  Eigen::MatrixXd ricci;
  double scalar = 0.0;
  Eigen::MatrixXd ricci_operator;  // Q^i_j
};

Arr3<double> christoffel(const MetricField& g, std::span<const double> p);
/// Metric compatibility, Riemann skew and pair symmetry, first Bianchi, and
/// div Ric = dR / 2, one row each.
std::vector<CheckReport> curvature_checks(const MetricField& g, const PointSample& sample, double tol);
CurvatureBundle curvature_at(const MetricField& g, std::span<const double> p);

struct ScalarFieldOps {
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  double laplacian = 0.0;
};
ScalarFieldOps scalar_field_ops(const MetricField& g, const ScalarField& phi, std::span<const double> p);

double divergence(const MetricField& g, const VectorField& X, std::span<const double> p);
/// Divergence of a symmetric tensor field given as a jet evaluator; derived
/// fields (curvature, Lie derivatives) are passed as such evaluators.
Eigen::VectorXd divergence(const MetricField& g, const SymTensorField& S, std::span<const double> p,
                           int order = kDefaultJetOrder);

template <typename T>
Arr3<double> values(const Arr3<T>& a) {
  Arr3<double> out(a.size(), 0.0);
  for (int k = 0; k < a.size(); ++k)
    for (int i = 0; i < a.size(); ++i)
      for (int j = 0; j < a.size(); ++j) out(k, i, j) = value_of(a(k, i, j));
  return out;
}

}  // namespace solgeom
