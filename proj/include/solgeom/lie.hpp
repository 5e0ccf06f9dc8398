#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "solgeom/curvature.hpp"
#include "solgeom/fields.hpp"

namespace solgeom {

/// (L_W T)_ij = W^k d_k T_ij + T_kj d_i W^k + T_ik d_j W^k for jets at a
/// seeded point. Costs one jet order.
JetMatrix lie_derivative(const JetVector& W, const JetMatrix& T);

/// 2 * symmetrized, lowered nabla W: nabla_i W_j + nabla_j W_i. Equals L_W g.
JetMatrix killing_form(LocalGeometry& geo, const JetVector& W);

/// L_W g at p.
Eigen::MatrixXd lie_metric(const MetricField& g, const VectorField& W, std::span<const double> p);
/// L_W L_W g at p: the Lie derivative of the computed field q -> (L_W g)(q).
Eigen::MatrixXd lie_lie_metric(const MetricField& g, const VectorField& W, std::span<const double> p,
                               int order = kDefaultJetOrder);
/// L_W T at p for a (possibly derived) symmetric tensor field T.
Eigen::MatrixXd lie_tensor(const MetricField& g, const VectorField& W, const SymTensorField& T,
                           std::span<const double> p, int order = kDefaultJetOrder);

/// The Ricci tensor of g as a field, evaluable at any seeded point.
SymTensorField ricci_field(const MetricField& g);
/// p -> (L_W g)(p) as a field.
SymTensorField lie_metric_field(const MetricField& g, const VectorField& W);

struct LieReport {
  std::vector<Eigen::MatrixXd> lie_g;
  std::vector<Eigen::MatrixXd> lie_lie_g;
  std::vector<double> lie_g_norm;      // max |component|
  std::vector<double> lie_lie_g_norm;  // max |component|
  bool killing = false;
  bool two_killing = false;
  double tolerance = 0.0;
};

LieReport classify(const MetricField& g, const VectorField& W, const PointSample& sample, double tol);

}  // namespace solgeom
