#include "solgeom/lie.hpp"

#include <algorithm>

#include "solgeom/check.hpp"
#include "solgeom/error.hpp"

namespace solgeom {

JetMatrix lie_derivative(const JetVector& W, const JetMatrix& T) {
  const int n = T.size();
  if (static_cast<int>(W.size()) != n) throw InvalidInput("vector field and tensor dimensions differ");
  // dW(i, k) = d_i W^k
  Mat<Jet> dW(n, Jet::constant_like(W.front(), 0.0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) dW(i, k) = W[static_cast<std::size_t>(k)].derivative(i);
  JetMatrix out(n, Jet::constant_like(W.front(), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet s = Jet::constant_like(W.front(), 0.0);
      for (int k = 0; k < n; ++k) {
        s += W[static_cast<std::size_t>(k)] * T(i, j).derivative(k);
        s += T(k, j) * dW(i, k) + T(i, k) * dW(j, k);
      }
      out(i, j) = s;
      out(j, i) = std::move(s);
    }
  return out;
}

JetMatrix killing_form(LocalGeometry& geo, const JetVector& W) {
  const int n = geo.dim();
  JetMatrix nabla = geo.covariant_derivative(W);  // nabla(k, i) = nabla_i W^k
  const auto& g = geo.g();
  // lowered(i, j) = nabla_i W_j = g_jk nabla_i W^k
  JetMatrix lowered(n, geo.zero());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) lowered(i, j) += g(j, k) * nabla(k, i);
  JetMatrix out(n, geo.zero());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = lowered(i, j) + lowered(j, i);
  return out;
}

Eigen::MatrixXd lie_metric(const MetricField& g, const VectorField& W, std::span<const double> p) {
  auto x = seed_point(p, 1);
  return values(lie_derivative(W(x), g(x)));
}

Eigen::MatrixXd lie_lie_metric(const MetricField& g, const VectorField& W, std::span<const double> p,
                               int order) {
  if (order < 2) throw InsufficientOrder(2, order);
  auto x = seed_point(p, order);
  JetVector w = W(x);
  return values(lie_derivative(w, lie_derivative(w, g(x))));
}

Eigen::MatrixXd lie_tensor(const MetricField& g, const VectorField& W, const SymTensorField& T,
                           std::span<const double> p, int order) {
  if (T.dim() != g.dim()) throw InvalidInput("tensor field dimension does not match metric");
  auto x = seed_point(p, order);
  return values(lie_derivative(W(x), T(x)));
}

SymTensorField ricci_field(const MetricField& g) {
  return SymTensorField::from_eval(
      g.dim(),
      [g](std::span<const Jet> x) {
        LocalGeometry geo(g(x), std::vector<Jet>(x.begin(), x.end()));
        return geo.ricci();
      },
      2);
}

SymTensorField lie_metric_field(const MetricField& g, const VectorField& W) {
  return SymTensorField::from_eval(
      g.dim(), [g, W](std::span<const Jet> x) { return lie_derivative(W(x), g(x)); }, 1);
}

LieReport classify(const MetricField& g, const VectorField& W, const PointSample& sample, double tol) {
  LieReport report;
  report.tolerance = tol;
  double worst_l = 0.0, worst_ll = 0.0;
  for (const auto& p : sample.points) {
    auto x = seed_point(p, 2);
    JetVector w = W(x);
    JetMatrix lg = lie_derivative(w, g(x));
    JetMatrix llg = lie_derivative(w, lg);
    report.lie_g.push_back(values(lg));
    report.lie_lie_g.push_back(values(llg));
    report.lie_g_norm.push_back(max_abs(report.lie_g.back()));
    report.lie_lie_g_norm.push_back(max_abs(report.lie_lie_g.back()));
    worst_l = std::max(worst_l, report.lie_g_norm.back());
    worst_ll = std::max(worst_ll, report.lie_lie_g_norm.back());
  }
  report.killing = worst_l <= tol;
  report.two_killing = worst_ll <= tol;
  return report;
}

}  // namespace solgeom
