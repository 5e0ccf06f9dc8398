#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "solgeom/expr.hpp"
#include "solgeom/jet.hpp"
#include "solgeom/tensor.hpp"

namespace solgeom {

using Point = std::vector<double>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool periodic = false;
};

/// A single coordinate chart standing in for the manifold. Coordinate
/// singularities (poles, r = 0) are kept out of sampling by a margin at
/// every non-periodic end.
class Chart {
 public:
  static constexpr double kDefaultMarginFraction = 1e-3;

  Chart(std::vector<std::string> names, std::vector<Interval> domain,
        double margin_fraction = kDefaultMarginFraction);
  /// Unnamed chart: coordinates x1..xn.
  static Chart box(std::vector<Interval> domain);

  int dim() const { return static_cast<int>(domain_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Interval>& domain() const { return domain_; }
  const Interval& interval(int i) const { return domain_[static_cast<std::size_t>(i)]; }
  double margin(int i) const;
  bool has_periodic() const;
  /// The chart covers a closed manifold: every axis periodic (a torus), or
  /// declared so (round spheres, where the excluded set has measure zero).
  bool closed() const;
  void declare_closed(bool c) { declared_closed_ = c; }
  bool in_domain(std::span<const double> p) const;
  bool inside_margins(std::span<const double> p) const;

  ExprScope scope(const std::map<std::string, double>& constants = {}) const;

 private:
  std::vector<std::string> names_;
  std::vector<Interval> domain_;
  double margin_fraction_;
  bool declared_closed_ = false;
};

/// Jet-valued evaluators: each field is a function of seeded coordinates.
using ScalarEval = std::function<Jet(std::span<const Jet>)>;
using VectorEval = std::function<JetVector(std::span<const Jet>)>;
using TensorEval = std::function<JetMatrix(std::span<const Jet>)>;

class ScalarField {
 public:
  ScalarField() = default;
  static ScalarField from_expr(Expr e);
  static ScalarField from_eval(ScalarEval f, int value_order = 1);
  static ScalarField constant(double c);

  Jet operator()(std::span<const Jet> x) const { return eval_(x); }
  double value(std::span<const double> p) const;
  const std::optional<Expr>& expr() const { return expr_; }

 private:
  ScalarEval eval_;
  std::optional<Expr> expr_;
  int value_order_ = 1;
};

class VectorField {
 public:
  VectorField() = default;
  static VectorField from_exprs(std::vector<Expr> components);
  static VectorField from_eval(int dim, VectorEval f, int value_order = 1);
  static VectorField zero(int dim);
  /// x^i d/dx_i.
  static VectorField position(int dim);

  int dim() const { return dim_; }
  JetVector operator()(std::span<const Jet> x) const { return eval_(x); }
  Eigen::VectorXd value(std::span<const double> p) const;
  const std::vector<Expr>& exprs() const { return exprs_; }

  VectorField scaled(double c) const;
  VectorField operator+(const VectorField& o) const;

 private:
  int dim_ = 0;
  VectorEval eval_;
  std::vector<Expr> exprs_;
  int value_order_ = 1;
};

/// Symmetric (0,2) tensor field; expression form stores the upper triangle.
class SymTensorField {
 public:
  SymTensorField() = default;
  /// `upper` holds n(n+1)/2 entries row by row: g11 g12 .. g1n g22 .. gnn.
  static SymTensorField from_upper(int dim, std::vector<Expr> upper);
  static SymTensorField from_eval(int dim, TensorEval f, int value_order = 1);

  int dim() const { return dim_; }
  JetMatrix operator()(std::span<const Jet> x) const { return eval_(x); }
  Eigen::MatrixXd value(std::span<const double> p) const;
  const std::vector<Expr>& upper() const { return upper_; }

 private:
  int dim_ = 0;
  TensorEval eval_;
  std::vector<Expr> upper_;
  int value_order_ = 1;
};

struct Signature {
  int positive = 0;
  int negative = 0;
};

struct PointSample {
  std::vector<Point> points;
  std::vector<double> weights;
  std::size_t size() const { return points.size(); }
};

/// A symmetric nondegenerate tensor on a chart with a declared signature.
class MetricField {
 public:
  static constexpr double kDegenerateThreshold = 1e-10;

  MetricField(Chart chart, SymTensorField g, Signature signature);
  /// Riemannian metric (signature (n, 0)).
  MetricField(Chart chart, SymTensorField g);

  const Chart& chart() const { return chart_; }
  int dim() const { return chart_.dim(); }
  const SymTensorField& tensor() const { return g_; }
  const Signature& signature() const { return signature_; }

  JetMatrix operator()(std::span<const Jet> x) const { return g_(x); }
  Eigen::MatrixXd value(std::span<const double> p) const { return g_.value(p); }

  /// Checks |det g| and the eigenvalue sign counts at each point; throws
  /// DegenerateMetric or InvalidInput naming the first offending point.
  void verify(const PointSample& sample) const;
  /// Periodic coordinates must have matching metric values at identified
  /// endpoints (8 probe points, tolerance 1e-9).
  void verify_periodicity() const;

 private:
  Chart chart_;
  SymTensorField g_;
  Signature signature_;
};

std::string format_point(std::span<const double> p);

/// g^{-1} at p; throws DegenerateMetric when |det g| < 1e-10.
Eigen::MatrixXd metric_inverse(const MetricField& g, std::span<const double> p);

/// Hilbert-Schmidt inner product of two symmetric 2-tensors at p.
double hs_inner(const Eigen::MatrixXd& s, const Eigen::MatrixXd& t, const Eigen::MatrixXd& ginv);
double hs_inner(const SymTensorField& s, const SymTensorField& t, const MetricField& g,
                std::span<const double> p);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre(int n);

/// Tensor-product quadrature of phi * sqrt|det g| over the whole chart:
/// trapezoidal on periodic axes, Gauss-Legendre on the others. Nodes are
/// visited and summed in a fixed order.
double integrate(const std::function<double(std::span<const double>)>& phi, const MetricField& g,
                 std::span<const int> resolution);
double integrate(const std::function<double(std::span<const double>)>& phi, const MetricField& g,
                 int resolution);

/// Deterministic low-discrepancy (Halton, seeded Cranley-Patterson shift)
/// points strictly inside the chart margins, equal weights.
PointSample sample_points(const Chart& chart, int count, std::uint64_t seed);

}  // namespace solgeom
