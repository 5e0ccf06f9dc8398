#include "solgeom/fields.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "solgeom/error.hpp"

namespace solgeom {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
  while (index > 0) {
    r += static_cast<double>(index % base) * f;
    index /= base;
    f *= inv;
  }
  return r;
}

constexpr std::uint64_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

std::vector<Jet> constant_point(std::span<const double> p, int order) {
  return seed_point(p, std::max(order, 1));
}

}  // namespace

// ---- Chart ---------------------------------------------------------------

Chart::Chart(std::vector<std::string> names, std::vector<Interval> domain, double margin_fraction)
    : names_(std::move(names)), domain_(std::move(domain)), margin_fraction_(margin_fraction) {
  if (domain_.empty()) throw InvalidInput("chart dimension must be >= 1");
  if (static_cast<int>(domain_.size()) > kMaxJetDim)
    throw InvalidInput("chart dimension exceeds " + std::to_string(kMaxJetDim));
  if (names_.empty()) {
    for (std::size_t i = 0; i < domain_.size(); ++i) names_.push_back("x" + std::to_string(i + 1));
  }
  if (names_.size() != domain_.size()) throw InvalidInput("coordinate names do not match dimension");
  for (std::size_t i = 0; i < domain_.size(); ++i) {
    const auto& iv = domain_[i];
    if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo < iv.hi))
      throw InvalidInput("empty or non-finite interval for coordinate " + names_[i]);
  }
}

Chart Chart::box(std::vector<Interval> domain) { return Chart({}, std::move(domain)); }

double Chart::margin(int i) const {
  const auto& iv = interval(i);
  return iv.periodic ? 0.0 : margin_fraction_ * (iv.hi - iv.lo);
}

bool Chart::has_periodic() const {
  for (const auto& iv : domain_)
    if (iv.periodic) return true;
  return false;
}

bool Chart::closed() const {
  if (declared_closed_) return true;
  for (const auto& iv : domain_)
    if (!iv.periodic) return false;
  return true;
}

bool Chart::in_domain(std::span<const double> p) const {
  for (int i = 0; i < dim(); ++i) {
    const auto& iv = interval(i);
    if (iv.periodic) continue;
    if (p[static_cast<std::size_t>(i)] < iv.lo || p[static_cast<std::size_t>(i)] > iv.hi) return false;
  }
  return true;
}

bool Chart::inside_margins(std::span<const double> p) const {
  for (int i = 0; i < dim(); ++i) {
    const auto& iv = interval(i);
    const double x = p[static_cast<std::size_t>(i)];
    if (iv.periodic) {
      if (x < iv.lo || x >= iv.hi) return false;
      continue;
    }
    if (x < iv.lo + margin(i) || x > iv.hi - margin(i)) return false;
  }
  return true;
}

ExprScope Chart::scope(const std::map<std::string, double>& constants) const {
  ExprScope s;
  s.dim = dim();
  s.aliases = names_;
  s.constants = constants;
  return s;
}

// ---- fields ------------------------------------------------------------------

ScalarField ScalarField::from_expr(Expr e) {
  ScalarField f;
  f.eval_ = [e](std::span<const Jet> x) { return e.evaluate(x); };
  f.expr_ = std::move(e);
  return f;
}

ScalarField ScalarField::from_eval(ScalarEval fn, int value_order) {
  ScalarField f;
  f.eval_ = std::move(fn);
  f.value_order_ = value_order;
  return f;
}

ScalarField ScalarField::constant(double c) { return from_expr(Expr::number(c)); }

double ScalarField::value(std::span<const double> p) const {
  if (expr_) return expr_->evaluate(p);
  return eval_(constant_point(p, value_order_)).value();
}

VectorField VectorField::from_exprs(std::vector<Expr> components) {
  VectorField v;
  v.dim_ = static_cast<int>(components.size());
  v.eval_ = [components](std::span<const Jet> x) {
    JetVector out;
    out.reserve(components.size());
    for (const auto& c : components) out.push_back(c.evaluate(x));
    return out;
  };
  v.exprs_ = std::move(components);
  return v;
}

VectorField VectorField::from_eval(int dim, VectorEval fn, int value_order) {
  VectorField v;
  v.dim_ = dim;
  v.eval_ = std::move(fn);
  v.value_order_ = value_order;
  return v;
}

VectorField VectorField::zero(int dim) {
  std::vector<Expr> c(static_cast<std::size_t>(dim), Expr::number(0.0));
  return from_exprs(std::move(c));
}

VectorField VectorField::position(int dim) {
  std::vector<Expr> c;
  for (int i = 0; i < dim; ++i) c.push_back(Expr::coordinate(i, "x" + std::to_string(i + 1)));
  return from_exprs(std::move(c));
}

Eigen::VectorXd VectorField::value(std::span<const double> p) const {
  Eigen::VectorXd out(dim_);
  if (!exprs_.empty()) {
    for (int i = 0; i < dim_; ++i) out(i) = exprs_[static_cast<std::size_t>(i)].evaluate(p);
    return out;
  }
  return values(eval_(constant_point(p, value_order_)));
}

VectorField VectorField::scaled(double c) const {
  VectorEval base = eval_;
  return from_eval(
      dim_,
      [base, c](std::span<const Jet> x) {
        JetVector v = base(x);
        for (auto& j : v) j *= c;
        return v;
      },
      value_order_);
}

VectorField VectorField::operator+(const VectorField& o) const {
  if (o.dim_ != dim_) throw InvalidInput("vector field dimension mismatch");
  VectorEval a = eval_, b = o.eval_;
  return from_eval(
      dim_,
      [a, b](std::span<const Jet> x) {
        JetVector u = a(x), v = b(x);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] += v[i];
        return u;
      },
      std::max(value_order_, o.value_order_));
}

SymTensorField SymTensorField::from_upper(int dim, std::vector<Expr> upper) {
  if (static_cast<int>(upper.size()) != dim * (dim + 1) / 2)
    throw InvalidInput("symmetric tensor needs n(n+1)/2 = " + std::to_string(dim * (dim + 1) / 2) +
                       " entries, got " + std::to_string(upper.size()));
  SymTensorField t;
  t.dim_ = dim;
  t.eval_ = [dim, upper](std::span<const Jet> x) {
    JetMatrix m(dim, Jet::constant_like(x.front(), 0.0));
    std::size_t k = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        m(i, j) = upper[k++].evaluate(x);
        if (i != j) m(j, i) = m(i, j);
      }
    return m;
  };
  t.upper_ = std::move(upper);
  return t;
}

SymTensorField SymTensorField::from_eval(int dim, TensorEval fn, int value_order) {
  SymTensorField t;
  t.dim_ = dim;
  t.eval_ = std::move(fn);
  t.value_order_ = value_order;
  return t;
}

Eigen::MatrixXd SymTensorField::value(std::span<const double> p) const {
  if (!upper_.empty()) {
    Eigen::MatrixXd m(dim_, dim_);
    std::size_t k = 0;
    for (int i = 0; i < dim_; ++i)
      for (int j = i; j < dim_; ++j) {
        m(i, j) = upper_[k++].evaluate(p);
        m(j, i) = m(i, j);
      }
    return m;
  }
  return values(eval_(constant_point(p, value_order_)));
}

// ---- metric --------------------------------------------------------------------

MetricField::MetricField(Chart chart, SymTensorField g, Signature signature)
    : chart_(std::move(chart)), g_(std::move(g)), signature_(signature) {
  if (g_.dim() != chart_.dim()) throw InvalidInput("metric dimension does not match chart");
  if (signature_.positive + signature_.negative != chart_.dim())
    throw InvalidInput("signature (p, q) must satisfy p + q = n");
  if (chart_.has_periodic()) verify_periodicity();
}

MetricField::MetricField(Chart chart, SymTensorField g)
    : MetricField(chart, std::move(g), Signature{chart.dim(), 0}) {}

std::string format_point(std::span<const double> p) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ')';
  return os.str();
}

void MetricField::verify(const PointSample& sample) const {
  for (const auto& p : sample.points) {
    Eigen::MatrixXd m = value(p);
    const double det = m.determinant();
    if (!(std::abs(det) >= kDegenerateThreshold))
      throw DegenerateMetric("degenerate metric at " + format_point(p) + ": |det g| = " +
                             std::to_string(std::abs(det)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    int pos = 0, neg = 0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) (eig.eigenvalues()(i) > 0 ? pos : neg)++;
    if (pos != signature_.positive || neg != signature_.negative)
      throw InvalidInput("metric signature at " + format_point(p) + " is (" + std::to_string(pos) +
                         ", " + std::to_string(neg) + "), declared (" +
                         std::to_string(signature_.positive) + ", " +
                         std::to_string(signature_.negative) + ")");
  }
}

void MetricField::verify_periodicity() const {
  const PointSample probes = sample_points(chart_, 8, 0x5eed);
  for (int axis = 0; axis < chart_.dim(); ++axis) {
    const auto& iv = chart_.interval(axis);
    if (!iv.periodic) continue;
    for (Point p : probes.points) {
      p[static_cast<std::size_t>(axis)] = iv.lo;
      Eigen::MatrixXd a = value(p);
      p[static_cast<std::size_t>(axis)] = iv.hi;
      Eigen::MatrixXd b = value(p);
      if ((a - b).cwiseAbs().maxCoeff() > 1e-9)
        throw InvalidInput("metric is not periodic in coordinate " + chart_.names()[static_cast<std::size_t>(axis)] +
                           " near " + format_point(p));
    }
  }
}

Eigen::MatrixXd metric_inverse(const MetricField& g, std::span<const double> p) {
  Mat<double> m = to_mat(g.value(p));
  double det = 0.0;
  Mat<double> inv;
  try {
    inv = invert(m, &det);
  } catch (const DegenerateMetric&) {
    det = 0.0;
  }
  if (!(std::abs(det) >= MetricField::kDegenerateThreshold))
    throw DegenerateMetric("degenerate metric at " + format_point(p));
  return to_eigen(inv);
}

double hs_inner(const Eigen::MatrixXd& s, const Eigen::MatrixXd& t, const Eigen::MatrixXd& ginv) {
  return (ginv * s * ginv * t).trace();
}

double hs_inner(const SymTensorField& s, const SymTensorField& t, const MetricField& g,
                std::span<const double> p) {
  return hs_inner(s.value(p), t.value(p), metric_inverse(g, p));
}

// ---- quadrature ------------------------------------------------------------------

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw InvalidInput("Gauss-Legendre rule needs at least one node");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

double integrate(const std::function<double(std::span<const double>)>& phi, const MetricField& g,
                 std::span<const int> resolution) {
  const Chart& chart = g.chart();
  const int n = chart.dim();
  if (static_cast<int>(resolution.size()) != n)
    throw InvalidInput("resolution must list one count per axis");
  std::vector<std::vector<double>> nodes(static_cast<std::size_t>(n)), weights(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const int r = resolution[static_cast<std::size_t>(a)];
    if (r < 8) throw InvalidInput("quadrature resolution must be >= 8 per axis");
    const auto& iv = chart.interval(a);
    const double len = iv.hi - iv.lo;
    auto& xs = nodes[static_cast<std::size_t>(a)];
    auto& ws = weights[static_cast<std::size_t>(a)];
    if (iv.periodic) {
      for (int k = 0; k < r; ++k) {
        xs.push_back(iv.lo + len * k / r);
        ws.push_back(len / r);
      }
    } else {
      QuadratureRule rule = gauss_legendre(r);
      for (int k = 0; k < r; ++k) {
        xs.push_back(iv.lo + 0.5 * len * (rule.nodes[static_cast<std::size_t>(k)] + 1.0));
        ws.push_back(0.5 * len * rule.weights[static_cast<std::size_t>(k)]);
      }
    }
  }
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Point p(static_cast<std::size_t>(n));
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (int a = 0; a < n; ++a) {
      p[static_cast<std::size_t>(a)] = nodes[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
      w *= weights[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
    }
    const double f = phi(p);
    const double vol = std::sqrt(std::abs(g.value(p).determinant()));
    if (!std::isfinite(f) || !std::isfinite(vol))
      throw DomainError("non-finite integrand at node " + format_point(p));
    total += w * f * vol;
    int a = n - 1;
    while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == resolution[static_cast<std::size_t>(a)]) {
      idx[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return total;
}

double integrate(const std::function<double(std::span<const double>)>& phi, const MetricField& g,
                 int resolution) {
  std::vector<int> r(static_cast<std::size_t>(g.dim()), resolution);
  return integrate(phi, g, r);
}

// ---- sampling -------------------------------------------------------------------

PointSample sample_points(const Chart& chart, int count, std::uint64_t seed) {
  if (count < 1) throw InvalidInput("sample size must be >= 1");
  const int n = chart.dim();
  std::uint64_t state = seed;
  std::vector<double> shift(static_cast<std::size_t>(n));
  for (auto& s : shift) s = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;

  PointSample out;
  out.points.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Point p(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      double u = radical_inverse(static_cast<std::uint64_t>(k) + 1, kPrimes[a]) + shift[static_cast<std::size_t>(a)];
      u -= std::floor(u);
      const auto& iv = chart.interval(a);
      if (iv.periodic) {
        p[static_cast<std::size_t>(a)] = iv.lo + u * (iv.hi - iv.lo);
      } else {
        if (u == 0.0) u = 0.5;
        const double m = chart.margin(a);
        p[static_cast<std::size_t>(a)] = iv.lo + m + u * (iv.hi - iv.lo - 2.0 * m);
      }
    }
    out.points.push_back(std::move(p));
  }
  out.weights.assign(static_cast<std::size_t>(count), 1.0 / count);
  return out;
}

}  // namespace solgeom
