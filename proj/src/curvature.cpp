#include "solgeom/curvature.hpp"

#include <cmath>
#include <utility>

#include "solgeom/error.hpp"

namespace solgeom {

LocalGeometry::LocalGeometry(const MetricField& g, std::span<const double> p, int order)
    : n_(g.dim()), point_(p.begin(), p.end()), x_(seed_point(p, order)), g_(g(x_)) {}

LocalGeometry::LocalGeometry(JetMatrix g, std::vector<Jet> x)
    : n_(g.size()), x_(std::move(x)), g_(std::move(g)) {
  point_.reserve(x_.size());
  for (const auto& xi : x_) point_.push_back(xi.value());
}

const JetMatrix& LocalGeometry::ginv() {
  if (!ginv_) {
    double det = 0.0;
    try {
      ginv_ = invert(g_, &det);
    } catch (const DegenerateMetric&) {
      det = 0.0;
    }
    if (!(std::abs(det) >= MetricField::kDegenerateThreshold))
      throw DegenerateMetric("degenerate metric at " + format_point(point_));
  }
  return *ginv_;
}

const Arr3<Jet>& LocalGeometry::dg() {
  if (!dg_) {
    Arr3<Jet> d(n_, zero());
    for (int k = 0; k < n_; ++k)
      for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) {
          d(k, i, j) = g_(i, j).derivative(k);
          d(k, j, i) = d(k, i, j);
        }
    dg_ = std::move(d);
  }
  return *dg_;
}

const Arr3<Jet>& LocalGeometry::christoffel() {
  if (!gamma_) {
    const auto& gi = ginv();
    const auto& d = dg();
    // Christoffel symbols of the first kind: [ij,l] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    Arr3<Jet> first(n_, zero());
    for (int l = 0; l < n_; ++l)
      for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) {
          first(l, i, j) = 0.5 * (d(i, j, l) + d(j, i, l) - d(l, i, j));
          first(l, j, i) = first(l, i, j);
        }
    Arr3<Jet> gamma(n_, zero());
    for (int k = 0; k < n_; ++k)
      for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) {
          Jet s = zero();
          for (int l = 0; l < n_; ++l) s += gi(k, l) * first(l, i, j);
          gamma(k, i, j) = s;
          gamma(k, j, i) = std::move(s);
        }
    gamma_ = std::move(gamma);
  }
  return *gamma_;
}

const Arr4<Jet>& LocalGeometry::riemann() {
  if (!riemann_) {
    const auto& G = christoffel();
    // dG(m, l, i, j) = d_m Gamma^l_ij
    Arr4<Jet> dG(n_, zero());
    for (int m = 0; m < n_; ++m)
      for (int l = 0; l < n_; ++l)
        for (int i = 0; i < n_; ++i)
          for (int j = i; j < n_; ++j) {
            dG(m, l, i, j) = G(l, i, j).derivative(m);
            dG(m, l, j, i) = dG(m, l, i, j);
          }
    Arr4<Jet> R(n_, zero());
    for (int l = 0; l < n_; ++l)
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          for (int k = j + 1; k < n_; ++k) {
            Jet r = dG(j, l, k, i) - dG(k, l, j, i);
            for (int m = 0; m < n_; ++m) r += G(l, j, m) * G(m, k, i) - G(l, k, m) * G(m, j, i);
            R(l, i, k, j) = -r;
            R(l, i, j, k) = std::move(r);
          }
    riemann_ = std::move(R);
  }
  return *riemann_;
}

const JetMatrix& LocalGeometry::ricci() {
  if (!ricci_) {
    const auto& R = riemann();
    JetMatrix ric(n_, zero());
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) {
        Jet s = zero();
        for (int k = 0; k < n_; ++k) s += R(k, i, k, j);
        ric(i, j) = s;
        ric(j, i) = std::move(s);
      }
    ricci_ = std::move(ric);
  }
  return *ricci_;
}

const Jet& LocalGeometry::scalar_curvature() {
  if (!scalar_) scalar_ = trace_with(ginv(), ricci());
  return *scalar_;
}

const JetMatrix& LocalGeometry::ricci_operator() {
  if (!q_) {
    const auto& gi = ginv();
    const auto& ric = ricci();
    JetMatrix q(n_, zero());
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        Jet s = zero();
        for (int k = 0; k < n_; ++k) s += gi(i, k) * ric(k, j);
        q(i, j) = std::move(s);
      }
    q_ = std::move(q);
  }
  return *q_;
}

JetVector LocalGeometry::gradient(const Jet& phi) {
  JetVector d;
  for (int i = 0; i < n_; ++i) d.push_back(phi.derivative(i));
  return raise(d);
}

JetMatrix LocalGeometry::hessian(const Jet& phi) {
  const auto& G = christoffel();
  JetVector d;
  for (int i = 0; i < n_; ++i) d.push_back(phi.derivative(i));
  JetMatrix h(n_, zero());
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) {
      Jet s = d[static_cast<std::size_t>(i)].derivative(j);
      for (int k = 0; k < n_; ++k) s -= G(k, i, j) * d[static_cast<std::size_t>(k)];
      h(i, j) = s;
      h(j, i) = std::move(s);
    }
  return h;
}

Jet LocalGeometry::laplacian(const Jet& phi) { return trace_with(ginv(), hessian(phi)); }

JetMatrix LocalGeometry::covariant_derivative(const JetVector& X) {
  const auto& G = christoffel();
  JetMatrix m(n_, zero());
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      Jet s = X[static_cast<std::size_t>(i)].derivative(j);
      for (int k = 0; k < n_; ++k) s += G(i, j, k) * X[static_cast<std::size_t>(k)];
      m(i, j) = std::move(s);
    }
  return m;
}

Arr3<Jet> LocalGeometry::covariant_derivative(const JetMatrix& S) {
  const auto& G = christoffel();
  Arr3<Jet> t(n_, zero());
  for (int k = 0; k < n_; ++k)
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        Jet s = S(i, j).derivative(k);
        for (int m = 0; m < n_; ++m) s -= G(m, k, i) * S(m, j) + G(m, k, j) * S(i, m);
        t(k, i, j) = std::move(s);
      }
  return t;
}

Jet LocalGeometry::divergence(const JetVector& X) {
  const auto& G = christoffel();
  Jet s = zero();
  for (int i = 0; i < n_; ++i) {
    s += X[static_cast<std::size_t>(i)].derivative(i);
    for (int k = 0; k < n_; ++k) s += G(i, i, k) * X[static_cast<std::size_t>(k)];
  }
  return s;
}

JetVector LocalGeometry::divergence(const JetMatrix& S) {
  const auto& gi = ginv();
  Arr3<Jet> nabla = covariant_derivative(S);
  JetVector out(static_cast<std::size_t>(n_), zero());
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k) out[static_cast<std::size_t>(j)] += gi(i, k) * nabla(i, k, j);
  return out;
}

JetVector LocalGeometry::lower(const JetVector& X) const {
  JetVector out(static_cast<std::size_t>(n_), zero());
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out[static_cast<std::size_t>(i)] += g_(i, j) * X[static_cast<std::size_t>(j)];
  return out;
}

JetVector LocalGeometry::raise(const JetVector& w) {
  const auto& gi = ginv();
  JetVector out(static_cast<std::size_t>(n_), zero());
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out[static_cast<std::size_t>(i)] += gi(i, j) * w[static_cast<std::size_t>(j)];
  return out;
}

Jet LocalGeometry::contract(const JetMatrix& S, const JetVector& X, const JetVector& Y) {
  Jet s = Jet::constant_like(X.front(), 0.0);
  for (int i = 0; i < S.size(); ++i)
    for (int j = 0; j < S.size(); ++j)
      s += S(i, j) * X[static_cast<std::size_t>(i)] * Y[static_cast<std::size_t>(j)];
  return s;
}

Jet LocalGeometry::mixed_norm2(const JetMatrix& A) {
  const auto& gi = ginv();
  // lower the first index: A_kj = g_ki A^i_j, then <A_lowered, A_lowered> with a mixed trace
  Jet s = zero();
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k)
      for (int j = 0; j < n_; ++j)
        for (int l = 0; l < n_; ++l) s += g_(i, k) * gi(j, l) * A(i, j) * A(k, l);
  return s;
}

double LocalGeometry::metric_compatibility_defect() {
  Arr3<Jet> t = covariant_derivative(g_);
  double worst = 0.0;
  for (int k = 0; k < n_; ++k)
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) worst = std::max(worst, std::abs(t(k, i, j).value()));
  return worst;
}

Arr3<double> christoffel(const MetricField& g, std::span<const double> p) {
  LocalGeometry geo(g, p);
  return values(geo.christoffel());
}

CurvatureBundle curvature_at(const MetricField& g, std::span<const double> p) {
  LocalGeometry geo(g, p);
  const int n = geo.dim();
  CurvatureBundle b;
  b.gamma = values(geo.christoffel());
  const auto& R = geo.riemann();
  b.riemann = Arr4<double>(n, 0.0);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) b.riemann(l, i, j, k) = R(l, i, j, k).value();
  b.ricci = values(geo.ricci());
  b.scalar = geo.scalar_curvature().value();
  b.ricci_operator = values(geo.ricci_operator());
  return b;
}

ScalarFieldOps scalar_field_ops(const MetricField& g, const ScalarField& phi, std::span<const double> p) {
  LocalGeometry geo(g, p);
  Jet f = phi(geo.x());
  ScalarFieldOps out;
  out.gradient = values(geo.gradient(f));
  JetMatrix h = geo.hessian(f);
  out.hessian = values(h);
  out.laplacian = trace_with(geo.ginv(), h).value();
  return out;
}

double divergence(const MetricField& g, const VectorField& X, std::span<const double> p) {
  LocalGeometry geo(g, p);
  return geo.divergence(X(geo.x())).value();
}

Eigen::VectorXd divergence(const MetricField& g, const SymTensorField& S, std::span<const double> p,
                           int order) {
  LocalGeometry geo(g, p, order);
  return values(geo.divergence(S(geo.x())));
}

}  // namespace solgeom

namespace solgeom {

std::vector<CheckReport> curvature_checks(const MetricField& g, const PointSample& sample, double tol) {
  constexpr const char* kAnchor = "curvature-identities";
  auto compat = CheckReport::begin("metric compatibility", kAnchor, tol);
  auto skew = CheckReport::begin("riemann skew symmetry", kAnchor, tol);
  auto pair = CheckReport::begin("riemann pair symmetry", kAnchor, tol);
  auto bianchi = CheckReport::begin("first bianchi identity", kAnchor, tol);
  auto contracted = CheckReport::begin("contracted bianchi identity", kAnchor, tol);
  for (const auto& p : sample.points) {
    LocalGeometry geo(g, p);
    const int n = geo.dim();
    const auto& R = geo.riemann();
    Eigen::MatrixXd gv = values(geo.g());
    double rmax = 0.0, s1 = 0.0, s2 = 0.0, b1 = 0.0;
    auto low = [&](int l, int i, int j, int k) {
      double v = 0.0;
      for (int m = 0; m < n; ++m) v += gv(l, m) * R(m, i, j, k).value();
      return v;
    };
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            const double r = R(l, i, j, k).value();
            rmax = std::max(rmax, std::abs(r));
            s1 = std::max(s1, std::abs(r + R(l, i, k, j).value()));
            s2 = std::max(s2, std::abs(low(l, i, j, k) - low(j, k, l, i)));
            b1 = std::max(b1, std::abs(r + R(l, j, k, i).value() + R(l, k, i, j).value()));
          }
    compat.add(geo.metric_compatibility_defect(), max_abs(gv));
    skew.add(s1, rmax);
    pair.add(s2, rmax * max_abs(gv));
    bianchi.add(b1, rmax);
    JetVector div = geo.divergence(geo.ricci());
    const Jet& sc = geo.scalar_curvature();
    double c = 0.0, cs = 0.0;
    for (int j = 0; j < n; ++j) {
      c = std::max(c, std::abs(div[static_cast<std::size_t>(j)].value() - 0.5 * sc.partial(j)));
      cs = std::max({cs, std::abs(div[static_cast<std::size_t>(j)].value()), 0.5 * std::abs(sc.partial(j))});
    }
    contracted.add(c, cs);
  }
  std::vector<CheckReport> out{compat, skew, pair, bianchi, contracted};
  for (auto& r : out) r.finalize();
  return out;
}

}  // namespace solgeom
