#include "solgeom/submanifold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "solgeom/error.hpp"
#include "solgeom/lie.hpp"
#include "solgeom/soliton.hpp"

namespace solgeom {
namespace {

constexpr double kMinSingularValue = 1e-8;
constexpr double kParallelGate = 1e-6;

constexpr const char* kGaussAnchor = "gauss-weingarten";
constexpr const char* kConcurrentAnchor = "concurrent-field-split";
constexpr const char* kParallelAnchor = "parallel-shape-operator-soliton";
constexpr const char* kUmbilicAnchor = "umbilical-soliton-scalar";
constexpr const char* kYanoShapeAnchor = "minimal-yano-shape-integral";
constexpr const char* kBochnerAnchor = "minimal-bochner-identity";

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

JetMatrix induced_jets(const Immersion& imm, std::span<const Jet> x) {
  const int n = imm.dim(), N = imm.ambient_dim();
  std::vector<JetVector> dX(sz(n), JetVector(sz(N)));
  for (int a = 0; a < N; ++a) {
    Jet X = imm.components[sz(a)].evaluate(x);
    for (int i = 0; i < n; ++i) dX[sz(i)][sz(a)] = X.derivative(i);
  }
  JetMatrix g(n, Jet::constant_like(x.front(), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet s = Jet::constant_like(x.front(), 0.0);
      for (int a = 0; a < N; ++a) s += imm.ambient[sz(a)] * (dX[sz(i)][sz(a)] * dX[sz(j)][sz(a)]);
      g(i, j) = s;
      g(j, i) = s;
    }
  return g;
}

Eigen::MatrixXd lowered(const Eigen::MatrixXd& g, const Eigen::MatrixXd& mixed) { return g * mixed; }

double variance(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size());
}

}  // namespace

Immersion make_immersion(Chart chart, std::vector<Expr> components, std::vector<double> ambient,
                         std::optional<Signature> signature) {
  const int n = chart.dim();
  const int N = static_cast<int>(components.size());
  if (N <= n) throw InvalidInput("immersion needs more ambient components than chart dimensions");
  if (N - n > 3) throw InvalidInput("codimension above 3 is not supported");
  if (ambient.empty()) ambient.assign(sz(N), 1.0);
  if (static_cast<int>(ambient.size()) != N)
    throw InvalidInput("ambient signature has " + std::to_string(ambient.size()) + " entries, expected " +
                       std::to_string(N));
  for (double e : ambient)
    if (e != 1.0 && e != -1.0) throw InvalidInput("ambient metric must be diagonal with entries +1 or -1");
  for (const auto& c : components)
    if (c.coordinate_span() > n) throw InvalidInput("immersion component uses a coordinate outside the chart");
  Immersion imm{std::move(chart), std::move(components), std::move(ambient), {}};
  if (signature) {
    imm.signature = *signature;
  } else {
    Point center;
    for (const auto& iv : imm.chart.domain()) center.push_back(0.5 * (iv.lo + iv.hi));
    auto x = seed_point(center, 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(values(induced_jets(imm, x)));
    for (int i = 0; i < n; ++i) (es.eigenvalues()(i) < 0 ? imm.signature.negative : imm.signature.positive)++;
  }
  return imm;
}

MetricField induced_metric(const Immersion& imm) {
  return MetricField(imm.chart,
                     SymTensorField::from_eval(
                         imm.dim(), [imm](std::span<const Jet> x) { return induced_jets(imm, x); }, 1),
                     imm.signature);
}

VectorField tangential_position_field(const Immersion& imm) {
  return VectorField::from_eval(
      imm.dim(),
      [imm](std::span<const Jet> x) {
        ImmersionGeometry geo(imm, std::vector<Jet>(x.begin(), x.end()));
        return geo.w_tangent();
      },
      1);
}

ScalarField half_square_norm(const Immersion& imm) {
  return ScalarField::from_eval(
      [imm](std::span<const Jet> x) {
        Jet s = Jet::constant_like(x.front(), 0.0);
        for (int a = 0; a < imm.ambient_dim(); ++a) {
          Jet X = imm.components[sz(a)].evaluate(x);
          s += imm.ambient[sz(a)] * (X * X);
        }
        return 0.5 * s;
      },
      0);
}

ImmersionGeometry::ImmersionGeometry(const Immersion& imm, std::span<const double> p, int order) {
  build(imm, seed_point(p, order));
}

ImmersionGeometry::ImmersionGeometry(const Immersion& imm, std::vector<Jet> x) { build(imm, std::move(x)); }

void ImmersionGeometry::build(const Immersion& imm, std::vector<Jet> x) {
  n_ = imm.dim();
  N_ = imm.ambient_dim();
  eps_ = imm.ambient;
  X_.clear();
  for (const auto& c : imm.components) X_.push_back(c.evaluate(std::span<const Jet>(x)));
  dX_.assign(sz(n_), JetVector(sz(N_)));
  Eigen::MatrixXd J(N_, n_);
  for (int i = 0; i < n_; ++i)
    for (int a = 0; a < N_; ++a) {
      dX_[sz(i)][sz(a)] = X_[sz(a)].derivative(i);
      J(a, i) = dX_[sz(i)][sz(a)].value();
    }
  const double smin = Eigen::JacobiSVD<Eigen::MatrixXd>(J).singularValues()(n_ - 1);
  if (!(smin >= kMinSingularValue)) {
    Point p;
    for (const auto& xi : x) p.push_back(xi.value());
    throw DegenerateMetric("rank-deficient immersion at " + format_point(p) +
                           ": smallest singular value " + std::to_string(smin));
  }
  JetMatrix g(n_, Jet::constant_like(x.front(), 0.0));
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) {
      g(i, j) = inner(dX_[sz(i)], dX_[sz(j)]);
      g(j, i) = g(i, j);
    }
  geo_.emplace(std::move(g), std::move(x));
  h_.assign(sz(n_ * n_), std::nullopt);
  normals_.clear();
  normal_signs_.clear();
}

Jet ImmersionGeometry::inner(const JetVector& a, const JetVector& b) const {
  Jet s = Jet::constant_like(a.front(), 0.0);
  for (int k = 0; k < N_; ++k) s += eps_[sz(k)] * (a[sz(k)] * b[sz(k)]);
  return s;
}

JetVector ImmersionGeometry::second_partial(int i, int j) const {
  JetVector out;
  for (int a = 0; a < N_; ++a) out.push_back(dX_[sz(i)][sz(a)].derivative(j));
  return out;
}

JetVector ImmersionGeometry::tangent_components(const JetVector& V) {
  const auto& ginv = geo_->ginv();
  JetVector c;
  for (int j = 0; j < n_; ++j) c.push_back(inner(dX_[sz(j)], V));
  JetVector out(sz(n_), geo_->zero());
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out[sz(i)] += ginv(i, j) * c[sz(j)];
  return out;
}

JetVector ImmersionGeometry::normal_part(const JetVector& V) {
  JetVector t = tangent_components(V);
  JetVector out = V;
  for (int i = 0; i < n_; ++i)
    for (int a = 0; a < N_; ++a) out[sz(a)] -= t[sz(i)] * dX_[sz(i)][sz(a)];
  return out;
}

const JetVector& ImmersionGeometry::h(int i, int j) {
  if (i > j) std::swap(i, j);
  auto& slot = h_[sz(i * n_ + j)];
  if (!slot) slot = normal_part(second_partial(i, j));
  return *slot;
}

const std::vector<JetVector>& ImmersionGeometry::normals() {
  if (!normals_.empty()) return normals_;
  const int m = N_ - n_;
  const Jet zero = geo_->zero();
  std::vector<JetVector> candidates;
  for (int b = 0; b < N_; ++b) {
    JetVector e(sz(N_), zero);
    e[sz(b)] = zero + 1.0;
    candidates.push_back(normal_part(e));
  }
  std::vector<bool> used(sz(N_), false);
  for (int k = 0; k < m; ++k) {
    int best = -1;
    double best_norm = 0.0;
    JetVector best_u;
    for (int b = 0; b < N_; ++b) {
      if (used[sz(b)]) continue;
      JetVector u = candidates[sz(b)];
      for (std::size_t a = 0; a < normals_.size(); ++a) {
        Jet c = normal_signs_[a] * inner(u, normals_[a]);
        for (int q = 0; q < N_; ++q) u[sz(q)] -= c * normals_[a][sz(q)];
      }
      const double nn = std::abs(inner(u, u).value());
      if (nn > best_norm) best = b, best_norm = nn, best_u = std::move(u);
    }
    if (best < 0 || best_norm < 1e-14) throw DegenerateMetric("normal space is degenerate");
    used[sz(best)] = true;
    Jet nn = inner(best_u, best_u);
    const double sign = nn.value() > 0 ? 1.0 : -1.0;
    Jet scale = 1.0 / sqrt(sign * nn);
    for (auto& c : best_u) c *= scale;
    normals_.push_back(std::move(best_u));
    normal_signs_.push_back(sign);
  }
  if (m == 1) {
    Eigen::MatrixXd M(N_, N_);
    for (int a = 0; a < N_; ++a) {
      for (int i = 0; i < n_; ++i) M(a, i) = dX_[sz(i)][sz(a)].value();
      M(a, n_) = normals_[0][sz(a)].value();
    }
    if (M.determinant() < 0)
      for (auto& c : normals_[0]) c = -c;
  }
  return normals_;
}

const std::vector<double>& ImmersionGeometry::normal_signs() {
  normals();
  return normal_signs_;
}

JetMatrix ImmersionGeometry::shape_lowered(const JetVector& V) {
  JetMatrix out(n_, geo_->zero());
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) {
      out(i, j) = inner(h(i, j), V);
      out(j, i) = out(i, j);
    }
  return out;
}

JetMatrix ImmersionGeometry::shape_operator(const JetVector& V) {
  const JetMatrix a = shape_lowered(V);
  const auto& ginv = geo_->ginv();
  JetMatrix out(n_, geo_->zero());
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) out(i, j) += ginv(i, k) * a(k, j);
  return out;
}

JetMatrix ImmersionGeometry::weingarten(int a) {
  const JetVector& nu = normals()[sz(a)];
  JetMatrix out(n_, geo_->zero());
  for (int i = 0; i < n_; ++i) {
    JetVector dnu;
    for (int q = 0; q < N_; ++q) dnu.push_back(nu[sz(q)].derivative(i));
    JetVector t = tangent_components(dnu);
    for (int k = 0; k < n_; ++k) out(k, i) = -t[sz(k)];
  }
  return out;
}

HypersurfaceData immerse(const Immersion& imm, std::span<const double> p) {
  ImmersionGeometry geo(imm, p, 2);
  const int n = geo.dim(), N = geo.ambient_dim();
  HypersurfaceData d;
  d.g = values(geo.intrinsic().g());
  const auto& nus = geo.normals();
  d.normal_signs = geo.normal_signs();
  d.normals.resize(N, static_cast<Eigen::Index>(nus.size()));
  for (std::size_t a = 0; a < nus.size(); ++a) {
    d.normals.col(static_cast<Eigen::Index>(a)) = values(nus[a]);
    d.h.push_back(values(geo.shape_lowered(nus[a])));
    d.shape.push_back(values(geo.shape_operator(nus[a])));
  }
  Eigen::MatrixXd J(N, n);
  for (int i = 0; i < n; ++i) J.col(i) = values(geo.tangents()[sz(i)]);
  Eigen::MatrixXd E = Eigen::Map<const Eigen::VectorXd>(imm.ambient.data(), N).asDiagonal();
  d.tangent_projector = J * d.g.inverse() * J.transpose() * E;
  d.normal_projector = Eigen::MatrixXd::Identity(N, N) - d.tangent_projector;
  return d;
}

ConcurrentSplit concurrent_decompose(const Immersion& imm, std::span<const double> p) {
  ImmersionGeometry geo(imm, p, 1);
  const int N = geo.ambient_dim();
  // nabla-bar W in ambient coordinates: W^a(Y) = Y^a in a flat ambient.
  Point y;
  for (const auto& c : geo.position()) y.push_back(c.value());
  auto Y = seed_point(y, 1);
  Eigen::MatrixXd D(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) D(a, b) = Y[sz(a)].partial(b);
  ConcurrentSplit s;
  s.concurrency_defect = max_abs(D - Eigen::MatrixXd::Identity(N, N));
  s.tangent = values(geo.w_tangent());
  s.normal = values(geo.w_normal());
  s.tangent_ambient = values(geo.position()) - s.normal;
  return s;
}

std::vector<CheckReport> gauss_weingarten_check(const Immersion& imm, const PointSample& sample, double tol) {
  auto gauss = CheckReport::begin("gauss formula", kGaussAnchor, tol);
  auto wein = CheckReport::begin("weingarten formula", kGaussAnchor, tol);
  auto sym = CheckReport::begin("shape operator symmetry", kGaussAnchor, tol);
  auto eq = CheckReport::begin("gauss equation", kGaussAnchor, tol);
  auto conc = CheckReport::begin("concurrent field", kConcurrentAnchor, tol);
  for (const auto& p : sample.points) {
    ImmersionGeometry geo(imm, p, 3);
    auto& in = geo.intrinsic();
    const int n = geo.dim(), N = geo.ambient_dim();
    const auto& gamma = in.christoffel();
    double gres = 0.0, gscale = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        JetVector xij = geo.second_partial(i, j);
        const JetVector& hij = geo.h(i, j);
        for (int a = 0; a < N; ++a) {
          double r = xij[sz(a)].value() - hij[sz(a)].value();
          for (int k = 0; k < n; ++k) r -= gamma(k, i, j).value() * geo.tangents()[sz(k)][sz(a)].value();
          gres = std::max(gres, std::abs(r));
          gscale = std::max(gscale, std::abs(xij[sz(a)].value()));
        }
      }
    gauss.add(gres, gscale);

    Eigen::MatrixXd gv = values(in.g());
    double wres = 0.0, wscale = 0.0, sres = 0.0;
    for (int a = 0; a < imm.codim(); ++a) {
      Eigen::MatrixXd W = values(geo.weingarten(a));
      Eigen::MatrixXd S = values(geo.shape_operator(geo.normals()[sz(a)]));
      wres = std::max(wres, max_abs(W - S));
      wscale = std::max({wscale, max_abs(W), max_abs(S)});
      Eigen::MatrixXd L = lowered(gv, W);
      sres = std::max(sres, max_abs(L - L.transpose()));
    }
    wein.add(wres, wscale);
    sym.add(sres, wscale);

    // g(R(d_j, d_k) d_i, d_l) = <h_ki, h_jl> - <h_ji, h_kl>
    const auto& R = in.riemann();
    double eres = 0.0, escale = 0.0;
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            double lhs = 0.0;
            for (int m = 0; m < n; ++m) lhs += gv(l, m) * R(m, i, j, k).value();
            const double rhs = geo.inner(geo.h(k, i), geo.h(j, l)).value() - geo.inner(geo.h(j, i), geo.h(k, l)).value();
            eres = std::max(eres, std::abs(lhs - rhs));
            escale = std::max({escale, std::abs(lhs), std::abs(rhs)});
          }
    eq.add(eres, escale);
    conc.add(concurrent_decompose(imm, p).concurrency_defect, 1.0);
  }
  std::vector<CheckReport> out{gauss, wein, sym, eq, conc};
  for (auto& r : out) r.finalize();
  return out;
}

std::vector<CheckReport> tangential_lie_check(const Immersion& imm, const PointSample& sample, double tol) {
  auto one = CheckReport::begin("nabla W_top = I + A", kConcurrentAnchor, tol);
  auto two = CheckReport::begin("L_{W_top} g = 2(g + A)", kConcurrentAnchor, tol);
  auto printed = CheckReport::begin("L_{W_top} g with U in the last slot", kConcurrentAnchor, tol);
  auto three = CheckReport::begin("L_{W_top} L_{W_top} g = 2(2g + 4A + 2A^2 + nabla_{W_top} A)", kConcurrentAnchor, tol);
  for (const auto& p : sample.points) {
    ImmersionGeometry geo(imm, p, 3);
    auto& in = geo.intrinsic();
    const int n = geo.dim();
    JetVector w = geo.w_tangent();
    JetVector wperp = geo.w_normal();
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

    Eigen::MatrixXd nabla = values(in.covariant_derivative(w));
    Eigen::MatrixXd A = values(geo.shape_operator(wperp));
    one.add(max_abs(nabla - (I + A)), std::max(max_abs(nabla), 1.0 + max_abs(A)));

    JetMatrix a = geo.shape_lowered(wperp);
    Eigen::MatrixXd av = values(a), gv = values(in.g());
    JetMatrix lg = lie_derivative(w, in.g());
    Eigen::MatrixXd lgv = values(lg);
    two.add(max_abs(lgv - 2.0 * (gv + av)), std::max(max_abs(lgv), 2.0 * (max_abs(gv) + max_abs(av))));
    Eigen::MatrixXd alt(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) alt(i, j) = 2.0 * (gv(i, j) + av(i, i));
    printed.add(max_abs(lgv - alt), std::max(max_abs(lgv), max_abs(alt)));

    Eigen::MatrixXd llg = values(lie_derivative(w, lg));
    Arr3<Jet> da = in.covariant_derivative(a);
    Eigen::MatrixXd nwa = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) nwa(i, j) += w[sz(k)].value() * da(k, i, j).value();
    Eigen::MatrixXd a2 = av * gv.inverse() * av;
    Eigen::MatrixXd rhs = 2.0 * (2.0 * gv + 4.0 * av + 2.0 * a2 + nwa);
    three.add(max_abs(llg - rhs), std::max(max_abs(llg), max_abs(rhs)));
  }
  one.finalize();
  two.finalize();
  three.finalize();
  printed.finalize();
  printed.notes = std::string(printed.passed() ? "holds" : "does not hold") + " on this input; rhs = 2(g(U,V) + g(A U, U))";
  printed.status = CheckStatus::Info;
  return {one, two, printed, three};
}

MetallicFit fit_metallic(const std::vector<Eigen::MatrixXd>& shapes) {
  MetallicFit fit;
  if (shapes.empty()) return fit;
  const Eigen::Index n = shapes.front().rows();
  const Eigen::Index rows = n * n * static_cast<Eigen::Index>(shapes.size());
  Eigen::MatrixXd M(rows, 2);
  Eigen::VectorXd b(rows);
  Eigen::Index r = 0;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  for (const auto& A : shapes) {
    Eigen::MatrixXd A2 = A * A;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j, ++r) {
        M(r, 0) = A(i, j);
        M(r, 1) = I(i, j);
        b(r) = A2(i, j);
      }
  }
  Eigen::Vector2d rs = M.completeOrthogonalDecomposition().solve(b);
  fit.r = rs(0);
  fit.s = rs(1);
  for (const auto& A : shapes) fit.residual = std::max(fit.residual, max_abs(A * A - fit.r * A - fit.s * I));
  return fit;
}

ShapeClass shape_classify(const Immersion& imm, const PointSample& sample, double tol) {
  if (imm.codim() != 1) throw PreconditionError("shape classification needs a hypersurface");
  ShapeClass c;
  std::vector<Eigen::MatrixXd> shapes;
  double umb = 0.0, umb_scale = 0.0, geo_max = 0.0, tr_max = 0.0;
  for (const auto& p : sample.points) {
    ImmersionGeometry geo(imm, p, 2);
    const int n = geo.dim();
    Eigen::MatrixXd A = values(geo.shape_operator(geo.w_normal()));
    Eigen::MatrixXd Anu = values(geo.shape_operator(geo.normals()[0]));
    shapes.push_back(A);
    const double f = A.trace() / n;
    c.umbilic_factor.push_back(f);
    umb = std::max(umb, max_abs(A - f * Eigen::MatrixXd::Identity(n, n)));
    umb_scale = std::max(umb_scale, max_abs(A));
    geo_max = std::max(geo_max, max_abs(Anu));
    tr_max = std::max(tr_max, std::abs(Anu.trace()));
  }
  c.metallic = fit_metallic(shapes);
  c.umbilical = umb <= scaled_tolerance(tol, umb_scale);
  c.geodesic = geo_max <= tol;
  c.minimal = tr_max <= tol;
  return c;
}

std::vector<CheckReport> prop_checks(const Immersion& imm, double lambda, const PointSample& sample, int resolution,
                                     double tol, std::optional<ScalarField> psi) {
  const int n = imm.dim();
  const MetricField g = induced_metric(imm);
  const VectorField wtop = tangential_position_field(imm);
  const ScalarField phi = psi ? *psi : half_square_norm(imm);

  struct PointData {
    Eigen::MatrixXd g, ric, a, A, soliton;
    double parallel = 0.0, f = 0.0, wf = 0.0, umb = 0.0, mean_curv = 0.0;
    double yano_intrinsic = 0.0, ric_ww = 0.0, nabla_w2 = 0.0, A2 = 0.0;
    double half_lap = 0.0, ric_grad = 0.0, grad_defect = 0.0;
  };
  std::vector<PointData> pts;
  double soliton_res = 0.0, soliton_scale = 0.0;
  for (const auto& p : sample.points) {
    ImmersionGeometry geo(imm, p, 4);
    auto& in = geo.intrinsic();
    PointData d;
    JetVector w = geo.w_tangent();
    JetVector wperp = geo.w_normal();
    JetMatrix a = geo.shape_lowered(wperp);
    JetMatrix A = geo.shape_operator(wperp);
    d.g = values(in.g());
    d.ric = values(in.ricci());
    d.a = values(a);
    d.A = values(A);

    JetMatrix lg = lie_derivative(w, in.g());
    Eigen::MatrixXd llg = values(lie_derivative(w, lg));
    d.soliton = llg + d.ric - lambda * d.g;
    soliton_res = std::max(soliton_res, max_abs(d.soliton));
    soliton_scale = std::max({soliton_scale, max_abs(llg), max_abs(d.ric), std::abs(lambda) * max_abs(d.g)});

    Arr3<Jet> da = in.covariant_derivative(a);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d.parallel = std::max(d.parallel, std::abs(da(k, i, j).value()));

    Jet tr = geo.intrinsic().zero();
    for (int i = 0; i < n; ++i) tr += A(i, i);
    Jet f = tr / static_cast<double>(n);
    d.f = f.value();
    for (int i = 0; i < n; ++i) d.wf += w[sz(i)].value() * f.partial(i);
    d.umb = max_abs(d.A - d.f * Eigen::MatrixXd::Identity(n, n));

    // mean curvature vector trace_g h
    const auto& ginv = in.ginv();
    for (int q = 0; q < geo.ambient_dim(); ++q) {
      double H = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) H += ginv(i, j).value() * geo.h(i, j)[sz(q)].value();
      d.mean_curv = std::max(d.mean_curv, std::abs(H));
    }

    d.ric_ww = LocalGeometry::contract(in.ricci(), w, w).value();
    d.nabla_w2 = in.mixed_norm2(in.covariant_derivative(w)).value();
    d.A2 = in.mixed_norm2(A).value();
    d.yano_intrinsic = yano_integrand(g, wtop, p);

    Jet ps = phi(std::span<const Jet>(in.x()));
    JetVector grad = in.gradient(ps);
    Jet norm2 = LocalGeometry::contract(in.g(), grad, grad);
    d.half_lap = 0.5 * in.laplacian(norm2).value();
    d.ric_grad = LocalGeometry::contract(in.ricci(), grad, grad).value();
    for (int i = 0; i < n; ++i) d.grad_defect = std::max(d.grad_defect, std::abs(grad[sz(i)].value() - w[sz(i)].value()));
    pts.push_back(std::move(d));
  }
  const bool is_soliton = soliton_res <= scaled_tolerance(tol, soliton_scale);
  double max_parallel = 0.0, max_umb = 0.0, umb_scale = 0.0, max_mean = 0.0, mean_scale = 0.0;
  for (const auto& d : pts) {
    max_parallel = std::max(max_parallel, d.parallel);
    max_umb = std::max(max_umb, d.umb);
    umb_scale = std::max(umb_scale, max_abs(d.A));
    max_mean = std::max(max_mean, d.mean_curv);
    mean_scale = std::max(mean_scale, max_abs(d.a));
  }
  const bool minimal = max_mean <= scaled_tolerance(tol, mean_scale);
  const std::string not_soliton = "no admissible instance: not a second soliton with W_top for lambda = " + std::to_string(lambda);
  std::vector<CheckReport> out;

  // Parallel shape operator: Ric = (lambda - 4) g - 8A - 4A^2.
  if (max_parallel > kParallelGate) {
    out.push_back(CheckReport::skipped("parallel shape operator relation", kParallelAnchor,
                                       "no admissible instance: nabla A_{W_perp} != 0"));
  } else if (!is_soliton) {
    out.push_back(CheckReport::skipped("parallel shape operator relation", kParallelAnchor, not_soliton));
  } else {
    auto r = CheckReport::begin("parallel shape operator relation", kParallelAnchor, tol);
    double flat = 0.0, metallic = 0.0;
    for (const auto& d : pts) {
      Eigen::MatrixXd a2 = d.a * d.g.inverse() * d.a;
      Eigen::MatrixXd rhs = (lambda - 4.0) * d.g - 8.0 * d.a - 4.0 * a2;
      r.add(max_abs(d.ric - rhs), std::max(max_abs(d.ric), max_abs(rhs)));
      flat = std::max(flat, max_abs(d.ric));
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      metallic = std::max(metallic, max_abs(d.A * d.A + 2.0 * d.A - 0.25 * (lambda - 4.0) * I));
    }
    r.finalize();
    r.values["r_expected"] = -2.0;
    r.values["s_expected"] = 0.25 * (lambda - 4.0);
    r.values["ricci_flat"] = flat <= tol ? 1.0 : 0.0;
    if (flat <= tol) r.values["metallic_residual"] = metallic;
    out.push_back(r);
  }

  // Umbilical scalar lambda - 4 - 8f - 4f^2 - 2 W_top(f).
  if (max_umb > scaled_tolerance(tol, umb_scale)) {
    out.push_back(CheckReport::skipped("umbilical scalar", kUmbilicAnchor,
                                       "no admissible instance: A_{W_perp} is not umbilical"));
  } else {
    auto r = CheckReport::begin("umbilical scalar", kUmbilicAnchor, tol);
    std::vector<double> sigma;
    for (const auto& d : pts) {
      const double s = lambda - 4.0 - 8.0 * d.f - 4.0 * d.f * d.f - 2.0 * d.wf;
      sigma.push_back(s);
      r.add(max_abs(d.ric - s * d.g), std::max(max_abs(d.ric), std::abs(s) * max_abs(d.g)));
    }
    r.finalize();
    const double var = variance(sigma);
    r.values["sigma_mean"] = std::accumulate(sigma.begin(), sigma.end(), 0.0) / static_cast<double>(sigma.size());
    r.values["sigma_variance"] = var;
    if (is_soliton) {
      r.values["einstein"] = var <= tol ? 1.0 : 0.0;
    } else {
      r.status = CheckStatus::Info;
      r.notes = "not a second soliton for this lambda; einstein verdict withheld";
    }
    out.push_back(r);
  }

  // Yano integrand through the shape operator, and |nabla W_top|^2.
  {
    auto y = CheckReport::begin("yano integrand via shape operator", kYanoShapeAnchor, tol);
    auto nw = CheckReport::begin("|nabla W_top|^2 = |A|^2 + 2 tr A + n", kYanoShapeAnchor, tol);
    auto nw_printed = CheckReport::begin("|nabla W_top|^2 = |A|^2 - 2 tr A + n", kYanoShapeAnchor, tol);
    for (const auto& d : pts) {
      const double tr = d.A.trace();
      const double rhs = d.ric_ww + d.A2 + 2.0 * tr + n - (n + tr) * (n + tr);
      y.add(std::abs(d.yano_intrinsic - rhs), std::max({std::abs(d.ric_ww), d.A2, (n + std::abs(tr)) * (n + std::abs(tr))}));
      nw.add(std::abs(d.nabla_w2 - (d.A2 + 2.0 * tr + n)), std::max(d.nabla_w2, d.A2 + n + 2.0 * std::abs(tr)));
      nw_printed.add(std::abs(d.nabla_w2 - (d.A2 - 2.0 * tr + n)), std::max(d.nabla_w2, d.A2 + n + 2.0 * std::abs(tr)));
    }
    y.finalize();
    nw.finalize();
    nw_printed.finalize();
    nw_printed.status = CheckStatus::Info;
    nw_printed.notes = nw_printed.passed() ? "holds (tr A = 0 on this input)" : "does not hold";
    out.push_back(y);
    out.push_back(nw);
    out.push_back(nw_printed);
  }
  if (!g.chart().closed()) {
    out.push_back(CheckReport::skipped("minimal integral form", kYanoShapeAnchor,
                                       "no admissible instance: chart is not compact"));
  } else if (!minimal) {
    out.push_back(CheckReport::skipped("minimal integral form", kYanoShapeAnchor,
                                       "no admissible instance: not instantiable at desk scale (no compact minimal submanifold of flat space)"));
  } else {
    auto r = CheckReport::begin("minimal integral form", kYanoShapeAnchor, tol);
    auto integrand = [&](std::span<const double> p, bool lhs) {
      ImmersionGeometry geo(imm, p, 3);
      auto& in = geo.intrinsic();
      JetVector w = geo.w_tangent();
      if (lhs) return in.mixed_norm2(geo.shape_operator(geo.w_normal())).value();
      return n * (n - 1.0) - LocalGeometry::contract(in.ricci(), w, w).value();
    };
    const double L = integrate([&](std::span<const double> p) { return integrand(p, true); }, g, resolution);
    const double R = integrate([&](std::span<const double> p) { return integrand(p, false); }, g, resolution);
    r.add(std::abs(L - R), std::max(std::abs(L), std::abs(R)));
    r.finalize();
    r.integral = L;
    r.resolution = resolution;
    out.push_back(r);
  }

  // Bochner identity for minimal submanifolds.
  {
    auto gr = CheckReport::begin("grad psi = W_top", kBochnerAnchor, tol);
    for (const auto& d : pts) gr.add(d.grad_defect, 1.0);
    gr.finalize();
    out.push_back(gr);
  }
  if (!minimal) {
    out.push_back(CheckReport::skipped("bochner identity", kBochnerAnchor, "no admissible instance: not minimal"));
  } else {
    auto b = CheckReport::begin("bochner identity", kBochnerAnchor, tol);
    double min_ric = INFINITY, min_lap = INFINITY;
    for (const auto& d : pts) {
      const double rhs = d.A2 + n + d.ric_grad;
      b.add(std::abs(d.half_lap - rhs), std::max({std::abs(d.half_lap), d.A2 + n, std::abs(d.ric_grad)}));
      min_ric = std::min(min_ric, d.ric_grad);
      min_lap = std::min(min_lap, d.half_lap);
    }
    b.finalize();
    b.values["min_ric_grad_psi"] = min_ric;
    b.values["min_half_laplacian"] = min_lap;
    b.notes = min_ric >= -tol ? "Ric(grad psi, grad psi) >= 0: |grad psi|^2 is subharmonic"
                              : "Ric(grad psi, grad psi) < 0 somewhere; subharmonicity remark does not apply";
    out.push_back(b);
  }
  return out;
}

}  // namespace solgeom
