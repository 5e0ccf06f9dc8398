#include "solgeom/flow.hpp"

#include <algorithm>
#include <cmath>

#include "solgeom/curvature.hpp"
#include "solgeom/error.hpp"
#include "solgeom/lie.hpp"

namespace solgeom {
namespace {

constexpr const char* kFlowAnchor = "self-similar-derivation";
constexpr double kGramConditionLimit = 1e12;
constexpr double kFitTarget = 1e-10;
constexpr double kMinStep = 1e-14;
constexpr double kMaxDamping = 1e16;

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

double warp(double mu, double lambda, double t) { return 1.0 + mu * t - 0.5 * lambda * t * t; }

// Per-point pieces of the residual, which is quadratic in theta:
//   sum_ab theta_a theta_b L_a L_b g + mu sum_a theta_a L_a g + Ric - lambda g.
struct FitPoint {
  Eigen::MatrixXd g, ric;
  std::vector<Eigen::MatrixXd> l;
  std::vector<std::vector<Eigen::MatrixXd>> ll;
};

std::vector<FitPoint> fit_points(const SolitonFitProblem& prob, const PointSample& sample) {
  std::vector<FitPoint> out;
  const std::size_t m = prob.basis.size();
  for (const auto& p : sample.points) {
    LocalGeometry geo(prob.g, p);
    FitPoint fp;
    fp.g = values(geo.g());
    fp.ric = values(geo.ricci());
    std::vector<JetMatrix> lj;
    std::vector<JetVector> b;
    for (const auto& B : prob.basis) {
      b.push_back(B(geo.x()));
      lj.push_back(lie_derivative(b.back(), geo.g()));
      fp.l.push_back(values(lj.back()));
    }
    fp.ll.assign(m, {});
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t c = 0; c < m; ++c) fp.ll[a].push_back(values(lie_derivative(b[a], lj[c])));
    out.push_back(std::move(fp));
  }
  return out;
}

Eigen::VectorXd stacked_residual(const std::vector<FitPoint>& pts, const Eigen::VectorXd& theta, double lambda,
                                 double mu) {
  if (pts.empty()) return {};
  const Eigen::Index n = pts.front().g.rows();
  const Eigen::Index per = n * (n + 1) / 2;
  Eigen::VectorXd r(per * static_cast<Eigen::Index>(pts.size()));
  Eigen::Index row = 0;
  for (const auto& fp : pts) {
    Eigen::MatrixXd R = fp.ric - lambda * fp.g;
    for (Eigen::Index a = 0; a < theta.size(); ++a) {
      R += mu * theta(a) * fp.l[sz(static_cast<int>(a))];
      for (Eigen::Index c = 0; c < theta.size(); ++c)
        R += theta(a) * theta(c) * fp.ll[sz(static_cast<int>(a))][sz(static_cast<int>(c))];
    }
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j) r(row++) = R(i, j);
  }
  return r;
}

}  // namespace

std::string_view to_string(FlowStatus s) { return s == FlowStatus::Completed ? "completed" : "collapsed"; }

FlowFamily make_flow_family(const MetricField& g, const PointSample& sample, double c0, double c1, double tol) {
  if (!(c0 > 0)) throw PreconditionError("initial scale c(0) must be positive");
  std::vector<CurvatureBundle> bundles;
  std::vector<Eigen::MatrixXd> gs;
  double num = 0.0, den = 0.0;
  for (const auto& p : sample.points) {
    bundles.push_back(curvature_at(g, p));
    gs.push_back(g.value(p));
    num += (bundles.back().ricci.array() * gs.back().array()).sum();
    den += gs.back().squaredNorm();
  }
  const double kappa = num / den;
  double res = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    res = std::max(res, max_abs(bundles[i].ricci - kappa * gs[i]));
    scale = std::max(scale, max_abs(bundles[i].ricci));
  }
  if (res > scaled_tolerance(tol, scale))
    throw PreconditionError("metric is not Einstein: max |Ric - kappa g| = " + std::to_string(res) +
                            " for kappa = " + std::to_string(kappa));
  return FlowFamily{kappa, c0, c1};
}

double exact_scale(const FlowFamily& fam, double t) { return fam.c0 + fam.c1 * t - fam.kappa * t * t; }

FlowTrajectory integrate_flow(const FlowFamily& fam, double t_end, double h) {
  if (!(h > 0)) throw InvalidInput("flow step must be positive");
  if (!(t_end >= 0)) throw InvalidInput("flow end time must be nonnegative");
  FlowTrajectory tr;
  double t = 0.0, c = fam.c0, dc = fam.c1;
  tr.states.push_back({t, c, dc});
  const double a = -2.0 * fam.kappa;
  auto rhs = [a](double, double v) { return std::pair{v, a}; };
  while (t < t_end - 1e-14 * std::max(1.0, t_end)) {
    const double s = std::min(h, t_end - t);
    auto [k1c, k1v] = rhs(c, dc);
    auto [k2c, k2v] = rhs(c + 0.5 * s * k1c, dc + 0.5 * s * k1v);
    auto [k3c, k3v] = rhs(c + 0.5 * s * k2c, dc + 0.5 * s * k2v);
    auto [k4c, k4v] = rhs(c + s * k3c, dc + s * k3v);
    c += s / 6.0 * (k1c + 2 * k2c + 2 * k3c + k4c);
    dc += s / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    t = (s == h) ? t + h : t_end;
    tr.states.push_back({t, c, dc});
    if (c <= kCollapse) {
      tr.status = FlowStatus::Collapsed;
      break;
    }
  }
  return tr;
}

FlowMap flow_map(const VectorField& W, const Chart& chart, std::span<const double> p, double mu, double lambda,
                 double t, int steps) {
  const int n = W.dim();
  FlowMap m{Eigen::Map<const Eigen::VectorXd>(p.data(), n), Eigen::MatrixXd::Identity(n, n)};
  if (t == 0.0) return m;
  // d/ds (y, J) = (W(y), DW(y) J) / f(s)
  auto rhs = [&](double s, const Eigen::VectorXd& y, const Eigen::MatrixXd& J) {
    if (!chart.in_domain(std::span<const double>(y.data(), sz(n))))
      throw DomainError("flow of W leaves the chart at " + format_point(std::span<const double>(y.data(), sz(n))) +
                        "; shrink the step or the domain");
    auto x = seed_point(std::span<const double>(y.data(), sz(n)), 1);
    JetVector w = W(x);
    Eigen::VectorXd wv(n);
    Eigen::MatrixXd D(n, n);
    for (int i = 0; i < n; ++i) {
      wv(i) = w[sz(i)].value();
      for (int j = 0; j < n; ++j) D(i, j) = w[sz(i)].partial(j);
    }
    const double f = warp(mu, lambda, s);
    return std::pair<Eigen::VectorXd, Eigen::MatrixXd>{wv / f, D * J / f};
  };
  const double ds = t / steps;
  double s = 0.0;
  for (int k = 0; k < steps; ++k) {
    auto [a1, b1] = rhs(s, m.y, m.jacobian);
    auto [a2, b2] = rhs(s + 0.5 * ds, m.y + 0.5 * ds * a1, m.jacobian + 0.5 * ds * b1);
    auto [a3, b3] = rhs(s + 0.5 * ds, m.y + 0.5 * ds * a2, m.jacobian + 0.5 * ds * b2);
    auto [a4, b4] = rhs(s + ds, m.y + ds * a3, m.jacobian + ds * b3);
    m.y += ds / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
    m.jacobian += ds / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4);
    s += ds;
  }
  if (!chart.in_domain(std::span<const double>(m.y.data(), sz(n))))
    throw DomainError("flow of W leaves the chart at " + format_point(std::span<const double>(m.y.data(), sz(n))) +
                      "; shrink the step or the domain");
  return m;
}

std::vector<CheckReport> self_similar_check(const SelfSimilarProbe& probe, const PointSample& sample, double tol) {
  const auto& d = probe.data;
  auto res = residual_check(d, sample, 1e-8);
  if (!res.passed())
    throw PreconditionError("self-similar probe needs soliton data; residual " + std::to_string(res.max_residual));
  const double h = probe.h;
  for (double t : {-2 * h, 2 * h})
    if (!(warp(d.mu, d.lambda, t) > 0)) throw PreconditionError("f(t) is not positive on the probe window");

  auto two = CheckReport::begin("second difference vs -2 Ric", kFlowAnchor, tol);
  auto one = CheckReport::begin("second difference vs -Ric", kFlowAnchor, tol);
  double dev2h = 0.0;
  for (const auto& p : sample.points) {
    auto g_at = [&](int k) {
      const double t = k * h;
      FlowMap m = flow_map(d.W, d.g.chart(), p, d.mu, d.lambda, t, probe.substeps * std::abs(k));
      return Eigen::MatrixXd(warp(d.mu, d.lambda, t) * m.jacobian.transpose() *
                             d.g.value(std::span<const double>(m.y.data(), m.y.size())) * m.jacobian);
    };
    Eigen::MatrixXd G0 = g_at(0), Gm = g_at(-1), Gp = g_at(1), Gmm = g_at(-2), Gpp = g_at(2);
    Eigen::MatrixXd second = (Gp - 2.0 * G0 + Gm) / (h * h);
    Eigen::MatrixXd second2 = (Gpp - 2.0 * G0 + Gmm) / (4.0 * h * h);
    Eigen::MatrixXd ric = curvature_at(d.g, p).ricci;
    two.add(max_abs(second + 2.0 * ric), max_abs(G0));
    one.add(max_abs(second + ric), max_abs(G0));
    dev2h = std::max(dev2h, max_abs(second2 + 2.0 * ric));
  }
  two.finalize();
  one.finalize();
  two.values["h"] = h;
  two.values["deviation_2h"] = dev2h;
  if (two.max_residual > 0 && dev2h > 0) two.values["observed_order"] = std::log2(dev2h / two.max_residual);
  two.notes = "evaluated at t = 0 only";
  one.status = CheckStatus::Info;
  one.notes = std::string(one.passed() ? "holds" : "does not hold") + "; second derivative of f(t) phi_t^* g0 at t = 0";
  return {two, one};
}

std::vector<VectorField> polynomial_basis(int dim, int degree) {
  std::vector<std::vector<int>> monomials{{}};
  for (int deg = 1; deg <= degree; ++deg) {
    // nondecreasing index tuples of length deg
    std::vector<int> idx(sz(deg), 0);
    while (true) {
      monomials.push_back(idx);
      int k = deg - 1;
      while (k >= 0 && idx[sz(k)] == dim - 1) --k;
      if (k < 0) break;
      ++idx[sz(k)];
      for (int j = k + 1; j < deg; ++j) idx[sz(j)] = idx[sz(k)];
    }
  }
  std::vector<VectorField> out;
  for (const auto& mono : monomials)
    for (int i = 0; i < dim; ++i)
      out.push_back(VectorField::from_eval(
          dim,
          [mono, i, dim](std::span<const Jet> x) {
            Jet v = Jet::constant_like(x.front(), 1.0);
            for (int k : mono) v *= x[sz(k)];
            JetVector w(sz(dim), Jet::constant_like(x.front(), 0.0));
            w[sz(i)] = v;
            return w;
          },
          0));
  return out;
}

SolitonFit fit_soliton(const SolitonFitProblem& prob) {
  const int m = static_cast<int>(prob.basis.size());
  if (m < 1) throw InvalidInput("soliton fit needs at least one basis field");
  if (!prob.theta0.empty() && static_cast<int>(prob.theta0.size()) != m)
    throw InvalidInput("initial theta has " + std::to_string(prob.theta0.size()) + " entries for " +
                       std::to_string(m) + " basis fields");

  SolitonFit fit;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  for (const auto& p : prob.sample.points) {
    Eigen::MatrixXd B(prob.g.dim(), m);
    for (int a = 0; a < m; ++a) B.col(a) = prob.basis[sz(a)].value(p);
    gram += B.transpose() * B;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  for (int a = 0; a < m; ++a) fit.gram_spectrum.push_back(es.eigenvalues()(a));
  const double cond = es.eigenvalues()(0) > 0 ? es.eigenvalues()(m - 1) / es.eigenvalues()(0) : INFINITY;
  if (!(cond <= kGramConditionLimit))
    throw InvalidInput("basis fields are not independent on the sample (Gram condition " + std::to_string(cond) + ")");

  const auto pts = fit_points(prob, prob.sample);
  const bool free_lambda = !prob.fixed_lambda;
  const int P = m + (free_lambda ? 1 : 0);
  Eigen::VectorXd x(P);
  for (int a = 0; a < m; ++a)
    x(a) = prob.theta0.empty() ? (free_lambda ? 0.0 : 0.1) : prob.theta0[sz(a)];
  if (free_lambda) x(m) = prob.lambda0;
  auto r_of = [&](const Eigen::VectorXd& v) {
    return stacked_residual(pts, v.head(m), free_lambda ? v(m) : *prob.fixed_lambda, prob.mu);
  };

  Eigen::VectorXd r = r_of(x);
  double damping = prob.damping;
  fit.stop_reason = "iteration limit";
  int it = 0;
  for (; it < prob.max_iterations; ++it) {
    if (r.lpNorm<Eigen::Infinity>() <= kFitTarget) {
      fit.converged = true;
      fit.stop_reason = "residual";
      break;
    }
    Eigen::MatrixXd J(r.size(), P);
    for (int k = 0; k < P; ++k) {
      const double step = 1e-6 * std::max(1.0, std::abs(x(k)));
      Eigen::VectorXd xs = x;
      xs(k) += step;
      J.col(k) = (r_of(xs) - r) / step;
    }
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd grad = J.transpose() * r;
    const double cost = r.squaredNorm();
    bool accepted = false, tiny = false;
    while (damping <= kMaxDamping) {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(A + damping * Eigen::MatrixXd::Identity(P, P));
      Eigen::VectorXd delta = ldlt.solve(-grad);
      if (ldlt.info() != Eigen::Success || !delta.allFinite()) {
        damping *= 10;
        continue;
      }
      if (delta.norm() <= kMinStep) {
        tiny = true;
        break;
      }
      Eigen::VectorXd xn = x + delta;
      Eigen::VectorXd rn = r_of(xn);
      if (rn.squaredNorm() < cost) {
        x = xn;
        r = rn;
        damping = std::max(damping / 10, 1e-15);
        accepted = true;
        break;
      }
      damping *= 10;
    }
    if (tiny) {
      fit.stop_reason = "step below 1e-14";
      break;
    }
    if (!accepted) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
      const auto& sv = svd.singularValues();
      const double c = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
      if (!std::isfinite(cost)) throw SingularSystem("normal equations are singular (condition " + std::to_string(c) + ")");
      fit.stop_reason = "no decrease at maximal damping (condition " + std::to_string(c) + ")";
      break;
    }
  }
  if (!fit.converged && r.lpNorm<Eigen::Infinity>() <= kFitTarget) {
    fit.converged = true;
    fit.stop_reason = "residual";
  }
  fit.iterations = it;
  fit.theta.assign(x.data(), x.data() + m);
  fit.lambda = free_lambda ? x(m) : *prob.fixed_lambda;
  fit.residual = r.size() ? r.lpNorm<Eigen::Infinity>() : 0.0;
  return fit;
}

double fit_residual(const SolitonFitProblem& prob, const SolitonFit& fit, const PointSample& sample) {
  const auto pts = fit_points(prob, sample);
  Eigen::VectorXd theta = Eigen::Map<const Eigen::VectorXd>(fit.theta.data(), static_cast<Eigen::Index>(fit.theta.size()));
  Eigen::VectorXd r = stacked_residual(pts, theta, fit.lambda, prob.mu);
  return r.size() ? r.lpNorm<Eigen::Infinity>() : 0.0;
}

}  // namespace solgeom
