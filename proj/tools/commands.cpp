#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "solgeom/curvature.hpp"
#include "solgeom/error.hpp"
#include "solgeom/flow.hpp"
#include "solgeom/lie.hpp"
#include "solgeom/soliton.hpp"
#include "solgeom/submanifold.hpp"
#include "solgeom/warped.hpp"

namespace solgeom::cli {
namespace {

using Checks = std::vector<CheckReport>;

struct Ctx {
  const Options& opt;
  const ManifoldConfig& cfg;
  PointSample sample;
  Json& extra;
};

double need_lambda(const Options& opt) {
  if (!opt.lambda) throw InvalidInput("--lambda is required for " + opt.command);
  return *opt.lambda;
}

// A precondition failure turns one group of rows into a single skip row.
void guarded(Checks& out, const std::string& name, const std::string& anchor, const std::function<Checks()>& run) {
  try {
    for (auto& c : run()) out.push_back(std::move(c));
  } catch (const PreconditionError& e) {
    out.push_back(CheckReport::skipped(name, anchor, e.what()));
  }
}

Checks cmd_curvature(Ctx& c) {
  const auto& g = c.cfg.metric;
  double rmin = INFINITY, rmax = -INFINITY;
  for (const auto& p : c.sample.points) {
    const double r = curvature_at(g, p).scalar;
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  c.extra["scalar_curvature_min"] = rmin;
  c.extra["scalar_curvature_max"] = rmax;
  return curvature_checks(g, c.sample, c.opt.tol);
}

Checks cmd_lie(Ctx& c) {
  const VectorField W = c.cfg.field(c.opt.field);
  LieReport lr = classify(c.cfg.metric, W, c.sample, c.opt.tol);
  auto row = [&](const char* name, const std::vector<double>& norms, bool vanishes) {
    auto r = CheckReport::begin(name, "lie-derivatives", c.opt.tol);
    for (double x : norms) r.add(x);
    r.finalize();
    r.tolerance = lr.tolerance;
    r.status = CheckStatus::Info;
    r.notes = vanishes ? "vanishes on the sample" : "does not vanish on the sample";
    return r;
  };
  c.extra["field"] = c.opt.field;
  c.extra["killing"] = lr.killing;
  c.extra["two_killing"] = lr.two_killing;
  Checks out{row("L_W g", lr.lie_g_norm, lr.killing), row("L_W L_W g", lr.lie_lie_g_norm, lr.two_killing)};
  for (auto& r : trace_identity_check(c.cfg.metric, W, c.sample, c.opt.tol)) out.push_back(std::move(r));
  return out;
}

SolitonData soliton_data(Ctx& c) {
  return SolitonData{c.cfg.metric, c.cfg.field(c.opt.field), c.opt.mu, need_lambda(c.opt)};
}

Checks cmd_soliton_check(Ctx& c) {
  const SolitonData data = soliton_data(c);
  c.extra["field"] = c.opt.field;
  c.extra["mu"] = data.mu;
  c.extra["lambda"] = data.lambda;
  c.extra["kind"] = std::string(to_string(classify_soliton(data)));
  return {residual_check(data, c.sample, c.opt.tol)};
}

Checks cmd_identities(Ctx& c) {
  const VectorField W = c.cfg.field(c.opt.field);
  const auto& g = c.cfg.metric;
  Checks out = trace_identity_check(g, W, c.sample, c.opt.tol);
  if (c.opt.lambda) {
    const SolitonData data{g, W, c.opt.mu, *c.opt.lambda};
    out.push_back(residual_check(data, c.sample, c.opt.tol));
    guarded(out, "norm identity", "second-soliton-norm-identity",
            [&] { return norm_identity_check(data, c.sample, c.opt.tol); });
  } else {
    out.push_back(CheckReport::skipped("norm identity", "second-soliton-norm-identity", "no lambda given"));
  }
  for (auto& r : integral_checks(g, W, c.opt.lambda, c.opt.resolution, c.sample, c.opt.tol)) out.push_back(std::move(r));
  return out;
}

Checks cmd_fit(Ctx& c) {
  const auto& g = c.cfg.metric;
  SolitonFitProblem prob{g, {}, c.sample, c.opt.mu, c.opt.lambda, {}, 0.0};
  if (c.opt.basis.empty()) {
    prob.basis = polynomial_basis(g.dim(), c.opt.degree);
  } else {
    for (const auto& name : c.opt.basis) prob.basis.push_back(c.cfg.field(name));
  }
  SolitonFit fit;
  try {
    fit = fit_soliton(prob);
  } catch (const SingularSystem& e) {
    throw InvalidInput(std::string("--basis: ") + e.what());
  }
  const PointSample fresh = sample_points(g.chart(), c.opt.points, c.opt.seed + 1);
  const double fresh_res = fit_residual(prob, fit, fresh);

  auto row = [&](const char* name, double res) {
    auto r = CheckReport::begin(name, "soliton-equation", c.opt.tol);
    r.add(res);
    return r.finalize();
  };
  Checks out{row("fitted soliton residual", fit.residual), row("fitted soliton residual, fresh sample", fresh_res)};
  out.front().notes = fit.stop_reason;
  c.extra["theta"] = fit.theta;
  c.extra["lambda"] = fit.lambda;
  c.extra["lambda_fixed"] = c.opt.lambda.has_value();
  c.extra["iterations"] = fit.iterations;
  c.extra["converged"] = fit.converged;
  c.extra["gram_spectrum"] = fit.gram_spectrum;
  return out;
}

Checks cmd_hypersurface(Ctx& c) {
  if (!c.cfg.immersion) throw InvalidInput("hypersurface needs a config with an immersion block");
  const Immersion& imm = *c.cfg.immersion;
  Checks out = gauss_weingarten_check(imm, c.sample, c.opt.tol);
  for (auto& r : tangential_lie_check(imm, c.sample, c.opt.tol)) out.push_back(std::move(r));
  if (c.opt.lambda) {
    std::optional<ScalarField> psi;
    if (!c.opt.psi.empty()) {
      auto it = c.cfg.scalars.find(c.opt.psi);
      if (it == c.cfg.scalars.end()) throw InvalidInput("--psi: unknown scalar '" + c.opt.psi + "'");
      psi = it->second;
    }
    for (auto& r : prop_checks(imm, *c.opt.lambda, c.sample, c.opt.resolution, c.opt.tol, psi))
      out.push_back(std::move(r));
  } else {
    out.push_back(CheckReport::skipped("submanifold soliton relations", "parallel-shape-operator-soliton",
                                       "no lambda given"));
  }
  if (imm.codim() == 1) {
    const ShapeClass sc = shape_classify(imm, c.sample, c.opt.tol);
    c.extra["metallic"] = Json{{"r", sc.metallic.r}, {"s", sc.metallic.s}, {"residual", sc.metallic.residual}};
    c.extra["umbilical"] = sc.umbilical;
    c.extra["geodesic"] = sc.geodesic;
    c.extra["minimal"] = sc.minimal;
  }
  return out;
}

Checks cmd_warped(Ctx& c) {
  if (!c.cfg.warped) throw InvalidInput("warped needs a config with a warped block");
  const WarpedConfig& w = *c.cfg.warped;
  Checks out = ricci_decomposition_check(w.product, c.sample, c.opt.tol);
  for (auto& r : lie_expansion_check(w.product, w.base_field, w.fiber_field, c.sample, c.opt.tol))
    out.push_back(std::move(r));
  if (c.opt.lambda) {
    for (auto& r : prop_factor_checks(w.product, w.base_field, w.fiber_field, *c.opt.lambda, c.sample, c.opt.tol))
      out.push_back(std::move(r));
  } else {
    out.push_back(CheckReport::skipped("factor equations", "warped-soliton-factors", "no lambda given"));
  }
  c.extra["fiber_scaling"] = kResolvedFiberScaling == FiberScaling::WarpedFiber ? "f^2 g2" : "g2";
  return out;
}

Checks cmd_flow(Ctx& c) {
  if (!(c.opt.step > 0)) throw InvalidInput("--step must be positive");
  if (!(c.opt.t_end >= 0)) throw InvalidInput("--t-end must be nonnegative");
  Checks out;
  guarded(out, "rk4 scale vs closed form", "hyperbolic-ricci-flow", [&] {
    const FlowFamily fam = make_flow_family(c.cfg.metric, c.sample, c.opt.c0, c.opt.c1, c.opt.tol);
    const FlowTrajectory tr = integrate_flow(fam, c.opt.t_end, c.opt.step);
    auto r = CheckReport::begin("rk4 scale vs closed form", "hyperbolic-ricci-flow", c.opt.tol);
    for (const auto& s : tr.states) r.add(std::abs(s.c - exact_scale(fam, s.t)), std::abs(s.c));
    r.finalize();
    r.notes = std::string(to_string(tr.status));
    c.extra["kappa"] = fam.kappa;
    c.extra["status"] = std::string(to_string(tr.status));
    c.extra["t"] = tr.back().t;
    c.extra["c"] = tr.back().c;
    c.extra["dc"] = tr.back().dc;
    c.extra["steps"] = static_cast<int>(tr.states.size()) - 1;
    return Checks{r};
  });
  return out;
}

Checks cmd_self_similar(Ctx& c) {
  if (!(c.opt.h > 0)) throw InvalidInput("--probe-step must be positive");
  Checks out;
  SelfSimilarProbe probe{soliton_data(c), c.opt.h};
  // The second difference carries an O(h^2) truncation error.
  const double tol = c.opt.tol_given ? c.opt.tol : 10.0 * c.opt.h * c.opt.h;
  guarded(out, "second difference vs -2 Ric", "self-similar-derivation",
          [&] { return self_similar_check(probe, c.sample, tol); });
  return out;
}

const std::map<std::string, std::function<Checks(Ctx&)>>& table() {
  static const std::map<std::string, std::function<Checks(Ctx&)>> t{
      {"curvature", cmd_curvature},   {"lie", cmd_lie},
      {"soliton-check", cmd_soliton_check}, {"soliton-fit", cmd_fit},
      {"identities", cmd_identities}, {"hypersurface", cmd_hypersurface},
      {"warped", cmd_warped},         {"flow", cmd_flow},
      {"self-similar", cmd_self_similar},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"curvature", "lie",     "soliton-check", "soliton-fit", "identities",
                                              "hypersurface", "warped", "flow",          "self-similar"};
  return names;
}

Report dispatch(const Options& opt, const ManifoldConfig& cfg) {
  auto it = table().find(opt.command);
  if (it == table().end()) throw InvalidInput("unknown command '" + opt.command + "'");
  if (opt.points < 1) throw InvalidInput("--points must be positive");
  if (opt.resolution < 2) throw InvalidInput("--resolution must be at least 2");
  if (!(opt.tol > 0)) throw InvalidInput("--tol must be positive");
  Report rep;
  rep.command = opt.command;
  rep.manifold = cfg.name;
  rep.config_digest = cfg.digest;
  rep.seed = opt.seed;
  rep.points = opt.points;
  rep.tolerance = opt.tol;
  Ctx ctx{opt, cfg, sample_points(cfg.chart(), opt.points, opt.seed), rep.extra};
  rep.checks = it->second(ctx);
  return rep;
}

}  // namespace solgeom::cli
