#include <gtest/gtest.h>

#include <cmath>

#include "solgeom/error.hpp"
#include "solgeom/flow.hpp"
#include "test_support.hpp"

using namespace testing_support;

namespace {

SolitonData flagship() {
  auto g = euclidean(3);
  return {g, VectorField::position(3), 0.0, 4.0};
}

// phi_t for W = x / (1 - 2 t^2): x exp(F(t)), F(t) = atanh(sqrt2 t) / sqrt2.
double flagship_F(double t) { return std::atanh(std::sqrt(2.0) * t) / std::sqrt(2.0); }

std::vector<VectorField> sphere_killing(const Chart& c) {
  return {make_field(c, {"0", "1"}), make_field(c, {"-sin(phi)", "-cos(t1)/sin(t1)*cos(phi)"}),
          make_field(c, {"cos(phi)", "-cos(t1)/sin(t1)*sin(phi)"})};
}

}  // namespace

TEST(Flow, EinsteinConstants) {
  EXPECT_NEAR(make_flow_family(sphere(2), sample_points(sphere(2).chart(), 10, 1)).kappa, 1.0, 1e-12);
  EXPECT_NEAR(make_flow_family(hyperbolic_half_plane(), sample_points(hyperbolic_half_plane().chart(), 10, 1)).kappa,
              -1.0, 1e-12);
  EXPECT_EQ(make_flow_family(flat_torus(2), sample_points(flat_torus(2).chart(), 5, 1)).kappa, 0.0);
  std::mt19937_64 rng(2);
  auto pert = random_perturbed_flat(rng, 2, 0.2);
  EXPECT_THROW(make_flow_family(pert, sample_points(pert.chart(), 10, 1)), PreconditionError);
  EXPECT_THROW(make_flow_family(sphere(2), sample_points(sphere(2).chart(), 3, 1), -1.0), PreconditionError);
}

TEST(Flow, SphereScaleAtHalf) {
  FlowFamily s2{1.0, 1.0, 0.0};
  auto tr = integrate_flow(s2, 0.5, 0.01);
  EXPECT_EQ(tr.status, FlowStatus::Completed);
  EXPECT_DOUBLE_EQ(tr.back().t, 0.5);
  EXPECT_NEAR(tr.back().c, 0.75, 1e-10);
  EXPECT_NEAR(tr.back().dc, -1.0, 1e-10);
}

TEST(Flow, FlatAndHyperbolic) {
  auto tr = integrate_flow(FlowFamily{0.0, 1.7, 0.0}, 3.0, 0.1);
  for (const auto& s : tr.states) EXPECT_EQ(s.c, 1.7);
  auto hy = integrate_flow(FlowFamily{-1.0, 1.0, 0.3}, 1.0, 0.05);
  EXPECT_NEAR(hy.back().c, 1.0 + 0.3 + 1.0, 1e-10);
}

TEST(Flow, Collapse) {
  auto tr = integrate_flow(FlowFamily{1.0, 1.0, 0.0}, 2.0, 0.01);
  EXPECT_EQ(tr.status, FlowStatus::Collapsed);
  EXPECT_LE(tr.back().c, kCollapse);
  EXPECT_NEAR(tr.back().t, 1.0, 0.011);
  EXPECT_THROW(integrate_flow(FlowFamily{}, 1.0, 0.0), InvalidInput);
  EXPECT_THROW(integrate_flow(FlowFamily{}, 1.0, -1.0), InvalidInput);
}

// c'' is constant, so RK4 is exact up to rounding and there is no h^4 error
// to halve.
TEST(Flow, Rk4ExactOnQuadratic) {
  FlowFamily s2{1.0, 1.0, 0.25};
  for (double h : {0.1, 0.05, 0.025}) {
    auto tr = integrate_flow(s2, 0.9, h);
    EXPECT_LT(std::abs(tr.back().c - exact_scale(s2, 0.9)), 1e-14);
  }
}

TEST(Flow, FlowMapMatchesExactFlagship) {
  auto d = flagship();
  const Point p{0.3, -0.5, 0.8};
  for (double t : {-0.02, 0.01, 0.05}) {
    auto m = flow_map(d.W, d.g.chart(), p, 0.0, 4.0, t, 40);
    const double e = std::exp(flagship_F(t));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(m.y(i), e * p[static_cast<std::size_t>(i)], 1e-11);
    EXPECT_LT(max_abs(m.jacobian - e * Eigen::MatrixXd::Identity(3, 3)), 1e-11);
  }
}

TEST(SelfSimilar, FlagshipSmallDeviation) {
  auto d = flagship();
  auto sample = sample_points(Chart::box(std::vector<Interval>(3, Interval{-1, 1, false})), 10, 3);
  auto rows = self_similar_check({d, 1e-3, 8}, sample, 1e-4);
  EXPECT_TRUE(rows[0].passed()) << rows[0].max_residual;
  EXPECT_LT(rows[0].max_residual, 1e-4);
  EXPECT_GT(rows[0].values.at("observed_order"), 1.8);
}

TEST(SelfSimilar, FlagshipConvergenceOrder) {
  auto d = flagship();
  auto sample = sample_points(Chart::box(std::vector<Interval>(3, Interval{-1, 1, false})), 5, 3);
  std::vector<double> hs{1e-2, 5e-3, 2.5e-3}, dev;
  for (double h : hs) dev.push_back(self_similar_check({d, h, 8}, sample, 1.0)[0].max_residual);
  const double slope = (std::log(dev[0]) - std::log(dev[2])) / (std::log(hs[0]) - std::log(hs[2]));
  EXPECT_GE(slope, 1.8);
  // f e^{2F} = 1 + 2t + 0 t^2 + ..., so the second difference tends to 0 = -2 Ric
  EXPECT_LT(dev[2], 1e-3);
}

TEST(SelfSimilar, SphereExposesFactorTwo) {
  auto g = sphere(2);
  SolitonData d{g, VectorField::zero(2), 0.0, 1.0};
  auto rows = self_similar_check({d, 1e-3, 8}, sample_points(g.chart(), 10, 4), 1e-4);
  EXPECT_TRUE(rows[0].failed());
  // deviation is |g0|: second difference -g0 against -2 g0
  auto s = sample_points(g.chart(), 10, 4);
  double gmax = 0;
  for (const auto& p : s.points) gmax = std::max(gmax, max_abs(g.value(p)));
  EXPECT_NEAR(rows[0].max_residual, gmax, 1e-5);
  EXPECT_EQ(rows[1].status, CheckStatus::Info);
  EXPECT_LT(rows[1].max_residual, 1e-6);
}

TEST(SelfSimilar, TrivialAndErrors) {
  auto g = euclidean(2);
  auto rows = self_similar_check({{g, VectorField::zero(2), 0.0, 0.0}, 1e-3, 8}, sample_points(g.chart(), 5, 1), 1e-9);
  EXPECT_TRUE(rows[0].passed());
  EXPECT_LT(rows[0].max_residual, 1e-9);

  EXPECT_THROW(self_similar_check({{g, VectorField::zero(2), 0.0, 1.0}, 1e-3, 8}, sample_points(g.chart(), 5, 1), 1e-4),
               PreconditionError);
  PointSample edge{{{1.9, 0.0, 0.0}}, {1.0}};
  EXPECT_THROW(self_similar_check({flagship(), 0.1, 8}, edge, 1e-4), DomainError);
}

TEST(Fit, EuclideanScalingFieldLambdaFixed) {
  auto g = euclidean(2);
  auto c = g.chart();
  std::vector<VectorField> basis{make_field(c, {"1", "0"}),  make_field(c, {"0", "1"}),  make_field(c, {"x1", "0"}),
                                 make_field(c, {"0", "x2"}), make_field(c, {"x2", "0"}), make_field(c, {"0", "x1"})};
  SolitonFitProblem prob{g, basis, sample_points(c, 20, 5)};
  prob.fixed_lambda = 4.0;
  prob.theta0 = {0.1, -0.2, 0.6, 0.4, 0.1, 0.3};
  auto fit = fit_soliton(prob);
  EXPECT_TRUE(fit.converged) << fit.stop_reason;
  EXPECT_LE(fit.residual, 1e-8);
  const double scale = 0.5 * (fit.theta[2] + fit.theta[3]);
  EXPECT_NEAR(std::abs(scale), 1.0, 1e-6);
  EXPECT_NEAR(fit.theta[2], fit.theta[3], 1e-6);
  EXPECT_NEAR(fit.theta[4], -fit.theta[5], 1e-6);
  EXPECT_EQ(fit.gram_spectrum.size(), 6u);
  // fresh sample, twice as large
  EXPECT_LE(fit_residual(prob, fit, sample_points(c, 40, 99)), 10 * std::max(fit.residual, 1e-13));

  SolitonFitProblem dflt = prob;
  dflt.theta0.clear();
  EXPECT_LE(fit_soliton(dflt).residual, 1e-8);
}

TEST(Fit, EuclideanLambdaFreeTrivial) {
  auto g = euclidean(2);
  SolitonFitProblem prob{g, polynomial_basis(2, 1), sample_points(g.chart(), 20, 5)};
  auto fit = fit_soliton(prob);
  EXPECT_TRUE(fit.converged);
  EXPECT_EQ(fit.iterations, 0);
  EXPECT_EQ(fit.lambda, 0.0);
  for (double t : fit.theta) EXPECT_EQ(t, 0.0);
}

TEST(Fit, SphereKillingBasis) {
  auto g = sphere(2);
  SolitonFitProblem prob{g, sphere_killing(g.chart()), sample_points(g.chart(), 20, 6)};
  auto fit = fit_soliton(prob);
  EXPECT_TRUE(fit.converged) << fit.stop_reason;
  EXPECT_NEAR(fit.lambda, 1.0, 1e-8);
  for (double t : fit.theta) EXPECT_NEAR(t, 0.0, 1e-12);
  EXPECT_LE(fit_residual(prob, fit, sample_points(g.chart(), 40, 7)), 10 * std::max(fit.residual, 1e-13));
}

TEST(Fit, DependentBasisRejected) {
  auto g = euclidean(2);
  auto c = g.chart();
  SolitonFitProblem prob{g, {make_field(c, {"1", "0"}), make_field(c, {"2", "0"})}, sample_points(c, 10, 1)};
  EXPECT_THROW(fit_soliton(prob), InvalidInput);
  prob.basis.clear();
  EXPECT_THROW(fit_soliton(prob), InvalidInput);
}

TEST(Fit, PolynomialBasisSize) {
  EXPECT_EQ(polynomial_basis(2, 1).size(), 6u);
  EXPECT_EQ(polynomial_basis(2, 2).size(), 12u);
  EXPECT_EQ(polynomial_basis(3, 1).size(), 12u);
  auto b = polynomial_basis(2, 2);
  EXPECT_NEAR(b[11].value(Point{2.0, 3.0})(1), 9.0, 1e-15);  // x2^2 d2
}
