#pragma once

// Hyperbolic Ricci flow on the scaling family g(t) = c(t) g_E of an Einstein
// metric (c'' = -2 kappa), the t = 0 self-similar probe, and a
// Levenberg-Marquardt search for soliton data.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "solgeom/check.hpp"
#include "solgeom/fields.hpp"
#include "solgeom/soliton.hpp"

namespace solgeom {

inline constexpr double kCollapse = 1e-9;

struct FlowFamily {
  double kappa = 0.0;
  double c0 = 1.0;
  double c1 = 0.0;  // c'(0)
};

/// Reads kappa off Ric = kappa g by least squares over the sample; throws
/// PreconditionError when the residual exceeds tol (scaled) or c0 <= 0.
FlowFamily make_flow_family(const MetricField& g, const PointSample& sample, double c0 = 1.0, double c1 = 0.0,
                            double tol = 1e-8);

struct FlowState {
  double t, c, dc;
};

enum class FlowStatus { Completed, Collapsed };
std::string_view to_string(FlowStatus s);

struct FlowTrajectory {
  std::vector<FlowState> states;
  FlowStatus status = FlowStatus::Completed;
  const FlowState& back() const { return states.back(); }
};

/// Classical RK4 on (c, c'); the last step is shortened to land on t_end.
/// Stops with status Collapsed once c <= kCollapse. Throws InvalidInput on h <= 0.
FlowTrajectory integrate_flow(const FlowFamily& fam, double t_end, double h);

/// c(t) = c0 + c1 t - kappa t^2.
double exact_scale(const FlowFamily& fam, double t);

struct SelfSimilarProbe {
  SolitonData data;
  double h = 1e-3;
  int substeps = 8;  // RK4 steps for phi_t per unit of h
};

/// g(t) = f(t) phi_t^* g0 with f = 1 + mu t - lambda t^2 / 2 and phi_t the flow
/// of W0 / f(t), at t in {-2h, -h, 0, h, 2h}. The central second difference
/// (step h) is compared with -2 Ric(g0); rows also give the comparison with
/// -Ric(g0), which is what the construction yields, and the step-2h deviation.
/// Throws PreconditionError when the soliton residual fails and DomainError
/// when phi_t leaves the chart.
std::vector<CheckReport> self_similar_check(const SelfSimilarProbe& probe, const PointSample& sample, double tol);

/// phi_t(p) and its Jacobian, integrated with RK4.
struct FlowMap {
  Eigen::VectorXd y;
  Eigen::MatrixXd jacobian;
};
FlowMap flow_map(const VectorField& W, const Chart& chart, std::span<const double> p, double mu, double lambda, double t,
                 int steps);

struct SolitonFitProblem {
  MetricField g;
  std::vector<VectorField> basis;
  PointSample sample;
  double mu = 0.0;
  std::optional<double> fixed_lambda;
  std::vector<double> theta0;  // defaults to zeros
  double lambda0 = 0.0;
  double damping = 1e-3;
  int max_iterations = 200;
};

struct SolitonFit {
  std::vector<double> theta;
  double lambda = 0.0;
  double residual = 0.0;  // max |residual entry|
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<double> gram_spectrum;  // ascending
};

/// Throws InvalidInput on an empty basis or Gram condition > 1e12, and
/// SingularSystem when damping cannot make the normal equations solvable.
SolitonFit fit_soliton(const SolitonFitProblem& prob);

/// Max residual of the fitted field on another sample.
double fit_residual(const SolitonFitProblem& prob, const SolitonFit& fit, const PointSample& sample);

/// Monomial basis x^alpha d_i with |alpha| <= degree.
std::vector<VectorField> polynomial_basis(int dim, int degree);

}  // namespace solgeom
