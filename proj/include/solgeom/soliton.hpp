#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "solgeom/check.hpp"
#include "solgeom/fields.hpp"

namespace solgeom {

/// (M, g, W, mu, lambda). mu = 0 is a second soliton.
struct SolitonData {
  MetricField g;
  VectorField W;
  double mu = 0.0;
  double lambda = 0.0;
};

/// L_W L_W g + mu L_W g + Ric - lambda g at p.
Eigen::MatrixXd residual(const SolitonData& data, std::span<const double> p);

/// Max-abs residual over the sample; tolerance scaled by the largest operand.
CheckReport residual_check(const SolitonData& data, const PointSample& sample, double tol);

enum class SolitonKind { Expanding, Shrinking, Steady };
SolitonKind classify_soliton(const SolitonData& data);
std::string_view to_string(SolitonKind k);

/// The two candidate right-hand sides for trace_g(L_W L_W g), in terms of
/// a = |nabla W|^2, b = div(nabla_W W), c = Ric(W, W):
///   FactorTwoPlusDiv: 2 (a + b - c)
///   ProofForm:        a - c - b
enum class TraceForm { FactorTwoPlusDiv, ProofForm };
/// Selected by the finite-difference oracle on the regression corpus (see
/// tests/test_soliton.cpp, TraceFormResolution).
inline constexpr TraceForm kResolvedTraceForm = TraceForm::FactorTwoPlusDiv;

struct TraceTerms {
  double lhs = 0.0;            // trace_g(L_W L_W g)
  double nabla_w_norm2 = 0.0;  // |nabla W|^2
  double div_nabla_w_w = 0.0;  // div(nabla_W W)
  double ric_ww = 0.0;         // Ric(W, W)
  double rhs(TraceForm form) const;
};

/// Needs jet order >= 3.
TraceTerms trace_terms(const MetricField& g, const VectorField& W, std::span<const double> p,
                       int order = kDefaultJetOrder);

/// Gating row for kResolvedTraceForm plus an info row for the other form.
std::vector<CheckReport> trace_identity_check(const MetricField& g, const VectorField& W,
                                              const PointSample& sample, double tol,
                                              int order = kDefaultJetOrder);

/// |L_W L_W g|^2 against n lambda^2 - 2 lambda R + |Ric|^2 (gating) and the
/// form without the factor n (info). Throws PreconditionError unless data
/// is a second soliton on the sample.
std::vector<CheckReport> norm_identity_check(const SolitonData& data, const PointSample& sample, double tol);

/// Pointwise R = n lambda wherever trace(L_W L_W g) vanishes on the sample;
/// skipped when it does not.
CheckReport traceless_scalar_check(const SolitonData& data, const PointSample& sample, double tol);

/// Yano integral of Ric(W,W) + |L_W g|^2 / 2 - |nabla W|^2 - (div W)^2 and,
/// when lambda is given, the traceless branch R = n lambda. Both rows are
/// skipped on charts that are not closed.
std::vector<CheckReport> integral_checks(const MetricField& g, const VectorField& W,
                                         std::optional<double> lambda, int resolution,
                                         const PointSample& sample, double tol);

/// Integrand of the Yano identity at p.
double yano_integrand(const MetricField& g, const VectorField& W, std::span<const double> p);

/// Relations of a field with nabla W = a Q: each one a separate row.
std::vector<CheckReport> wric_check(const MetricField& g, const VectorField& W, double a,
                                    const PointSample& sample, double tol);

}  // namespace solgeom
