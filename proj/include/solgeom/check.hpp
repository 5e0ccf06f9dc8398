#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace solgeom {

enum class CheckStatus { Pass, Fail, Skip, Info };

std::string_view to_string(CheckStatus s);

/// Outcome of one identity check over a sample (or one quadrature).
/// Pass iff the maximum residual is within tolerance. Skip marks a check whose
/// hypotheses were not met; Info rows document values without gating.
struct CheckReport {
  std::string name;
  std::string anchor;
  std::vector<double> residuals;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::Skip;
  std::string notes;
  std::optional<double> integral;
  std::optional<int> resolution;
  /// Extra named values, emitted in key order.
  std::map<std::string, double> values;
  /// Unscaled tolerance and the largest operand magnitude seen; finalize()
  /// sets tolerance = base_tolerance * (1 + operand_scale).
  double base_tolerance = 0.0;
  double operand_scale = 0.0;

  static CheckReport begin(std::string name, std::string anchor, double tol);
  void add(double residual, double scale = 0.0);

  bool passed() const { return status == CheckStatus::Pass; }
  bool failed() const { return status == CheckStatus::Fail; }

  /// Computes max/mean from `residuals` and sets Pass/Fail.
  CheckReport& finalize();
  static CheckReport skipped(std::string name, std::string anchor, std::string why);
};

/// max |component| of a residual; the norm used for every pointwise residual.
template <typename Matrix>
double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Tolerance scaled by operand magnitude: tol * (1 + scale).
inline double scaled_tolerance(double tol, double scale) { return tol * (1.0 + scale); }

}  // namespace solgeom
