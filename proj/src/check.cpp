#include "solgeom/check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace solgeom {

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skip: return "skip";
    case CheckStatus::Info: return "info";
  }
  return "?";
}

CheckReport CheckReport::begin(std::string name, std::string anchor, double tol) {
  CheckReport r;
  r.name = std::move(name);
  r.anchor = std::move(anchor);
  r.base_tolerance = tol;
  r.tolerance = tol;
  return r;
}

void CheckReport::add(double residual, double scale) {
  residuals.push_back(residual);
  operand_scale = std::max(operand_scale, std::abs(scale));
}

CheckReport& CheckReport::finalize() {
  tolerance = scaled_tolerance(base_tolerance, operand_scale);
  if (residuals.empty()) {
    max_residual = mean_residual = 0.0;
  } else {
    max_residual = 0.0;
    for (double r : residuals) max_residual = std::max(max_residual, std::isnan(r) ? INFINITY : r);
    mean_residual = std::accumulate(residuals.begin(), residuals.end(), 0.0) /
                    static_cast<double>(residuals.size());
  }
  status = max_residual <= tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  return *this;
}

CheckReport CheckReport::skipped(std::string name, std::string anchor, std::string why) {
  CheckReport r;
  r.name = std::move(name);
  r.anchor = std::move(anchor);
  r.status = CheckStatus::Skip;
  r.notes = std::move(why);
  return r;
}

}  // namespace solgeom
