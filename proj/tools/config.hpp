#pragma once

// Manifold configs: JSON files or "builtin:<name>" specs, validated strictly.
// Errors are InvalidInput with a JSON-pointer prefix ("/metric/2: ...").

#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "solgeom/fields.hpp"
#include "solgeom/submanifold.hpp"
#include "solgeom/warped.hpp"

namespace solgeom::cli {

using Json = nlohmann::ordered_json;

struct WarpedConfig {
  WarpedProduct product;
  VectorField base_field;   // W1, product coordinates
  VectorField fiber_field;  // W2, product coordinates
};

struct ManifoldConfig {
  std::string name;
  MetricField metric;
  std::map<std::string, VectorField> fields;
  std::map<std::string, ScalarField> scalars;
  std::map<std::string, double> constants;
  std::optional<Immersion> immersion;
  std::optional<WarpedConfig> warped;
  Json canonical;      // builtins expanded
  std::string digest;  // FNV-1a 64 of canonical.dump()

  int dim() const { return metric.dim(); }
  const Chart& chart() const { return metric.chart(); }
  /// Config fields plus "zero" and "position" (flat charts) / "w_top" (immersions).
  VectorField field(const std::string& name) const;
};

/// Expands builtin names (euclidean:n, minkowski:n, sphere:n:radius,
/// hyperbolic2, torus:n, cylinder, graph:expr) to full config JSON.
Json expand_builtin(const std::string& source, const std::string& pointer = "/builtin");

/// `source` is "builtin:<name>" or a path to a JSON file.
ManifoldConfig load_config(const std::string& source);
ManifoldConfig parse_config(const Json& j);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace solgeom::cli
