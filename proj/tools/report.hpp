#pragma once

// Run reports: a header, one row per check, and a summary. JSON keys are
// emitted in a fixed order and floats use nlohmann's shortest round-trip form,
// so identical runs produce identical bytes.

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "solgeom/check.hpp"

namespace solgeom::cli {

inline constexpr const char* kEngineVersion = "0.1.0";

struct Report {
  std::string command;
  std::vector<std::string> argv;  // echo, without the program name
  std::string manifold;
  std::string config_digest;
  std::uint64_t seed = 0;
  int points = 0;
  double tolerance = 0.0;
  std::vector<CheckReport> checks;
  Json extra = Json::object();  // command-specific values (fit results, trajectories)
  std::optional<double> wall_time;

  int count(CheckStatus s) const;
  /// 1 when any check failed, else 0.
  int exit_code() const;
};

Json to_json(const Report& r);
std::string render_json(const Report& r);
std::string render_text(const Report& r);

}  // namespace solgeom::cli
