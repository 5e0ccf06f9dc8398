#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "report.hpp"

namespace solgeom::cli {

struct Options {
  std::string command;
  std::string manifold;
  int points = 50;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  bool tol_given = false;           // self-similar defaults to 10 h^2 otherwise
  int resolution = 64;
  double mu = 0.0;
  std::optional<double> lambda;
  std::string field = "zero";
  std::string psi;                  // hypersurface: scalar name, default <X, X> / 2
  std::vector<std::string> basis;   // soliton-fit: named fields; empty uses --degree
  int degree = 1;
  double t_end = 0.5;               // flow
  double step = 0.01;
  double c0 = 1.0;
  double c1 = 0.0;
  double h = 1e-3;                  // self-similar
};

const std::vector<std::string>& command_names();

/// Runs one command. Throws solgeom::Error subclasses on invalid input;
/// PreconditionError from a whole command becomes a skip row.
Report dispatch(const Options& opt, const ManifoldConfig& cfg);

}  // namespace solgeom::cli
