#include <algorithm>
#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "report.hpp"
#include "solgeom/error.hpp"

namespace {

std::string usage() {
  std::string s = "usage: solgeom <command> --manifold <builtin:NAME | config.json> [options]\ncommands:";
  for (const auto& c : solgeom::cli::command_names()) s += " " + c;
  return s + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace solgeom::cli;
  Options opt;
  bool json = false, timing = false;
  std::string basis;

  CLI::App app{"Numerical checks for hyperbolic Ricci solitons"};
  app.add_option("command", opt.command, "command to run")->required();
  app.add_option("--manifold", opt.manifold, "builtin:NAME or a config JSON path")->required();
  app.add_option("--points", opt.points, "sample size");
  app.add_option("--seed", opt.seed, "sampling seed");
  auto* tol_opt = app.add_option("--tol", opt.tol, "base tolerance");
  app.add_option("--resolution", opt.resolution, "quadrature nodes per axis");
  app.add_option("--mu", opt.mu, "mu");
  app.add_option("--lambda", opt.lambda, "lambda (soliton-fit: fixes lambda)");
  app.add_option("--field", opt.field, "vector field name");
  app.add_option("--psi", opt.psi, "scalar name for hypersurface checks");
  app.add_option("--basis", basis, "comma-separated field names for soliton-fit");
  app.add_option("--degree", opt.degree, "polynomial basis degree for soliton-fit");
  app.add_option("--t-end", opt.t_end, "flow end time");
  app.add_option("--step", opt.step, "flow RK4 step");
  app.add_option("--c0", opt.c0, "flow c(0)");
  app.add_option("--c1", opt.c1, "flow c'(0)");
  app.add_option("--probe-step", opt.h, "self-similar time step");
  app.add_flag("--json", json, "machine-readable output");
  app.add_flag("--timing", timing, "include wall time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help() << usage();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "solgeom: " << e.what() << "\n" << usage();
    return 2;
  }

  opt.tol_given = tol_opt->count() > 0;
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), opt.command) == names.end()) {
    std::cerr << "solgeom: unknown command '" << opt.command << "'\n" << usage();
    return 2;
  }
  for (std::size_t pos = 0; !basis.empty() && pos <= basis.size();) {
    const auto next = std::min(basis.find(',', pos), basis.size());
    opt.basis.push_back(basis.substr(pos, next - pos));
    pos = next + 1;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    const ManifoldConfig cfg = load_config(opt.manifold);
    Report rep = dispatch(opt, cfg);
    rep.argv.assign(argv + 1, argv + argc);
    if (timing) rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (json ? render_json(rep) : render_text(rep));
    return rep.exit_code();
  } catch (const solgeom::Error& e) {
    std::cerr << "solgeom: " << e.what() << "\n";
    return 2;
  }
}
