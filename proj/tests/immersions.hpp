#pragma once

#include <string>
#include <utility>
#include <vector>

#include "solgeom/submanifold.hpp"
#include "test_support.hpp"

namespace testing_support {

inline Immersion make_imm(std::vector<std::string> names, std::vector<Interval> domain,
                          const std::vector<std::string>& comps, const std::map<std::string, double>& constants = {},
                          bool closed = false, std::vector<double> ambient = {}) {
  Chart chart(std::move(names), std::move(domain));
  chart.declare_closed(closed);
  ExprScope scope = chart.scope(constants);
  std::vector<Expr> e;
  for (const auto& s : comps) e.push_back(parse_expression(s, scope));
  return make_immersion(chart, std::move(e), std::move(ambient));
}

inline Immersion plane_z1() {
  return make_imm({"u", "v"}, {{-2, 2, false}, {-2, 2, false}}, {"u", "v", "1"});
}

inline Immersion round_sphere(double rho = 1.0, double cz = 0.0) {
  return make_imm({"t", "p"}, {{0, kPi, false}, {0, 2 * kPi, true}},
                  {"rho*sin(t)*cos(p)", "rho*sin(t)*sin(p)", "cz + rho*cos(t)"}, {{"rho", rho}, {"cz", cz}}, true);
}

inline Immersion cylinder() {
  return make_imm({"u", "v"}, {{0, 2 * kPi, true}, {-2, 2, false}}, {"cos(u)", "sin(u)", "v"});
}

inline Immersion torus_of_revolution() {
  return make_imm({"u", "v"}, {{0, 2 * kPi, true}, {0, 2 * kPi, true}},
                  {"(2 + cos(v))*cos(u)", "(2 + cos(v))*sin(u)", "sin(v)"});
}

inline Immersion saddle_graph() {
  return make_imm({"x", "y"}, {{-1, 1, false}, {-1, 1, false}}, {"x", "y", "x^2 - y^2"});
}

inline Immersion catenoid() {
  return make_imm({"u", "v"}, {{0, 2 * kPi, true}, {-1, 1, false}}, {"cosh(v)*cos(u)", "cosh(v)*sin(u)", "v"});
}

inline Immersion helicoid() {
  return make_imm({"u", "v"}, {{-2, 2, false}, {-1, 1, false}}, {"v*cos(u)", "v*sin(u)", "u"});
}

/// Hyperbolic plane as the upper hyperboloid in R^{2,1}.
inline Immersion hyperboloid() {
  return make_imm({"r", "p"}, {{0.2, 2, false}, {0, 2 * kPi, true}},
                  {"sinh(r)*cos(p)", "sinh(r)*sin(p)", "cosh(r)"}, {}, false, {1, 1, -1});
}

/// Unit 2-sphere in R^4 = R^3 x R, codimension 2.
inline Immersion sphere_in_r4() {
  return make_imm({"t", "p"}, {{0, kPi, false}, {0, 2 * kPi, true}},
                  {"sin(t)*cos(p)", "sin(t)*sin(p)", "cos(t)", "1"}, {}, true);
}

inline std::vector<std::pair<std::string, Immersion>> immersion_corpus() {
  return {{"plane", plane_z1()},
          {"unit sphere", round_sphere()},
          {"sphere radius 2", round_sphere(2.0)},
          {"off-center sphere", round_sphere(1.0, 1.0)},
          {"cylinder", cylinder()},
          {"torus", torus_of_revolution()},
          {"saddle graph", saddle_graph()},
          {"catenoid", catenoid()},
          {"helicoid", helicoid()},
          {"hyperboloid", hyperboloid()},
          {"sphere in R4", sphere_in_r4()}};
}

}  // namespace testing_support
