#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "commands.hpp"
#include "config.hpp"
#include "report.hpp"
#include "solgeom/curvature.hpp"
#include "solgeom/error.hpp"

using namespace solgeom;
using namespace solgeom::cli;

namespace {

Report run(const std::string& command, const std::string& manifold, Options opt = {}) {
  opt.command = command;
  opt.manifold = manifold;
  return dispatch(opt, load_config(manifold));
}

std::string invalid_message(const Json& j) {
  try {
    parse_config(j);
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return "";
}

struct Proc {
  int code = -1;
  std::string out;
};

Proc exec(const std::string& args) {
  Proc p;
  const std::string cmd = std::string(SOLGEOM_BIN) + " " + args + " 2>/dev/null";
  FILE* f = popen(cmd.c_str(), "r");
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, f)) > 0) p.out.append(buf, got);
  const int status = pclose(f);
  p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return p;
}

}  // namespace

TEST(Config, SphereBuiltinExpands) {
  auto cfg = load_config("builtin:sphere:2:1.0");
  EXPECT_EQ(cfg.dim(), 2);
  EXPECT_TRUE(cfg.chart().closed());
  double p[] = {0.7, 1.3};
  Eigen::MatrixXd g = cfg.metric.value(p);
  EXPECT_NEAR(g(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(g(1, 1), std::sin(0.7) * std::sin(0.7), 1e-15);
  EXPECT_EQ(g(0, 1), 0.0);
}

TEST(Config, BuiltinTable) {
  EXPECT_EQ(load_config("builtin:minkowski:4").metric.signature().negative, 1);
  EXPECT_EQ(load_config("builtin:torus:2").chart().closed(), true);
  EXPECT_TRUE(load_config("builtin:cylinder").immersion.has_value());
  auto graph = load_config("builtin:graph:x^2-y^2");
  ASSERT_TRUE(graph.immersion);
  EXPECT_EQ(graph.immersion->ambient_dim(), 3);
  double p[] = {0.3, 0.4};
  EXPECT_NEAR(curvature_at(load_config("builtin:hyperbolic2").metric, p).scalar, -2.0, 1e-12);
  EXPECT_THROW(load_config("builtin:klein"), InvalidInput);
  EXPECT_THROW(load_config("builtin:euclidean:x"), InvalidInput);
}

TEST(Config, Errors) {
  Json coords = Json::array({Json{{"name", "x1"}, {"interval", {-1, 1}}}, Json{{"name", "x2"}, {"interval", {0.5, 2}}}});
  EXPECT_EQ(invalid_message(Json{{"coordinates", coords}}), "/metric: required");
  const std::string parse = invalid_message(Json{{"coordinates", coords}, {"metric", {"1", "0", "1/(x2"}}});
  EXPECT_EQ(parse.rfind("/metric/2: ", 0), 0u) << parse;
  EXPECT_NE(parse.find("offset"), std::string::npos) << parse;
  EXPECT_EQ(invalid_message(Json{{"coordinates", coords}, {"metric", {"1", "0", "1"}}, {"extra", 1}}),
            "/extra: unknown key");
  EXPECT_EQ(invalid_message(Json{{"builtin", "euclidean:2"}, {"metric", {"1"}}}), "/metric: unknown key");
  EXPECT_NE(invalid_message(Json{{"coordinates", coords}, {"metric", {"1", "0", "-1"}}}), "");
  EXPECT_NE(invalid_message(Json{{"coordinates", coords}, {"metric", {"1", "0", "1"}}, {"fields", {{"w", {"1"}}}}}),
            "");
}

TEST(Config, DigestDependsOnContent) {
  EXPECT_EQ(load_config("builtin:euclidean:3").digest, load_config("builtin:euclidean:3").digest);
  EXPECT_NE(load_config("builtin:euclidean:3").digest, load_config("builtin:euclidean:2").digest);
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Config, FieldLookup) {
  auto cfg = parse_config(Json{{"builtin", "euclidean:2"}, {"fields", {{"rot", {"-x2", "x1"}}}}});
  EXPECT_EQ(cfg.field("rot").dim(), 2);
  EXPECT_EQ(cfg.field("position").dim(), 2);
  EXPECT_THROW(cfg.field("w_top"), InvalidInput);
  EXPECT_THROW(cfg.field("nope"), InvalidInput);
}

TEST(Dispatch, FlagshipSoliton) {
  Options opt;
  opt.field = "position";
  opt.lambda = 4.0;
  auto rep = run("soliton-check", "builtin:euclidean:3", opt);
  ASSERT_EQ(rep.checks.size(), 1u);
  EXPECT_LE(rep.checks[0].max_residual, 1e-10);
  EXPECT_EQ(rep.exit_code(), 0);
  opt.lambda = 5.0;
  rep = run("soliton-check", "builtin:euclidean:3", opt);
  EXPECT_EQ(rep.exit_code(), 1);
  EXPECT_NEAR(rep.checks[0].max_residual, 1.0, 1e-12);
}

TEST(Dispatch, SphereIdentities) {
  Options opt;
  opt.lambda = 1.0;
  auto rep = run("identities", "builtin:sphere:2:1.0", opt);
  EXPECT_EQ(rep.exit_code(), 0);
  bool saw_printed = false;
  for (const auto& c : rep.checks) {
    if (c.name == "norm identity") EXPECT_TRUE(c.passed());
    if (c.name == "norm identity without factor n") {
      saw_printed = true;
      EXPECT_EQ(c.status, CheckStatus::Info);
      EXPECT_NEAR(c.max_residual, 1.0, 1e-8);
    }
  }
  EXPECT_TRUE(saw_printed);
}

TEST(Dispatch, MissingPieces) {
  EXPECT_THROW(run("soliton-check", "builtin:euclidean:2"), InvalidInput);
  EXPECT_THROW(run("hypersurface", "builtin:euclidean:2"), InvalidInput);
  EXPECT_THROW(run("warped", "builtin:euclidean:2"), InvalidInput);
  EXPECT_THROW(run("nope", "builtin:euclidean:2"), InvalidInput);
  Options opt;
  opt.points = 0;
  EXPECT_THROW(run("curvature", "builtin:euclidean:2", opt), InvalidInput);
}

TEST(Dispatch, NonEinsteinFlowIsSkipped) {
  auto rep = run("flow", "builtin:graph:x^2+y^3");
  ASSERT_EQ(rep.checks.size(), 1u);
  EXPECT_EQ(rep.checks[0].status, CheckStatus::Skip);
  EXPECT_EQ(rep.exit_code(), 0);
}

TEST(Report, EmptyReport) {
  Report r;
  r.command = "curvature";
  EXPECT_NE(render_text(r).find("no checks\n"), std::string::npos);
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_EQ(to_json(r)["checks"].size(), 0u);
}

TEST(Report, FailingRowFlagged) {
  Report r;
  auto c = CheckReport::begin("x", "soliton-equation", 1e-8);
  c.add(1.0);
  r.checks.push_back(c.finalize());
  EXPECT_EQ(r.exit_code(), 1);
  EXPECT_NE(render_text(r).find("FAIL"), std::string::npos);
  EXPECT_EQ(to_json(r)["checks"][0]["status"], "fail");
}

TEST(Report, JsonKeyOrder) {
  auto j = to_json(run("curvature", "builtin:euclidean:2"));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  std::vector<std::string> want{"command", "argv",      "manifold", "config_digest", "engine_version", "seed",
                                "points",  "tolerance", "checks",   "summary",       "extra"};
  EXPECT_EQ(keys, want);
  EXPECT_FALSE(j.contains("wall_time"));
}

TEST(Binary, DeterministicJson) {
  const std::string args = "identities --manifold builtin:sphere:2:1.0 --lambda 1 --points 20 --seed 3 --json";
  Proc a = exec(args), b = exec(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_FALSE(a.out.empty());
  EXPECT_EQ(a.out, b.out);
  Proc c = exec("identities --manifold builtin:sphere:2:1.0 --lambda 1 --points 20 --seed 4 --json");
  EXPECT_NE(a.out, c.out);
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(exec("soliton-check --manifold builtin:euclidean:3 --field position --mu 0 --lambda 4").code, 0);
  EXPECT_EQ(exec("soliton-check --manifold builtin:euclidean:3 --field position --lambda 5").code, 1);
  EXPECT_EQ(exec("frobnicate --manifold builtin:euclidean:3").code, 2);
  EXPECT_EQ(exec("curvature --manifold builtin:nowhere").code, 2);
  EXPECT_EQ(exec("curvature --manifold /nonexistent/config.json").code, 2);
  EXPECT_EQ(exec("curvature").code, 2);
  EXPECT_EQ(exec("curvature --manifold builtin:euclidean:2 --points abc").code, 2);
}
