#include "config.hpp"

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include "solgeom/error.hpp"

namespace solgeom::cli {
namespace {

[[noreturn]] void fail(const std::string& ptr, const std::string& msg) {
  throw InvalidInput((ptr.empty() ? "/" : ptr) + ": " + msg);
}

void allow_keys(const Json& j, const std::string& ptr, std::initializer_list<const char*> keys) {
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) fail(ptr + "/" + k, "unknown key");
}

Expr parse_at(const Json& j, const std::string& ptr, const ExprScope& scope) {
  std::string src;
  if (j.is_string()) {
    src = j.get<std::string>();
  } else if (j.is_number()) {
    src = j.dump();
  } else {
    fail(ptr, "expected an expression string");
  }
  try {
    return parse_expression(src, scope);
  } catch (const ParseError& e) {
    fail(ptr, e.what());
  }
}

double number_at(const Json& j, const std::string& ptr, const std::map<std::string, double>& constants) {
  if (j.is_number()) return j.get<double>();
  Expr e = parse_at(j, ptr, ExprScope{1, {}, constants});
  if (e.coordinate_span() > 0) fail(ptr, "must not depend on coordinates");
  try {
    return e.evaluate(std::span<const double>{});
  } catch (const DomainError& err) {
    fail(ptr, err.what());
  }
}

int int_at(const Json& j, const std::string& ptr) {
  if (!j.is_number_integer()) fail(ptr, "expected an integer");
  return j.get<int>();
}

std::map<std::string, double> parse_constants(const Json& j, const std::string& ptr) {
  std::map<std::string, double> out;
  if (j.is_null()) return out;
  if (!j.is_object()) fail(ptr, "expected an object of numbers");
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) fail(ptr + "/" + k, "expected a number");
    out[k] = v.get<double>();
  }
  return out;
}

Chart parse_chart(const Json& j, const std::string& ptr, const std::map<std::string, double>& constants) {
  if (!j.is_array() || j.empty()) fail(ptr, "expected a nonempty array");
  std::vector<std::string> names;
  std::vector<Interval> domain;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = ptr + "/" + std::to_string(i);
    const Json& c = j[i];
    if (!c.is_object()) fail(p, "expected an object");
    allow_keys(c, p, {"name", "interval", "periodic"});
    std::string name = "x" + std::to_string(i + 1);
    if (c.contains("name")) {
      if (!c["name"].is_string()) fail(p + "/name", "expected a string");
      name = c["name"].get<std::string>();
    }
    if (!seen.insert(name).second) fail(p + "/name", "duplicate coordinate name '" + name + "'");
    if (!c.contains("interval")) fail(p + "/interval", "required");
    const Json& iv = c["interval"];
    if (!iv.is_array() || iv.size() != 2) fail(p + "/interval", "expected [lo, hi]");
    const double lo = number_at(iv[0], p + "/interval/0", constants);
    const double hi = number_at(iv[1], p + "/interval/1", constants);
    if (!(lo < hi)) fail(p + "/interval", "lo must be below hi");
    bool periodic = false;
    if (c.contains("periodic")) {
      if (!c["periodic"].is_boolean()) fail(p + "/periodic", "expected a boolean");
      periodic = c["periodic"].get<bool>();
    }
    names.push_back(name);
    domain.push_back({lo, hi, periodic});
  }
  return Chart(names, domain);
}

std::vector<Expr> parse_list(const Json& j, const std::string& ptr, const ExprScope& scope, std::size_t size) {
  if (!j.is_array()) fail(ptr, "expected an array");
  if (j.size() != size) fail(ptr, "expected " + std::to_string(size) + " entries, got " + std::to_string(j.size()));
  std::vector<Expr> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_at(j[i], ptr + "/" + std::to_string(i), scope));
  return out;
}

std::optional<Signature> parse_signature(const Json& j, const std::string& ptr, int dim) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.size() != 2) fail(ptr, "expected [positive, negative]");
  Signature s{int_at(j[0], ptr + "/0"), int_at(j[1], ptr + "/1")};
  if (s.positive < 0 || s.negative < 0 || s.positive + s.negative != dim)
    fail(ptr, "counts must be nonnegative and add up to " + std::to_string(dim));
  return s;
}

void verify_metric(const MetricField& g, const std::string& ptr) {
  try {
    g.verify(sample_points(g.chart(), 16, 0));
    g.verify_periodicity();
  } catch (const Error& e) {
    fail(ptr, e.what());
  }
}

struct Named {
  std::map<std::string, VectorField> fields;
  std::map<std::string, ScalarField> scalars;
};

Named parse_named(const Json& j, const std::string& ptr, const ExprScope& scope) {
  Named out;
  if (j.contains("fields")) {
    const Json& f = j["fields"];
    if (!f.is_object()) fail(ptr + "/fields", "expected an object");
    for (const auto& [k, v] : f.items()) {
      if (k == "zero" || k == "position" || k == "w_top") fail(ptr + "/fields/" + k, "reserved field name");
      out.fields.emplace(k, VectorField::from_exprs(parse_list(v, ptr + "/fields/" + k, scope,
                                                               static_cast<std::size_t>(scope.dim))));
    }
  }
  if (j.contains("scalars")) {
    const Json& s = j["scalars"];
    if (!s.is_object()) fail(ptr + "/scalars", "expected an object");
    for (const auto& [k, v] : s.items())
      out.scalars.emplace(k, ScalarField::from_expr(parse_at(v, ptr + "/scalars/" + k, scope)));
  }
  return out;
}

Json coords(const std::vector<std::string>& names, const std::vector<Json>& intervals,
            const std::vector<bool>& periodic) {
  Json c = Json::array();
  for (std::size_t i = 0; i < names.size(); ++i) {
    Json e;
    e["name"] = names[i];
    e["interval"] = intervals[i];
    if (periodic[i]) e["periodic"] = true;
    c.push_back(e);
  }
  return c;
}

Json flat_metric(int n, int negative = 0) {
  Json m = Json::array();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.push_back(i == j ? (i < negative ? "-1" : "1") : "0");
  return m;
}

int builtin_dim(const std::string& s, const std::string& ptr) {
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    fail(ptr, "expected an integer dimension, got '" + s + "'");
  }
  if (n < 1 || n > 8) fail(ptr, "dimension must be between 1 and 8");
  return n;
}

std::vector<std::string> split(const std::string& s, char sep, std::size_t max_parts) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (out.size() + 1 < max_parts) {
    const auto pos = s.find(sep, start);
    if (pos == std::string::npos) break;
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  out.push_back(s.substr(start));
  return out;
}

ManifoldConfig parse_object(const Json& in, const std::string& ptr);

WarpedConfig parse_warped(const Json& w, const std::string& ptr) {
  if (!w.is_object()) fail(ptr, "expected an object");
  allow_keys(w, ptr, {"base", "fiber", "warping", "base_field", "fiber_field"});
  for (const char* k : {"base", "fiber", "warping"})
    if (!w.contains(k)) fail(ptr + "/" + k, "required");
  ManifoldConfig base = parse_object(w["base"], ptr + "/base");
  ManifoldConfig fiber = parse_object(w["fiber"], ptr + "/fiber");
  ScalarField f = ScalarField::from_expr(parse_at(w["warping"], ptr + "/warping", base.chart().scope(base.constants)));
  WarpedProduct wp = [&] {
    try {
      return assemble(base.metric, fiber.metric, f);
    } catch (const InvalidInput& e) {
      fail(ptr, e.what());
    } catch (const DomainError& e) {
      fail(ptr + "/warping", e.what());
    }
  }();
  ExprScope scope = wp.chart().scope();
  auto field = [&](const char* key, int dim) {
    if (!w.contains(key)) return VectorField::zero(dim);
    return VectorField::from_exprs(parse_list(w[key], ptr + "/" + key, scope, static_cast<std::size_t>(dim)));
  };
  WarpedConfig out{wp, field("base_field", wp.base_dim()), field("fiber_field", wp.fiber_dim())};
  try {
    verify_split(wp, out.base_field, out.fiber_field, sample_points(wp.chart(), 8, 0));
  } catch (const InvalidInput& e) {
    fail(ptr, e.what());
  }
  return out;
}

ManifoldConfig parse_object(const Json& in, const std::string& ptr) {
  if (!in.is_object()) fail(ptr, "expected an object");
  Json j = in;
  if (j.contains("builtin")) {
    allow_keys(j, ptr, {"builtin", "name", "fields", "scalars", "constants"});
    if (!j["builtin"].is_string()) fail(ptr + "/builtin", "expected a string");
    Json expanded = expand_builtin(j["builtin"].get<std::string>(), ptr + "/builtin");
    for (const auto& [k, v] : j.items()) {
      if (k == "builtin") continue;
      if (k == "constants" && expanded.contains("constants")) {
        for (const auto& [ck, cv] : v.items()) expanded["constants"][ck] = cv;
      } else {
        expanded[k] = v;
      }
    }
    j = std::move(expanded);
  }
  allow_keys(j, ptr, {"name", "dim", "coordinates", "signature", "metric", "constants", "fields", "scalars", "closed",
                      "immersion", "warped"});
  const auto constants = parse_constants(j.contains("constants") ? j["constants"] : Json(), ptr + "/constants");
  std::string name = "manifold";
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail(ptr + "/name", "expected a string");
    name = j["name"].get<std::string>();
  }

  if (j.contains("warped")) {
    for (const char* k : {"coordinates", "metric", "immersion", "signature", "closed", "dim"})
      if (j.contains(k)) fail(ptr + "/" + k, "not allowed with warped (the product chart is assembled)");
    WarpedConfig w = parse_warped(j["warped"], ptr + "/warped");
    ExprScope scope = w.product.chart().scope(constants);
    Named named = parse_named(j, ptr, scope);
    ManifoldConfig cfg{name, w.product.metric, std::move(named.fields), std::move(named.scalars), constants,
                       std::nullopt, std::move(w), j, ""};
    return cfg;
  }

  if (!j.contains("coordinates")) fail(ptr + "/coordinates", "required");
  Chart chart = parse_chart(j["coordinates"], ptr + "/coordinates", constants);
  const int n = chart.dim();
  if (j.contains("dim") && int_at(j["dim"], ptr + "/dim") != n)
    fail(ptr + "/dim", "does not match the " + std::to_string(n) + " coordinates");
  if (j.contains("closed")) {
    if (!j["closed"].is_boolean()) fail(ptr + "/closed", "expected a boolean");
    chart.declare_closed(j["closed"].get<bool>());
  }
  const auto sig = parse_signature(j.contains("signature") ? j["signature"] : Json(), ptr + "/signature", n);
  ExprScope scope = chart.scope(constants);

  std::optional<Immersion> imm;
  std::optional<MetricField> metric;
  if (j.contains("immersion")) {
    if (j.contains("metric")) fail(ptr + "/metric", "not allowed with immersion (the metric is induced)");
    const Json& im = j["immersion"];
    const std::string ip = ptr + "/immersion";
    if (!im.is_object()) fail(ip, "expected an object");
    allow_keys(im, ip, {"components", "ambient"});
    if (!im.contains("components")) fail(ip + "/components", "required");
    const Json& comps = im["components"];
    if (!comps.is_array()) fail(ip + "/components", "expected an array");
    std::vector<Expr> x = parse_list(comps, ip + "/components", scope, comps.size());
    std::vector<double> ambient;
    if (im.contains("ambient")) {
      if (!im["ambient"].is_array()) fail(ip + "/ambient", "expected an array");
      for (std::size_t i = 0; i < im["ambient"].size(); ++i) {
        if (!im["ambient"][i].is_number()) fail(ip + "/ambient/" + std::to_string(i), "expected +1 or -1");
        ambient.push_back(im["ambient"][i].get<double>());
      }
    }
    try {
      imm = make_immersion(chart, std::move(x), std::move(ambient), sig);
      for (const auto& p : sample_points(chart, 16, 0).points) immerse(*imm, p);
    } catch (const Error& e) {
      fail(ip, e.what());
    }
    metric = induced_metric(*imm);
  } else {
    if (!j.contains("metric")) fail(ptr + "/metric", "required");
    auto upper = parse_list(j["metric"], ptr + "/metric", scope, static_cast<std::size_t>(n * (n + 1) / 2));
    metric = MetricField(chart, SymTensorField::from_upper(n, std::move(upper)), sig.value_or(Signature{n, 0}));
  }
  verify_metric(*metric, ptr + (imm ? "/immersion" : "/metric"));
  Named named = parse_named(j, ptr, scope);
  return ManifoldConfig{name, *metric, std::move(named.fields), std::move(named.scalars), constants,
                        std::move(imm), std::nullopt, j, ""};
}

}  // namespace

Json expand_builtin(const std::string& source, const std::string& ptr) {
  auto parts = split(source, ':', 3);
  const std::string& kind = parts[0];
  Json j;
  j["name"] = source;
  if (kind == "euclidean" || kind == "minkowski" || kind == "torus") {
    if (parts.size() != 2) fail(ptr, kind + " takes one argument: " + kind + ":n");
    const int n = builtin_dim(parts[1], ptr);
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
    const bool torus = kind == "torus";
    std::vector<Json> iv(static_cast<std::size_t>(n), torus ? Json::array({0, "2*pi"}) : Json::array({-2, 2}));
    j["coordinates"] = coords(names, iv, std::vector<bool>(static_cast<std::size_t>(n), torus));
    if (kind == "minkowski") {
      if (n < 2) fail(ptr, "minkowski needs n >= 2");
      j["signature"] = Json::array({n - 1, 1});
      j["metric"] = flat_metric(n, 1);
    } else {
      j["metric"] = flat_metric(n);
    }
  } else if (kind == "sphere") {
    if (parts.size() != 3) fail(ptr, "sphere takes two arguments: sphere:n:radius");
    const int n = builtin_dim(parts[1], ptr);
    if (n < 2) fail(ptr, "sphere needs n >= 2");
    double rho = 0.0;
    try {
      std::size_t used = 0;
      rho = std::stod(parts[2], &used);
      if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
    } catch (const std::exception&) {
      fail(ptr, "expected a radius, got '" + parts[2] + "'");
    }
    if (!(rho > 0)) fail(ptr, "radius must be positive");
    std::vector<std::string> names;
    std::vector<Json> iv;
    std::vector<bool> periodic;
    for (int i = 0; i < n - 1; ++i) {
      names.push_back("t" + std::to_string(i + 1));
      iv.push_back(Json::array({0, "pi"}));
      periodic.push_back(false);
    }
    names.push_back("phi");
    iv.push_back(Json::array({0, "2*pi"}));
    periodic.push_back(true);
    j["coordinates"] = coords(names, iv, periodic);
    j["constants"] = Json{{"rho", rho}};
    Json m = Json::array();
    std::string warp = "rho^2";
    for (int i = 0; i < n; ++i) {
      for (int k = i; k < n; ++k) m.push_back(i == k ? warp : "0");
      if (i < n - 1) warp += "*sin(" + names[static_cast<std::size_t>(i)] + ")^2";
    }
    j["metric"] = m;
    j["closed"] = true;
  } else if (kind == "hyperbolic2") {
    if (parts.size() != 1) fail(ptr, "hyperbolic2 takes no arguments");
    j["coordinates"] = coords({"x1", "x2"}, {Json::array({-2, 2}), Json::array({0.5, 3})}, {false, false});
    j["metric"] = Json::array({"1/x2^2", "0", "1/x2^2"});
  } else if (kind == "cylinder") {
    if (parts.size() != 1) fail(ptr, "cylinder takes no arguments");
    j["coordinates"] = coords({"u", "v"}, {Json::array({0, "2*pi"}), Json::array({-2, 2})}, {true, false});
    j["immersion"] = Json{{"components", Json::array({"cos(u)", "sin(u)", "v"})}};
  } else if (kind == "graph") {
    if (parts.size() < 2) fail(ptr, "graph takes an expression: graph:expr");
    const std::string expr = source.substr(source.find(':') + 1);
    j["coordinates"] = coords({"x", "y"}, {Json::array({-1, 1}), Json::array({-1, 1})}, {false, false});
    j["immersion"] = Json{{"components", Json::array({"x", "y", expr})}};
  } else {
    fail(ptr, "unknown builtin '" + source +
                  "' (known: euclidean:n, minkowski:n, sphere:n:radius, hyperbolic2, torus:n, cylinder, graph:expr)");
  }
  return j;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

ManifoldConfig parse_config(const Json& j) {
  ManifoldConfig cfg = parse_object(j, "");
  cfg.digest = fnv1a_hex(cfg.canonical.dump());
  return cfg;
}

ManifoldConfig load_config(const std::string& source) {
  if (source.rfind("builtin:", 0) == 0) return parse_config(Json{{"builtin", source.substr(8)}});
  std::ifstream in(source, std::ios::binary);
  if (!in) throw InvalidInput("cannot read config file '" + source + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput("config file '" + source + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

VectorField ManifoldConfig::field(const std::string& name) const {
  if (auto it = fields.find(name); it != fields.end()) return it->second;
  if (name == "zero") return VectorField::zero(dim());
  if (name == "position") return VectorField::position(dim());
  if (name == "w_top") {
    if (!immersion) throw InvalidInput("--field: w_top needs an immersion config");
    return tangential_position_field(*immersion);
  }
  std::string known = "zero, position";
  if (immersion) known += ", w_top";
  for (const auto& [k, v] : fields) known += ", " + k;
  throw InvalidInput("--field: unknown field '" + name + "' (available: " + known + ")");
}

}  // namespace solgeom::cli
