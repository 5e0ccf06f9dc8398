#include "report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace solgeom::cli {

int Report::count(CheckStatus s) const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [&](const CheckReport& c) { return c.status == s; }));
}

int Report::exit_code() const { return count(CheckStatus::Fail) > 0 ? 1 : 0; }

namespace {

Json check_json(const CheckReport& c) {
  Json j;
  j["name"] = c.name;
  j["anchor"] = c.anchor;
  j["status"] = std::string(to_string(c.status));
  j["max_residual"] = c.max_residual;
  j["mean_residual"] = c.mean_residual;
  j["tolerance"] = c.tolerance;
  j["notes"] = c.notes;
  if (c.integral) j["integral"] = *c.integral;
  if (c.resolution) j["resolution"] = *c.resolution;
  if (!c.values.empty()) {
    Json v = Json::object();
    for (const auto& [k, x] : c.values) v[k] = x;
    j["values"] = v;
  }
  return j;
}

// %.6e keeps the columns narrow; the JSON form carries full precision.
std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", x);
  return buf;
}

}  // namespace

Json to_json(const Report& r) {
  Json j;
  j["command"] = r.command;
  j["argv"] = r.argv;
  j["manifold"] = r.manifold;
  j["config_digest"] = r.config_digest;
  j["engine_version"] = kEngineVersion;
  j["seed"] = r.seed;
  j["points"] = r.points;
  j["tolerance"] = r.tolerance;
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(check_json(c));
  j["checks"] = checks;
  j["summary"] = Json{{"pass", r.count(CheckStatus::Pass)},
                      {"fail", r.count(CheckStatus::Fail)},
                      {"skip", r.count(CheckStatus::Skip)},
                      {"info", r.count(CheckStatus::Info)}};
  if (!r.extra.empty()) j["extra"] = r.extra;
  if (r.wall_time) j["wall_time"] = *r.wall_time;
  return j;
}

std::string render_json(const Report& r) { return to_json(r).dump(2) + "\n"; }

std::string render_text(const Report& r) {
  std::ostringstream os;
  os << "solgeom " << kEngineVersion << "  " << r.command << "  manifold " << r.manifold << "  digest "
     << r.config_digest << "\n";
  os << "seed " << r.seed << "  points " << r.points << "  tol " << sci(r.tolerance) << "\n";
  if (r.checks.empty()) {
    os << "no checks\n";
  } else {
    std::size_t wname = 5, wanchor = 6;
    for (const auto& c : r.checks) {
      wname = std::max(wname, c.name.size());
      wanchor = std::max(wanchor, c.anchor.size());
    }
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - std::min(w, s.size()), ' '); };
    os << pad("check", wname) << "  " << pad("anchor", wanchor) << "  status  " << pad("max_resid", 13) << "  "
       << pad("tolerance", 13) << "  notes\n";
    for (const auto& c : r.checks) {
      std::string status(to_string(c.status));
      if (c.failed()) status = "FAIL";
      os << pad(c.name, wname) << "  " << pad(c.anchor, wanchor) << "  " << pad(status, 6) << "  "
         << pad(sci(c.max_residual), 13) << "  " << pad(sci(c.tolerance), 13) << "  " << c.notes;
      if (c.integral) os << (c.notes.empty() ? "" : "; ") << "integral " << sci(*c.integral);
      os << "\n";
    }
  }
  if (!r.extra.empty()) os << "extra " << r.extra.dump() << "\n";
  os << "summary: " << r.count(CheckStatus::Pass) << " pass, " << r.count(CheckStatus::Fail) << " fail, "
     << r.count(CheckStatus::Skip) << " skip, " << r.count(CheckStatus::Info) << " info\n";
  if (r.wall_time) os << "wall time " << sci(*r.wall_time) << " s\n";
  return os.str();
}

}  // namespace solgeom::cli
