#include "bhscat/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bhscat {

using nlohmann::json;

namespace {

Point parse_point(const json& j, int dim, const char* field) {
  if (!j.is_array() || int(j.size()) != dim)
    throw ConfigError(std::string(field) + ": expected an array of " + std::to_string(dim) +
                      " coordinates");
  Point p;
  p.x = j[0].get<double>();
  p.y = j[1].get<double>();
  if (dim == 3) p.z = j[2].get<double>();
  return p;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }

  ExperimentConfig c;
  c.dim = j.value("dim", 2);
  if (c.dim != 2 && c.dim != 3) throw ConfigError("dim: must be 2 or 3");
  c.order_m = j.value("order_m", 1.5);
  c.sigma = j.value("sigma", 0.0);

  if (!j.contains("domain")) throw ConfigError("domain: missing");
  c.domain.dim = c.dim;
  c.domain.lo = parse_point(j["domain"]["lo"], c.dim, "domain.lo");
  c.domain.hi = parse_point(j["domain"]["hi"], c.dim, "domain.hi");

  if (j.contains("strength"))
    for (const auto& jb : j["strength"]["bumps"]) {
      Bump b;
      b.center = parse_point(jb["center"], c.dim, "strength.bumps.center");
      b.radius = jb["radius"].get<double>();
      b.amplitude = jb["amplitude"].get<double>();
      b.core = jb.value("core", 0.0);
      c.bumps.push_back(b);
    }

  if (j.contains("measurement")) {
    const auto& m = j["measurement"];
    c.meas_center = parse_point(m["center"], c.dim, "measurement.center");
    c.meas_radius = m["radius"].get<double>();
    c.meas_count = m["count"].get<int>();
  }

  if (j.contains("field_grid")) {
    c.margin = j["field_grid"].value("margin", c.margin);
    c.solver_nodes = j["field_grid"].value("solver_nodes", c.solver_nodes);
  }

  if (j.contains("band")) {
    const auto& b = j["band"];
    const std::string space = b.value("space", "kappa");
    if (space != "kappa" && space != "k") throw ConfigError("band.space: must be 'kappa' or 'k'");
    c.band.kappa_space = space == "kappa";
    c.band.lo = b["lo"].get<double>();
    c.band.hi = b["hi"].get<double>();
    c.band.per_decade = b.value("per_decade", 64);
    c.band.dk = b.value("dk", 0.5);
  }

  c.ensemble = j.value("ensemble", 1);
  c.seed = j.value("seed", std::uint64_t(1));

  if (j.contains("solver")) {
    const auto& s = j["solver"];
    const std::string method = s.value("method", "fast");
    if (method == "fast")
      c.solver.method = SolverOptions::Method::fast_iterative;
    else if (method == "dense")
      c.solver.method = SolverOptions::Method::dense_lu;
    else
      throw ConfigError("solver.method: must be 'fast' or 'dense'");
    c.solver.tol = s.value("tol", 1e-12);
    c.solver.max_iter = s.value("max_iter", 400);
    c.solver.diagnostics = s.value("diagnostics", false);
  }

  if (j.contains("inversion")) {
    const auto& inv = j["inversion"];
    c.recon_n = inv.value("grid_n", 32);
    const std::string mode = inv.value("lambda_mode", "discrepancy");
    if (mode == "discrepancy")
      c.lambda_discrepancy = true;
    else if (mode == "fixed")
      c.lambda_discrepancy = false;
    else
      throw ConfigError("inversion.lambda_mode: must be 'discrepancy' or 'fixed'");
    c.lambda_value = inv.value("lambda", 1e-6);
    c.noise_estimate = inv.value("noise", 0.0);
  }

  c.threads = j.value("threads", 0);
  c.out_dir = j.value("out_dir", std::string("out"));

  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_json(const ExperimentConfig& c) {
  json j;
  j["dim"] = c.dim;
  j["order_m"] = c.order_m;
  j["sigma"] = c.sigma;
  auto pt = [&](const Point& p) {
    return c.dim == 3 ? json::array({p.x, p.y, p.z}) : json::array({p.x, p.y});
  };
  j["domain"] = {{"lo", pt(c.domain.lo)}, {"hi", pt(c.domain.hi)}};
  json bumps = json::array();
  for (const auto& b : c.bumps)
    bumps.push_back({{"center", pt(b.center)},
                     {"radius", b.radius},
                     {"amplitude", b.amplitude},
                     {"core", b.core}});
  j["strength"] = {{"bumps", bumps}};
  j["measurement"] = {{"center", pt(c.meas_center)},
                      {"radius", c.meas_radius},
                      {"count", c.meas_count}};
  j["field_grid"] = {{"margin", c.margin}, {"solver_nodes", c.solver_nodes}};
  j["band"] = {{"space", c.band.kappa_space ? "kappa" : "k"},
               {"lo", c.band.lo},
               {"hi", c.band.hi},
               {"per_decade", c.band.per_decade},
               {"dk", c.band.dk}};
  j["ensemble"] = c.ensemble;
  j["seed"] = c.seed;
  j["solver"] = {{"method", c.solver.method == SolverOptions::Method::fast_iterative ? "fast"
                                                                                     : "dense"},
                 {"tol", c.solver.tol},
                 {"max_iter", c.solver.max_iter},
                 {"diagnostics", c.solver.diagnostics}};
  j["inversion"] = {{"grid_n", c.recon_n},
                    {"lambda_mode", c.lambda_discrepancy ? "discrepancy" : "fixed"},
                    {"lambda", c.lambda_value},
                    {"noise", c.noise_estimate}};
  j["threads"] = c.threads;
  j["out_dir"] = c.out_dir;
  return j.dump(2);
}

void validate_config(const ExperimentConfig& c) {
  const int d = c.dim;
  if (!(c.order_m > d - 1 && c.order_m <= d))
    throw ConfigError("order_m: must lie in (d-1, d] = (" + std::to_string(d - 1) + ", " +
                      std::to_string(d) + "] for dim " + std::to_string(d));
  if (c.sigma < 0.0) throw ConfigError("sigma: must be >= 0");
  if (!(c.domain.hi.x > c.domain.lo.x && c.domain.hi.y > c.domain.lo.y))
    throw ConfigError("domain: hi must exceed lo componentwise");
  if (d == 3 && !(c.domain.hi.z > c.domain.lo.z))
    throw ConfigError("domain: hi must exceed lo componentwise");
  if (c.meas_count < 1) throw ConfigError("measurement.count: must be >= 1");
  if (c.ensemble < 1) throw ConfigError("ensemble: must be >= 1");
  if (c.solver_nodes < 1) throw ConfigError("field_grid.solver_nodes: must be >= 1");
  if (c.recon_n < 1) throw ConfigError("inversion.grid_n: must be >= 1");
  if (!(c.margin >= 0.5 * c.domain.diameter()))
    throw ConfigError("field_grid.margin: must be >= diam(D)/2 (periodic wraparound guard)");

  // dist(U, D) > 0: every measurement point strictly outside D.
  for (const Point& p : measurement_points(c))
    if (c.domain.dist(p) <= 0.0)
      throw ConfigError("measurement: geometry intersects D; points must have positive "
                        "distance to the support");
}

StrengthProfile strength_from_config(const ExperimentConfig& c) {
  return StrengthProfile(c.dim, c.domain, c.bumps);
}

GridSpec field_grid_from_config(const ExperimentConfig& c) {
  const double side = std::max({c.domain.hi.x - c.domain.lo.x, c.domain.hi.y - c.domain.lo.y,
                                c.dim == 3 ? c.domain.hi.z - c.domain.lo.z : 0.0});
  const double h = side / c.solver_nodes;
  const int margin_cells = int(std::ceil(c.margin / h - 1e-9));
  GridSpec g;
  g.dim = c.dim;
  g.h = h;
  g.origin = Point{c.domain.lo.x - margin_cells * h, c.domain.lo.y - margin_cells * h,
                   c.dim == 3 ? c.domain.lo.z - margin_cells * h : 0.0};
  const int n = c.solver_nodes + 2 * margin_cells;
  g.n = {n, n, c.dim == 3 ? n : 1};
  return g;
}

std::vector<Point> measurement_points(const ExperimentConfig& c) {
  std::vector<Point> pts;
  pts.reserve(c.meas_count);
  if (c.dim == 2) {
    for (int i = 0; i < c.meas_count; ++i) {
      const double th = 2.0 * pi * i / c.meas_count;
      pts.push_back(Point{c.meas_center.x + c.meas_radius * std::cos(th),
                          c.meas_center.y + c.meas_radius * std::sin(th), 0.0});
    }
  } else {
    // Fibonacci sphere.
    const double ga = pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < c.meas_count; ++i) {
      const double zf = c.meas_count == 1 ? 0.0 : 1.0 - 2.0 * i / double(c.meas_count - 1);
      const double rf = std::sqrt(std::max(0.0, 1.0 - zf * zf));
      const double th = ga * i;
      pts.push_back(Point{c.meas_center.x + c.meas_radius * rf * std::cos(th),
                          c.meas_center.y + c.meas_radius * rf * std::sin(th),
                          c.meas_center.z + c.meas_radius * zf});
    }
  }
  return pts;
}

int resolve_threads(const ExperimentConfig& c) {
  return c.threads >= 1 ? c.threads : default_thread_count();
}

}  // namespace bhscat
