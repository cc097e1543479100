#include "fvclaw/apps.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "fvclaw/wenogen.hpp"

#ifndef FVCLAW_DATA_DIR
#define FVCLAW_DATA_DIR "data"
#endif

namespace fvclaw {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int pick(int requested, int fallback) { return requested > 0 ? requested : fallback; }

bool periodic_requested(const ParamMap& params, const std::string& fallback) {
  const std::string bc = params.text("bc", fallback);
  if (bc != "periodic" && bc != "wall" && bc != "outflow")
    throw Error("bc must be one of periodic|wall|outflow (got '" + bc + "')");
  return bc == "periodic";
}

}  // namespace

ParamMap ParamMap::parse(const std::string& text, const std::string& origin) {
  ParamMap p;
  p.origin_ = origin;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw Error(origin + ":" + std::to_string(lineno) + ": empty key or value");
    p.values_[key] = value;
  }
  return p;
}

ParamMap ParamMap::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open parameter file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str(), path);
}

double ParamMap::number(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(origin_ + ": missing parameter '" + key + "'");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(it->second, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != it->second.size())
    throw Error(origin_ + ": parameter '" + key + "' is not a number: " + it->second);
  return v;
}

double ParamMap::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::string ParamMap::text(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double bubble_fraction(double xlo, double xhi, double ylo, double yhi, double cx, double cy,
                       double radius, double tol) {
  if (!(tol > 0.0)) throw Error("bubble_fraction tolerance must be positive");
  if (!(radius > 0.0)) return 0.0;
  const double r2 = radius * radius;
  const double min_diag = tol * radius;
  // Returns the covered area of one rectangle.
  auto area = [&](auto&& self, double x0, double x1, double y0, double y1) -> double {
    const double nx = std::clamp(cx, x0, x1) - cx, ny = std::clamp(cy, y0, y1) - cy;
    if (nx * nx + ny * ny >= r2) return 0.0;
    const double fx = std::max(std::abs(x0 - cx), std::abs(x1 - cx));
    const double fy = std::max(std::abs(y0 - cy), std::abs(y1 - cy));
    const double a = (x1 - x0) * (y1 - y0);
    if (fx * fx + fy * fy <= r2) return a;
    if (std::hypot(x1 - x0, y1 - y0) < min_diag) {
      const double mx = 0.5 * (x0 + x1) - cx, my = 0.5 * (y0 + y1) - cy;
      return mx * mx + my * my < r2 ? a : 0.0;
    }
    const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
    return self(self, x0, xm, y0, ym) + self(self, xm, x1, y0, ym) + self(self, x0, xm, ym, y1) +
           self(self, xm, x1, ym, y1);
  };
  const double total = (xhi - xlo) * (yhi - ylo);
  return std::clamp(area(area, xlo, xhi, ylo, yhi) / total, 0.0, 1.0);
}

std::array<double, 2> checkerboard(double x, double y) {
  const double sx = x - std::floor(x) - 0.5;
  const double sy = y - std::floor(y) - 0.5;
  if (sx * sy < 0.0) return {1.0, 1.0};
  return {5.0, 5.0};
}

double psystem_strain_for_excess_stress(double excess, double bulk) {
  if (!(excess > -1.0)) throw Error("stress below the attainable range of exp(K e) + 1");
  return std::log1p(excess) / bulk;
}

double sine_cell_average(double a, double b) {
  const double w = 2.0 * std::numbers::pi;
  return (std::cos(w * a) - std::cos(w * b)) / (w * (b - a));
}

Problem setup_advection1d(const ParamMap& params, GridSize grid) {
  Problem p;
  const double u = params.number("u", 1.0);
  p.solver = std::make_shared<Advection>(std::vector<double>{u});
  p.domain = {Dimension("x", 0.0, 1.0, pick(grid.mx, 100))};
  p.bc = BoundarySpec::uniform(1, Periodic{});
  p.initial = [](const Cell& c, std::span<double> q) { q[0] = sine_cell_average(c.lower[0], c.upper[0]); };
  return p;
}

Problem setup_acoustics1d(const ParamMap& params, GridSize grid) {
  Problem p;
  const double rho = params.number("rho", 1.0);
  const double bulk = params.number("bulk", 4.0);
  const double beta = params.number("beta", 100.0);
  const double x0 = params.number("x0", 0.5);
  p.solver = std::make_shared<Acoustics>(1, rho, bulk);
  p.domain = {Dimension("x", 0.0, 1.0, pick(grid.mx, 200))};
  p.bc = periodic_requested(params, "wall") ? BoundarySpec::uniform(1, Periodic{})
                                            : BoundarySpec::uniform(1, Wall{{1}});
  p.initial = [beta, x0](const Cell& c, std::span<double> q) {
    const double d = c.center[0] - x0;
    q[0] = std::exp(-beta * d * d);
    q[1] = 0.0;
  };
  return p;
}

Problem setup_acoustics2d(const ParamMap& params, GridSize grid) {
  Problem p;
  const double rho = params.number("rho", 1.0);
  const double bulk = params.number("bulk", 4.0);
  const double beta = params.number("beta", 50.0);
  const double x0 = params.number("x0", -0.2);
  const double y0 = params.number("y0", 0.1);
  p.solver = std::make_shared<Acoustics>(2, rho, bulk);
  p.domain = {Dimension("x", -1.0, 1.0, pick(grid.mx, 100)),
              Dimension("y", -1.0, 1.0, pick(grid.my, 100))};
  if (periodic_requested(params, "wall")) {
    p.bc = BoundarySpec::uniform(2, Periodic{});
  } else {
    p.bc.sides = {{Wall{{1}}, Wall{{1}}}, {Wall{{2}}, Wall{{2}}}};
  }
  p.initial = [beta, x0, y0](const Cell& c, std::span<double> q) {
    const double dx = c.center[0] - x0, dy = c.center[1] - y0;
    q[0] = std::exp(-beta * (dx * dx + dy * dy));
    q[1] = 0.0;
    q[2] = 0.0;
  };
  return p;
}

Problem setup_shallow2d(const ParamMap& params, GridSize grid) {
  Problem p;
  const double g = params.number("g", 1.0);
  const double radius = params.number("radius", 0.5);
  const double h_in = params.number("h_in", 2.0);
  const double h_out = params.number("h_out", 1.0);
  if (!(h_in > 0.0) || !(h_out > 0.0)) throw Error("depths must be positive");
  p.solver = std::make_shared<ShallowWater>(2, g);
  p.domain = {Dimension("x", -2.5, 2.5, pick(grid.mx, 100)),
              Dimension("y", -2.5, 2.5, pick(grid.my, 100))};
  p.bc = periodic_requested(params, "outflow") ? BoundarySpec::uniform(2, Periodic{})
                                               : BoundarySpec::uniform(2, Extrapolation{});
  p.initial = [=](const Cell& c, std::span<double> q) {
    const double r = std::hypot(c.center[0], c.center[1]);
    q[0] = r <= radius ? h_in : h_out;
    q[1] = 0.0;
    q[2] = 0.0;
  };
  return p;
}

namespace {

std::array<double, 4> euler_conserved(double rho, double u, double v, double pres, double gamma) {
  return {rho, rho * u, rho * v, pres / (gamma - 1.0) + 0.5 * rho * (u * u + v * v)};
}

}  // namespace

std::string default_quadrant_params_path() {
  return std::string(FVCLAW_DATA_DIR) + "/euler_quadrant.txt";
}

Problem setup_euler2d_quadrant(const ParamMap& params, GridSize grid) {
  const double gamma = params.number("gamma", 1.4);
  if (!(gamma > 1.0)) throw Error("gamma must exceed 1");
  const double x0 = params.number("x0", 0.5);
  const double y0 = params.number("y0", 0.5);
  std::array<std::array<double, 4>, 4> states{};
  const char* names[4] = {"ur", "ul", "ll", "lr"};
  for (int s = 0; s < 4; ++s) {
    const std::string n = names[s];
    for (const char* f : {".rho", ".u", ".v", ".p"})
      if (!params.has(n + f))
        throw Error("quadrant state '" + n + "' is incomplete: missing " + n + f);
    const double rho = params.number(n + ".rho"), pres = params.number(n + ".p");
    if (!(rho > 0.0) || !(pres > 0.0)) throw Error("quadrant state '" + n + "' must have rho, p > 0");
    states[s] = euler_conserved(rho, params.number(n + ".u"), params.number(n + ".v"), pres, gamma);
  }
  Problem p;
  p.solver = std::make_shared<Euler>(2, gamma);
  p.domain = {Dimension("x", 0.0, 1.0, pick(grid.mx, 100)),
              Dimension("y", 0.0, 1.0, pick(grid.my, 100))};
  p.bc = BoundarySpec::uniform(2, Extrapolation{});
  p.initial = [=](const Cell& c, std::span<double> q) {
    const bool right = c.center[0] >= x0, up = c.center[1] >= y0;
    const int s = up ? (right ? 0 : 1) : (right ? 3 : 2);
    for (int m = 0; m < 4; ++m) q[m] = states[s][m];
  };
  return p;
}

SourceFn axisymmetric_source(double gamma) {
  return [gamma](std::span<const double> q, const Cell& cell, double, std::span<double> out) {
    const double r = cell.center[1];
    const double rho = q[0];
    const double u = q[1] / rho, v = q[2] / rho;
    const double pres = (gamma - 1.0) * (q[3] - 0.5 * rho * (u * u + v * v));
    out[0] = -(rho * v) / r;
    out[1] = -(rho * u * v) / r;
    out[2] = -(rho * v * v) / r;
    out[3] = -((q[3] + pres) * v) / r;
    for (std::size_t m = 4; m < out.size(); ++m) out[m] = 0.0;
  };
}

Problem setup_shockbubble(const ParamMap& params, GridSize grid) {
  const double gamma = params.number("gamma", 1.4);
  if (!(gamma > 1.0)) throw Error("gamma must exceed 1");
  const double x_shock = params.number("x_shock", 0.2);
  const double bx = params.number("bubble_x", 0.5);
  const double by = params.number("bubble_y", 0.0);
  const double br = params.number("bubble_r", 0.2);
  const double rho_bubble = params.number("rho_bubble", 0.1);
  const double rho_post = params.number("rho_post", 2.82);
  const double u_post = params.number("u_post", 1.61);
  const double p_post = params.number("p_post", 5.0);
  const double tol = params.number("bubble_tol", 1e-6);

  Problem p;
  p.solver = std::make_shared<Euler>(2, gamma, /*tracer=*/true);
  p.domain = {Dimension("x", 0.0, 2.0, pick(grid.mx, 320)),
              Dimension("y", 0.0, 0.5, pick(grid.my, 80))};
  const auto post = euler_conserved(rho_post, u_post, 0.0, p_post, gamma);
  Custom inflow{[post](State& s, int dim, Side side) {
    if (dim != 0 || side != Side::Lower) throw Error("inflow is defined on the left side only");
    const int g = s.q.ghost(0), gy = s.q.ghost(1);
    for (int j = -gy; j < s.patch.ny() + gy; ++j)
      for (int i = -g; i < 0; ++i) {
        double* q = s.q.cell(i, j);
        for (int m = 0; m < 4; ++m) q[m] = post[m];
        q[4] = 0.0;
      }
  }};
  p.bc.sides = {{inflow, Extrapolation{}}, {Wall{{2}}, Extrapolation{}}};
  p.initial = [=](const Cell& c, std::span<double> q) {
    if (c.center[0] < x_shock) {
      for (int m = 0; m < 4; ++m) q[m] = post[m];
      q[4] = 0.0;
      return;
    }
    const double f = bubble_fraction(c.lower[0], c.upper[0], c.lower[1], c.upper[1], bx, by, br, tol);
    const double rho = f * rho_bubble + (1.0 - f) * 1.0;
    const auto state = euler_conserved(rho, 0.0, 0.0, 1.0, gamma);
    for (int m = 0; m < 4; ++m) q[m] = state[m];
    q[4] = f;
  };
  p.source = axisymmetric_source(gamma);
  p.source_split = SourceSplit::Godunov;
  return p;
}

Problem setup_psystem(const ParamMap& params, GridSize grid) {
  const double length = params.number("L", 10.0);
  const double amplitude = params.number("amplitude", 5.0);
  const double variance = params.number("variance", 5.0);
  if (!(length > 0.0) || !(variance > 0.0)) throw Error("L and variance must be positive");
  Problem p;
  p.solver = std::make_shared<PSystem>(2);
  p.domain = {Dimension("x", 0.0, length, pick(grid.mx, 240)),
              Dimension("y", 0.0, length, pick(grid.my, 240))};
  p.num_aux = 2;
  p.aux_init = [](const Cell& c, std::span<double> aux) {
    const auto m = checkerboard(c.center[0], c.center[1]);
    aux[0] = m[0];
    aux[1] = m[1];
  };
  p.initial = [=](const Cell& c, std::span<double> q) {
    const double x = c.center[0], y = c.center[1];
    const double excess = amplitude * std::exp(-(x * x + y * y) / (2.0 * variance));
    const double bulk = checkerboard(x, y)[1];
    q[0] = psystem_strain_for_excess_stress(excess, bulk);
    q[1] = 0.0;
    q[2] = 0.0;
  };
  p.bc.sides = {{Wall{{1}}, Extrapolation{}}, {Wall{{2}}, Extrapolation{}}};
  return p;
}

const std::vector<std::string>& app_names() {
  static const std::vector<std::string> names = {"advection1d", "acoustics1d",      "acoustics2d",
                                                 "shallow2d",   "euler2d-quadrant", "shockbubble",
                                                 "psystem"};
  return names;
}

AppDefaults app_defaults(const std::string& name) {
  AppDefaults d;
  d.name = name;
  d.solver = ClassicConfig{};
  if (name == "advection1d" || name == "acoustics1d") {
    d.t_final = 1.0;
  } else if (name == "acoustics2d") {
    d.t_final = 0.6;
  } else if (name == "shallow2d") {
    d.t_final = 1.5;
  } else if (name == "euler2d-quadrant") {
    d.t_final = 0.3;
  } else if (name == "shockbubble") {
    d.t_final = 0.6;
    ClassicConfig c;
    c.cfl_desired = 0.75;
    c.cfl_max = 0.8;
    d.solver = c;
  } else if (name == "psystem") {
    d.t_final = 4.0;
    d.solver = SharpClawConfig::with(SspIntegrator::SSP104, 5);
  } else {
    throw Error("unknown application '" + name + "'");
  }
  return d;
}

Problem setup_app(const std::string& name, const ParamMap& params, GridSize grid) {
  if (name == "advection1d") return setup_advection1d(params, grid);
  if (name == "acoustics1d") return setup_acoustics1d(params, grid);
  if (name == "acoustics2d") return setup_acoustics2d(params, grid);
  if (name == "shallow2d") return setup_shallow2d(params, grid);
  if (name == "euler2d-quadrant") return setup_euler2d_quadrant(params, grid);
  if (name == "shockbubble") return setup_shockbubble(params, grid);
  if (name == "psystem") return setup_psystem(params, grid);
  throw Error("unknown application '" + name + "'");
}

namespace {

struct CliOptions {
  std::string solver;
  int weno_order = 0;
  std::string limiter;
  std::string integrator;
  int mx = 0, my = 0;
  std::optional<double> t_final;
  std::optional<int> frames;
  std::optional<double> cfl_desired, cfl_max;
  std::optional<double> dt;
  int workers = 1;
  std::string outdir = "_output";
  std::string params;
};

void add_run_options(CLI::App* sub, CliOptions& o) {
  sub->add_option("--solver", o.solver, "classic|sharpclaw")->check(CLI::IsMember({"classic", "sharpclaw"}));
  sub->add_option("--weno-order", o.weno_order, "odd WENO order 5..17 (sharpclaw)");
  sub->add_option("--limiter", o.limiter, "mc|minmod|superbee|vanleer|none (classic)");
  sub->add_option("--integrator", o.integrator, "ssp104|ssp33 (sharpclaw)");
  sub->add_option("--mx", o.mx, "cells in x")->check(CLI::PositiveNumber);
  sub->add_option("--my", o.my, "cells in y")->check(CLI::PositiveNumber);
  sub->add_option("--tfinal", o.t_final, "final time");
  sub->add_option("--frames", o.frames, "number of output intervals");
  sub->add_option("--cfl-desired", o.cfl_desired, "target Courant number");
  sub->add_option("--cfl-max", o.cfl_max, "largest accepted Courant number");
  sub->add_option("--dt", o.dt, "fixed time step instead of CFL control");
  sub->add_option("--workers", o.workers, "number of parallel workers")->check(CLI::PositiveNumber);
  sub->add_option("--outdir", o.outdir, "frame output directory");
  sub->add_option("--params", o.params, "key = value parameter file");
}

SolverConfig build_solver(const AppDefaults& d, const CliOptions& o) {
  if (o.weno_order != 0) validate_weno_order(o.weno_order);
  std::string kind = o.solver;
  if (kind.empty() && o.weno_order != 0) kind = "sharpclaw";
  if (kind.empty()) kind = std::holds_alternative<ClassicConfig>(d.solver) ? "classic" : "sharpclaw";
  if (kind == "classic") {
    if (o.weno_order != 0) throw Error("--weno-order applies to the sharpclaw solver only");
    ClassicConfig c = std::holds_alternative<ClassicConfig>(d.solver) ? std::get<ClassicConfig>(d.solver)
                                                                     : ClassicConfig{};
    if (!o.limiter.empty()) c.limiters = {parse_limiter(o.limiter)};
    if (o.cfl_desired) c.cfl_desired = *o.cfl_desired;
    if (o.cfl_max) c.cfl_max = *o.cfl_max;
    return c;
  }
  if (!o.limiter.empty()) throw Error("--limiter applies to the classic solver only");
  const SspIntegrator integ = o.integrator.empty() ? SspIntegrator::SSP104 : parse_integrator(o.integrator);
  SharpClawConfig c = SharpClawConfig::with(integ, o.weno_order != 0 ? o.weno_order : 5);
  if (o.cfl_desired) c.cfl_desired = *o.cfl_desired;
  if (o.cfl_max) c.cfl_max = *o.cfl_max;
  return c;
}

int run_app(const std::string& name, const CliOptions& o) {
  const AppDefaults d = app_defaults(name);
  ParamMap params;
  if (!o.params.empty())
    params = ParamMap::load(o.params);
  else if (name == "euler2d-quadrant")
    params = ParamMap::load(default_quadrant_params_path());
  const Problem problem = setup_app(name, params, {o.mx, o.my});
  RunConfig cfg;
  cfg.solver = build_solver(d, o);
  cfg.t_final = o.t_final.value_or(d.t_final);
  cfg.num_frames = o.frames.value_or(d.num_frames);
  cfg.fixed_dt = o.dt;
  cfg.workers = o.workers;
  cfg.outdir = o.outdir;
  const auto start = std::chrono::steady_clock::now();
  const RunResult r = run(problem, cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s: %ld steps (%ld rejected), t = %.6g, %zu frames in %s, wall %.3f s\n", name.c_str(),
              r.steps, r.rejected, r.t, r.frames.size(), cfg.outdir.c_str(), wall);
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Finite-volume solvers for hyperbolic conservation laws"};
  app.require_subcommand(1);
  CliOptions opts;
  std::string chosen;
  for (const auto& name : app_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " problem");
    add_run_options(sub, opts);
    sub->callback([&chosen, name] { chosen = name; });
  }
  int table_k = 3;
  std::string table_edge = "right";
  CLI::App* table = app.add_subcommand("weno-table", "print exact WENO reconstruction coefficients");
  table->add_option("--k", table_k, "sub-stencil width (order 2k-1)");
  table->add_option("--edge", table_edge, "left|right")->check(CLI::IsMember({"left", "right"}));
  table->callback([&chosen] { chosen = "weno-table"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (chosen == "weno-table") {
      dump_tables(std::cout, make_tables(table_k, table_edge == "left" ? EdgePoint::LeftEdge
                                                                       : EdgePoint::RightEdge));
      return 0;
    }
    return run_app(chosen, opts);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace fvclaw
