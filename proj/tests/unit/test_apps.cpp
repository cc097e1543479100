#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "fvclaw/apps.hpp"

using namespace fvclaw;
namespace fs = std::filesystem;

namespace {

const double kPi = std::numbers::pi;

// Area of [x0,x1]×[y0,y1] inside the circle from a fine column midpoint rule.
double column_oracle(double x0, double x1, double y0, double y1, double cx, double cy, double r) {
  const int n = 200000;
  const double h = (x1 - x0) / n;
  double area = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = x0 + (i + 0.5) * h - cx;
    if (std::abs(x) >= r) continue;
    const double half = std::sqrt(r * r - x * x);
    const double lo = std::clamp(cy - half, y0, y1), hi = std::clamp(cy + half, y0, y1);
    area += (hi - lo) * h;
  }
  return area / ((x1 - x0) * (y1 - y0));
}

int call_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fvclaw");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fvclaw_apps_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<Frame> collect(const Problem& p, RunConfig cfg) {
  std::vector<Frame> frames;
  cfg.on_frame = [&](const Frame& f) { frames.push_back(f); };
  run(p, cfg);
  return frames;
}

std::vector<double> initial_values(const Problem& p) {
  State s = initial_state(p, Patch::whole(p.domain), 2);
  std::vector<double> out;
  const int ny = p.domain.size() > 1 ? p.domain[1].num_cells : 1;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < p.domain[0].num_cells; ++i)
      for (int m = 0; m < s.num_eqn(); ++m) out.push_back(s.q(m, i, j));
  return out;
}

}  // namespace

TEST_CASE("bubble fraction") {
  CHECK(bubble_fraction(0.1, 0.2, 0.1, 0.2, 0.0, 0.0, 1.0) == 1.0);
  CHECK(bubble_fraction(2.0, 3.0, 2.0, 3.0, 0.0, 0.0, 1.0) == 0.0);
  CHECK(bubble_fraction(0.9, 1.0, 0.9, 1.0, 0.0, 0.0, 1.0) == 0.0);
  CHECK(std::abs(bubble_fraction(0, 1, 0, 1, 0, 0, 1.0) - kPi / 4) < 1e-6);
  CHECK(std::abs(column_oracle(0, 1, 0, 1, 0, 0, 1.0) - kPi / 4) < 1e-8);
  CHECK_THROWS_AS(bubble_fraction(0, 1, 0, 1, 0, 0, 1.0, 0.0), Error);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const double x0 = u(rng), y0 = u(rng), w = 0.05 + 0.3 * std::abs(u(rng));
    const double cx = 0.3 * u(rng), cy = 0.3 * u(rng), r = 0.5 + 0.3 * std::abs(u(rng));
    const double f = bubble_fraction(x0, x0 + w, y0, y0 + w, cx, cy, r);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(std::abs(f - column_oracle(x0, x0 + w, y0, y0 + w, cx, cy, r)) < 1e-6);
  }

  double prev = 0.0;
  for (double r = 0.1; r < 1.6; r += 0.05) {
    const double f = bubble_fraction(0, 1, 0, 1, 0, 0, r);
    CHECK(f >= prev);
    prev = f;
  }
  CHECK(prev == 1.0);
}

TEST_CASE("checkerboard medium") {
  CHECK(checkerboard(0.25, 0.75) == std::array<double, 2>{1.0, 1.0});
  CHECK(checkerboard(0.25, 0.25) == std::array<double, 2>{5.0, 5.0});
  CHECK(checkerboard(1.75, 0.25) == std::array<double, 2>{1.0, 1.0});
  CHECK(checkerboard(1.25, 0.25) == std::array<double, 2>{5.0, 5.0});
  CHECK(checkerboard(1.75, 0.75) == std::array<double, 2>{5.0, 5.0});
  CHECK(checkerboard(2.25, 3.75) == std::array<double, 2>{1.0, 1.0});
}

TEST_CASE("p-system strain inversion") {
  for (double bulk : {1.0, 5.0})
    for (double excess : {0.0, 0.3, 5.0}) {
      const double e = psystem_strain_for_excess_stress(excess, bulk);
      CHECK(std::exp(bulk * e) + 1.0 == doctest::Approx(2.0 + excess).epsilon(1e-14));
    }
  CHECK_THROWS_AS(psystem_strain_for_excess_stress(-1.0, 1.0), Error);
}

TEST_CASE("parameter maps") {
  const auto p = ParamMap::parse("# c\n a = 1.5 # trailing\n\nname = x\n");
  CHECK(p.number("a") == 1.5);
  CHECK(p.number("b", 2.0) == 2.0);
  CHECK(p.text("name", "") == "x");
  CHECK_THROWS_AS(p.number("name"), Error);
  CHECK_THROWS_AS(p.number("missing"), Error);
  CHECK_THROWS_AS(ParamMap::parse("novalue\n"), Error);
  CHECK_THROWS_AS(ParamMap::parse("k =\n"), Error);
  CHECK_THROWS_AS(ParamMap::load("/nonexistent/params.txt"), Error);
  CHECK(ParamMap::load(default_quadrant_params_path()).has("ll.p"));
}

TEST_CASE("shock-bubble setup") {
  const Problem p = setup_shockbubble({}, {});
  REQUIRE(p.domain.size() == 2);
  CHECK(p.domain[0].lower == 0.0);
  CHECK(p.domain[0].upper == 2.0);
  CHECK(p.domain[1].upper == 0.5);
  CHECK(p.num_eqn() == 5);
  CHECK(p.source);
  CHECK(cfl_max_of(app_defaults("shockbubble").solver) == 0.8);

  std::array<double, 5> q{};
  Cell c;
  c.rank = 2;
  c.center = {0.1, 0.2};
  c.lower = {0.095, 0.195};
  c.upper = {0.105, 0.205};
  p.initial(c, q);
  CHECK(q[0] == 2.82);
  CHECK(q[1] == 2.82 * 1.61);
  CHECK(q[2] == 0.0);
  CHECK(q[3] == doctest::Approx(5.0 / 0.4 + 0.5 * 2.82 * 1.61 * 1.61).epsilon(1e-15));
  CHECK(q[4] == 0.0);

  c.center = {1.5, 0.4};
  c.lower = {1.495, 0.395};
  c.upper = {1.505, 0.405};
  p.initial(c, q);
  CHECK(q[0] == 1.0);
  CHECK(q[1] == 0.0);
  CHECK(q[3] == doctest::Approx(1.0 / 0.4).epsilon(1e-15));
  CHECK(q[4] == 0.0);

  c.center = {0.5, 0.05};
  c.lower = {0.495, 0.045};
  c.upper = {0.505, 0.055};
  p.initial(c, q);
  CHECK(q[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(q[4] == 1.0);

  CHECK_THROWS_AS(setup_shockbubble(ParamMap::parse("gamma = 1\n"), {}), Error);
}

TEST_CASE("axisymmetric source vanishes without radial velocity") {
  const auto src = axisymmetric_source(1.4);
  Cell c;
  c.rank = 2;
  c.center = {0.7, 0.3};
  const std::array<double, 5> q{2.0, 3.0, 0.0, 9.0, 0.5};
  std::array<double, 5> out{1, 1, 1, 1, 1};
  src(q, c, 0.0, out);
  for (double v : out) CHECK(v == 0.0);
  const std::array<double, 5> moving{1.0, 0.0, 0.5, 3.0, 0.0};
  src(moving, c, 0.0, out);
  CHECK(out[0] == doctest::Approx(-0.5 / 0.3));
  CHECK(out[4] == 0.0);
}

TEST_CASE("p-system setup") {
  const Problem p = setup_psystem({}, {});
  CHECK(p.domain[0].upper == 10.0);
  CHECK(p.domain[0].num_cells == 240);
  CHECK(std::holds_alternative<SharpClawConfig>(app_defaults("psystem").solver));
  CHECK(std::get<SharpClawConfig>(app_defaults("psystem").solver).weno_order == 5);

  const Problem fine = setup_psystem({}, {2400, 2400});
  CHECK(fine.domain[0].delta() == doctest::Approx(1.0 / 240).epsilon(1e-14));
  CHECK(fine.domain[1].delta() == doctest::Approx(1.0 / 240).epsilon(1e-14));

  Cell c;
  c.rank = 2;
  c.center = {0.25, 0.75};
  std::array<double, 2> aux{};
  p.aux_init(c, aux);
  CHECK(aux == std::array<double, 2>{1.0, 1.0});
  c.center = {0.25, 0.25};
  p.aux_init(c, aux);
  CHECK(aux == std::array<double, 2>{5.0, 5.0});
  std::array<double, 3> q{};
  c.center = {0.0, 0.0};
  p.initial(c, q);
  CHECK(std::exp(5.0 * q[0]) + 1.0 == doctest::Approx(7.0));
  CHECK(q[1] == 0.0);
  CHECK(q[2] == 0.0);
}

TEST_CASE("quadrant setup") {
  CHECK_THROWS_WITH_AS(setup_euler2d_quadrant(ParamMap::parse("ur.rho = 1\n"), {}),
                       doctest::Contains("incomplete"), Error);

  std::string text = "gamma = 1.4\n";
  for (const char* s : {"ur", "ul", "ll", "lr"})
    text += std::string(s) + ".rho = 1\n" + s + ".u = 0.2\n" + s + ".v = -0.1\n" + s + ".p = 1\n";
  const Problem constant = setup_euler2d_quadrant(ParamMap::parse(text), {16, 16});
  RunConfig cfg;
  cfg.t_final = 0.05;
  cfg.num_frames = 1;
  const auto frames = collect(constant, cfg);
  REQUIRE(frames.size() == 2);
  const Frame& f = frames.back();
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i) {
      CHECK(f.at(0, i, j) == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(f.at(1, i, j) == doctest::Approx(0.2).epsilon(1e-13));
    }

  const Problem sym = setup_euler2d_quadrant(ParamMap::load(default_quadrant_params_path()), {24, 24});
  cfg.t_final = 0.1;
  cfg.solver = SharpClawConfig::with(SspIntegrator::SSP104, 5);
  const auto sf = collect(sym, cfg);
  double worst = 0.0;
  for (int j = 0; j < 24; ++j)
    for (int i = 0; i < 24; ++i) {
      worst = std::max(worst, std::abs(sf.back().at(0, i, j) - sf.back().at(0, j, i)));
      worst = std::max(worst, std::abs(sf.back().at(1, i, j) - sf.back().at(2, j, i)));
      worst = std::max(worst, std::abs(sf.back().at(3, i, j) - sf.back().at(3, j, i)));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("advection returns after one period") {
  const Problem p = setup_advection1d({}, {200});
  RunConfig cfg;
  cfg.num_frames = 1;
  const auto frames = collect(p, cfg);
  double err = 0.0;
  for (int i = 0; i < 200; ++i)
    err += std::abs(frames.back().at(0, i) - frames.front().at(0, i)) / 200;
  CHECK(err < 1e-3);
}

TEST_CASE("acoustics with walls keeps total pressure") {
  const Problem p = setup_acoustics1d({}, {});
  RunConfig cfg;
  cfg.num_frames = 4;
  const auto frames = collect(p, cfg);
  auto total = [](const Frame& f) {
    double s = 0.0;
    for (int i = 0; i < f.cells[0]; ++i) s += f.at(0, i);
    return s;
  };
  const double t0 = total(frames.front());
  for (const auto& f : frames) CHECK(std::abs(total(f) - t0) < 1e-12 * std::abs(t0));

  const Problem periodic = setup_acoustics2d(ParamMap::parse("bc = periodic\n"), {20, 20});
  CHECK(std::holds_alternative<Periodic>(periodic.bc.sides[0][0]));
  CHECK_THROWS_AS(setup_acoustics2d(ParamMap::parse("bc = sticky\n"), {}), Error);
}

TEST_CASE("shallow water dam break stays positive") {
  const Problem p = setup_shallow2d({}, {40, 40});
  RunConfig cfg;
  cfg.t_final = 0.5;
  cfg.num_frames = 2;
  for (const auto& f : collect(p, cfg))
    for (int j = 0; j < 40; ++j)
      for (int i = 0; i < 40; ++i) CHECK(f.at(0, i, j) > 0.0);
}

TEST_CASE("setups are pure functions of their parameters") {
  const ParamMap params = ParamMap::load(default_quadrant_params_path());
  const auto before = params.values();
  for (const auto& name : app_names()) {
    const ParamMap use = name == "euler2d-quadrant" ? params : ParamMap{};
    const Problem a = setup_app(name, use, {12, 12});
    const Problem b = setup_app(name, use, {12, 12});
    CHECK(initial_values(a) == initial_values(b));
  }
  CHECK(params.values() == before);
  CHECK_THROWS_AS(setup_app("nosuch", {}, {}), Error);
  CHECK_THROWS_AS(app_defaults("nosuch"), Error);
}

TEST_CASE("command line") {
  const fs::path dir = scratch_dir("cli");
  CHECK(call_cli({"advection1d", "--mx", "100", "--tfinal", "1", "--outdir", dir.string()}) == 0);
  for (int k = 0; k <= 10; ++k) CHECK(fs::exists(dir / frame_name(k)));
  CHECK(fs::exists(dir / "manifest.txt"));

  const fs::path sb = scratch_dir("cli_sb");
  CHECK(call_cli({"shockbubble", "--solver", "sharpclaw", "--weno-order", "7", "--mx", "40", "--my",
                  "10", "--tfinal", "0.02", "--frames", "1", "--outdir", sb.string()}) == 0);
  const Frame f = read_frame((sb / frame_name(1)).string());
  CHECK(f.t == 0.02);
  for (double v : f.q) CHECK(std::isfinite(v));

  CHECK(call_cli({"advection1d", "--weno-order", "6"}) != 0);
  CHECK(call_cli({"advection1d", "--weno-order", "19"}) != 0);
  CHECK(call_cli({"advection1d", "--solver", "classic", "--weno-order", "5"}) != 0);
  CHECK(call_cli({"advection1d", "--solver", "sharpclaw", "--limiter", "mc"}) != 0);
  CHECK(call_cli({"advection1d", "--limiter", "bogus"}) != 0);
  CHECK(call_cli({"advection1d", "--solver", "upwind"}) != 0);
  CHECK(call_cli({"advection1d", "--mx", "0"}) != 0);
  CHECK(call_cli({"nosuch"}) != 0);
  CHECK(call_cli({}) != 0);

  std::ostringstream captured;
  auto* old = std::cout.rdbuf(captured.rdbuf());
  const int rc = call_cli({"weno-table", "--k", "3"});
  std::cout.rdbuf(old);
  CHECK(rc == 0);
  CHECK(captured.str().find("3 1 0 -1/6") != std::string::npos);
  fs::remove_all(dir);
  fs::remove_all(sb);
}
