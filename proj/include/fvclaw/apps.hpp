#pragma once

// Application problems, their setup helpers, and the command-line driver.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fvclaw/controller.hpp"

namespace fvclaw {

/// Flat `key = value` parameters; '#' starts a comment.
class ParamMap {
 public:
  ParamMap() = default;
  static ParamMap parse(const std::string& text, const std::string& origin = "parameters");
  static ParamMap load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_ = "parameters";
};

/// Grid size request; zero means the app default.
struct GridSize {
  int mx = 0;
  int my = 0;
};

/// Area fraction of the rectangle [xlo,xhi]×[ylo,yhi] inside the circle,
/// by recursive quadrisection down to a diagonal below tol·radius and a
/// midpoint rule on the remaining straddling pieces.
double bubble_fraction(double xlo, double xhi, double ylo, double yhi, double cx, double cy,
                       double radius, double tol = 1e-6);

/// Checkerboard medium: (ρ, K) = (1, 1) where
/// (x-⌊x⌋-½)(y-⌊y⌋-½) < 0, else (5, 5).
std::array<double, 2> checkerboard(double x, double y);

/// Strain whose stress exp(Kε)+1 exceeds the rest stress σ(0) = 2 by `excess`.
double psystem_strain_for_excess_stress(double excess, double bulk);

/// Cell average of sin(2πx) over [a, b].
double sine_cell_average(double a, double b);

Problem setup_advection1d(const ParamMap& params, GridSize grid);
Problem setup_acoustics1d(const ParamMap& params, GridSize grid);
Problem setup_acoustics2d(const ParamMap& params, GridSize grid);
Problem setup_shallow2d(const ParamMap& params, GridSize grid);
Problem setup_euler2d_quadrant(const ParamMap& params, GridSize grid);
Problem setup_shockbubble(const ParamMap& params, GridSize grid);
Problem setup_psystem(const ParamMap& params, GridSize grid);

/// Geometric source of the axisymmetric Euler equations (x axial, y
/// radial): -(1/y)(ρv, ρuv, ρv², (E+p)v, 0).
SourceFn axisymmetric_source(double gamma);

struct AppDefaults {
  std::string name;
  double t_final = 1.0;
  int num_frames = 10;
  SolverConfig solver;
};

const std::vector<std::string>& app_names();
AppDefaults app_defaults(const std::string& name);
Problem setup_app(const std::string& name, const ParamMap& params, GridSize grid);

/// Parameter file shipped with the sources for the quadrant problem.
std::string default_quadrant_params_path();

/// Command-line entry point; returns the process exit code.
int cli_main(int argc, const char* const* argv);

}  // namespace fvclaw
