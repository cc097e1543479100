#pragma once

// Method-of-lines solver: componentwise WENO reconstruction of interface
// values, a fluctuation-form semi-discretization, and SSP Runge–Kutta time
// stepping.

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "fvclaw/classic.hpp"
#include "fvclaw/geometry.hpp"
#include "fvclaw/riemann.hpp"
#include "fvclaw/wenogen.hpp"

namespace fvclaw {

enum class SspIntegrator { SSP33, SSP104 };

SspIntegrator parse_integrator(const std::string& name);
std::string to_string(SspIntegrator integrator);

struct SharpClawConfig {
  int weno_order = 5;
  SspIntegrator integrator = SspIntegrator::SSP104;
  double cfl_desired = 2.45;
  double cfl_max = 2.5;
  double epsilon = 1e-6;

  /// Defaults with the Courant targets matched to the integrator.
  static SharpClawConfig with(SspIntegrator integrator, int weno_order = 5);
  int k() const { return (weno_order + 1) / 2; }
  int num_ghost() const { return k(); }
  void validate() const;
};

void validate_weno_order(int order);

/// Edge values of every cell c in [-1, n] of a gathered line (cells
/// [-g, n+g), variables fastest): lo[c] at the left edge and hi[c] at the
/// right edge. Interface c+1/2 then has q_minus = hi[c], q_plus = lo[c+1].
void reconstruct_line(std::span<const double> line, int num_vars, int n, int num_ghost, int k,
                      double epsilon, std::vector<double>& lo, std::vector<double>& hi);

struct InterfaceValues {
  int num_vars = 0;
  int num_interfaces = 0;
  std::vector<double> q_minus;  // [interface][m], interface c+1/2 for c = -1..n-1
  std::vector<double> q_plus;
};

/// Interface values along a rank-1 state (ghosts filled, width >= k).
InterfaceValues reconstruct_interfaces(const State& state, const SharpClawConfig& cfg);

/// Adds the semi-discrete rate of one line into `dq` (n*num_eqn values).
/// Returns max over interfaces of the wave speed divided by κΔx of the
/// cell it enters.
double sharpclaw_line_rhs(std::span<const double> line, std::span<const double> aux,
                          std::span<const double> kappa, int n, int num_ghost, double dx,
                          const RiemannSolver& solver, int normal, const SharpClawConfig& cfg,
                          std::span<double> dq);

/// dq/dt for every interior cell (ghosts of `state` must be filled).
/// `dqdt` must have the shape of state.q; its ghost entries are set to
/// zero. Returns the largest rate |s|/(κΔx) over all directions.
double sharpclaw_rhs(const State& state, const RiemannSolver& solver, const SharpClawConfig& cfg,
                     Field& dqdt);

/// Shu–Osher form: y_0 = u, y_i = Σ_j alpha_ij y_j + dt beta_ij F(y_j)
/// for i = 1..stages, result y_stages.
struct ShuOsherTable {
  struct Entry {
    int j;
    double alpha;
    double beta;
  };
  int stages = 0;
  std::vector<std::vector<Entry>> rows;  // rows[i-1] defines y_i

  static ShuOsherTable ssp33();
  static ShuOsherTable ssp104();
  static ShuOsherTable of(SspIntegrator integrator);
};

struct ButcherTableau {
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::vector<double> c;
};

ButcherTableau butcher(const ShuOsherTable& table);

inline std::span<double> stage_values(std::vector<double>& v) { return v; }
inline std::span<double> stage_values(State& s) { return s.q.values(); }

/// One SSP step. `T` is copyable and exposes its data via stage_values;
/// rhs(T& y, T& f) writes F(y) into f's values and returns a rate; the
/// maximum rate over all stages is returned.
template <class T, class Rhs>
double ssp_step(T& u, Rhs&& rhs, double dt, const ShuOsherTable& table) {
  const int s = table.stages;
  std::vector<T> y;
  std::vector<T> f;
  y.reserve(s + 1);
  f.reserve(s);
  y.push_back(u);
  double rate = 0.0;
  std::vector<std::pair<const double*, double>> terms;
  for (int i = 1; i <= s; ++i) {
    f.push_back(y[i - 1]);
    rate = std::max(rate, rhs(y[i - 1], f[i - 1]));
    y.push_back(y[0]);
    terms.clear();
    for (const auto& e : table.rows[i - 1]) {
      if (e.alpha != 0.0) terms.emplace_back(stage_values(y[e.j]).data(), e.alpha);
      if (e.beta != 0.0) terms.emplace_back(stage_values(f[e.j]).data(), dt * e.beta);
    }
    std::span<double> out = stage_values(y[i]);
    for (std::size_t n = 0; n < out.size(); ++n) {
      double v = 0.0;
      for (const auto& [src, coef] : terms) v += coef * src[n];
      out[n] = v;
    }
  }
  u = std::move(y[s]);
  return rate;
}

/// One SharpClaw step: `fill` refreshes ghosts before every stage's rhs.
/// Returns the Courant number dt·max rate.
double step_sharpclaw(State& state, const RiemannSolver& solver, double dt,
                      const SharpClawConfig& cfg, const GhostFill& fill);

}  // namespace fvclaw
