#pragma once

// Second-order wave-propagation scheme: Godunov update written with
// fluctuations, plus limited second-order correction fluxes built from the
// Riemann waves. 2D uses Strang-ordered dimensional splitting.

#include <functional>
#include <string>
#include <vector>

#include "fvclaw/geometry.hpp"
#include "fvclaw/riemann.hpp"

namespace fvclaw {

enum class LimiterKind { None, Minmod, Superbee, MC, VanLeer };

LimiterKind parse_limiter(const std::string& name);
std::string to_string(LimiterKind kind);

double limiter_value(double theta, LimiterKind kind);

struct ClassicConfig {
  /// One entry per wave family, or a single entry applied to every family.
  std::vector<LimiterKind> limiters{LimiterKind::MC};
  int order = 2;
  double cfl_desired = 0.9;
  double cfl_max = 1.0;

  void validate() const;
  LimiterKind limiter(int wave) const {
    return limiters.size() == 1 ? limiters[0] : limiters.at(wave);
  }
};

/// Refills ghost cells (boundary conditions and, in parallel runs, halos).
using GhostFill = std::function<void(State&)>;

/// Updates the interior of one line of cells in place. `line` holds
/// num_eqn values per cell for cells [-g, n+g); `aux` likewise (may be
/// empty); `kappa` is the capacity per cell or empty for κ ≡ 1. Returns the
/// Courant number max |s|·dt/(κ·dx) over the n+1 interfaces bounding
/// interior cells.
double classic_sweep(std::span<double> line, std::span<const double> aux,
                     std::span<const double> kappa, int n, int num_ghost, double dt, double dx,
                     const RiemannSolver& solver, int normal, const ClassicConfig& cfg);

/// One step on a rank-1 state whose ghost cells are already filled.
double step1d_classic(State& state, const RiemannSolver& solver, double dt,
                      const ClassicConfig& cfg);

/// One Strang-split step on a rank-2 state: x over dt/2, y over dt, x over
/// dt/2. Ghosts must be filled on entry; `fill` is called between sweeps.
/// Each sweep's Courant number is measured against the time it advances.
double step2d_classic(State& state, const RiemannSolver& solver, double dt,
                      const ClassicConfig& cfg, const GhostFill& fill);

/// Single sweep over every interior row (dim 0) or column (dim 1).
double sweep_classic(State& state, const RiemannSolver& solver, double dt,
                     const ClassicConfig& cfg, int dim);

}  // namespace fvclaw
