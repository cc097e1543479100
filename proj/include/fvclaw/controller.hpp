#pragma once

// Simulation driver: initial data, CFL-adaptive time loop with step
// rejection, fractional-step source terms, and frame output. Runs are SPMD
// over the workers of a Partition; output happens on worker 0 after a
// natural-order gather.

#include <array>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fvclaw/classic.hpp"
#include "fvclaw/geometry.hpp"
#include "fvclaw/riemann.hpp"
#include "fvclaw/sharpclaw.hpp"

namespace fvclaw {

/// Geometry of one cell handed to initialization callbacks.
struct Cell {
  int rank = 1;
  std::array<int, 2> index{0, 0};  // global cell index
  std::array<double, 2> center{0.0, 0.0};
  std::array<double, 2> lower{0.0, 0.0};
  std::array<double, 2> upper{0.0, 0.0};
};

/// Pointwise source s(q, x, t) written into `out`.
using SourceFn = std::function<void(std::span<const double> q, const Cell& cell, double t,
                                    std::span<double> out)>;

enum class SourceSplit { Godunov, Strang };

struct Problem {
  std::shared_ptr<const RiemannSolver> solver;
  std::vector<Dimension> domain;
  int num_aux = 0;
  std::optional<int> capacity_index;
  BoundarySpec bc;
  std::function<void(const Cell&, std::span<double> q)> initial;
  std::function<void(const Cell&, std::span<double> aux)> aux_init;
  SourceFn source;
  SourceSplit source_split = SourceSplit::Godunov;

  int num_eqn() const { return solver ? solver->num_eqn() : 0; }
  int num_waves() const { return solver ? solver->num_waves() : 0; }
  void validate() const;
};

using SolverConfig = std::variant<ClassicConfig, SharpClawConfig>;

int num_ghost_for(const SolverConfig& cfg);
double cfl_desired_of(const SolverConfig& cfg);
double cfl_max_of(const SolverConfig& cfg);

/// Frame data in natural order (x fastest, equations fastest within a cell).
struct Frame {
  int index = 0;
  double t = 0.0;
  int rank = 1;
  std::array<int, 2> cells{1, 1};
  std::array<double, 4> bounds{0.0, 1.0, 0.0, 1.0};
  int num_eqn = 0;
  std::vector<double> q;

  double at(int m, int i, int j = 0) const {
    return q[(static_cast<std::size_t>(j) * cells[0] + i) * num_eqn + m];
  }
};

struct RunConfig {
  SolverConfig solver = ClassicConfig{};
  double t_final = 1.0;
  int num_frames = 10;
  /// Defaults to 1e-4·t_final.
  std::optional<double> dt_initial;
  double dt_max = std::numeric_limits<double>::infinity();
  long max_steps = 1000000;
  std::string outdir;
  int workers = 1;
  /// Take steps of exactly this size (clipped at output times); a step
  /// above cfl_max is then an error rather than a retry.
  std::optional<double> fixed_dt;
  /// Called on worker 0 for every frame, after any file is written.
  std::function<void(const Frame&)> on_frame;

  void validate() const;
};

struct FrameInfo {
  int index = 0;
  double t = 0.0;
  std::string path;
};

struct RunResult {
  std::vector<FrameInfo> frames;
  long steps = 0;
  long rejected = 0;
  double t = 0.0;
  double max_cfl = 0.0;
};

struct DtChoice {
  double dt;
  bool accept;
};

DtChoice select_dt(double dt_prev, double cfl_observed, double cfl_desired, double cfl_max,
                   double dt_max = std::numeric_limits<double>::infinity());

/// Integrates q' = s(q) over dt in every interior cell with one explicit
/// midpoint step (two stages).
void source_update(State& state, const SourceFn& source, double dt);
/// Source part of one split step with the hyperbolic part omitted. Godunov:
/// one dt update. Strang: two dt/2 updates (the ones the time loop places
/// before and after the hyperbolic step).
void source_step(State& state, const SourceFn& source, double dt, SourceSplit scheme);

Cell make_cell(const Patch& patch, int i, int j);

/// Builds a state on `patch` with initial q and aux (interior only).
State initial_state(const Problem& problem, const Patch& patch, int num_ghost);

std::string frame_name(int index);
std::string write_frame(const Frame& frame, const std::string& outdir);
Frame read_frame(const std::string& path);
void write_manifest(const std::vector<FrameInfo>& frames, const std::string& outdir);

RunResult run(const Problem& problem, const RunConfig& config);

}  // namespace fvclaw
