#include "fvclaw/controller.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fvclaw/parallel.hpp"

namespace fvclaw {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void Problem::validate() const {
  if (!solver) throw Error("problem has no Riemann solver");
  if (domain.empty() || domain.size() > 2) throw Error("problem domain must have rank 1 or 2");
  if (solver->dims() != static_cast<int>(domain.size()))
    throw Error("Riemann solver is laid out for " + std::to_string(solver->dims()) +
                "D but the domain has rank " + std::to_string(domain.size()));
  if (!initial) throw Error("problem has no initial condition");
  if (num_aux < solver->num_aux())
    throw Error("Riemann solver reads " + std::to_string(solver->num_aux()) +
                " aux fields but the problem provides " + std::to_string(num_aux));
  if (num_aux > 0 && !aux_init) throw Error("problem declares aux fields without aux_init");
  if (capacity_index && (*capacity_index < 0 || *capacity_index >= num_aux))
    throw Error("capacity index outside of aux");
  bc.validate(static_cast<int>(domain.size()));
}

int num_ghost_for(const SolverConfig& cfg) {
  return std::visit(Overloaded{[](const ClassicConfig&) { return 2; },
                               [](const SharpClawConfig& c) { return std::max(2, c.num_ghost()); }},
                    cfg);
}

double cfl_desired_of(const SolverConfig& cfg) {
  return std::visit([](const auto& c) { return c.cfl_desired; }, cfg);
}

double cfl_max_of(const SolverConfig& cfg) {
  return std::visit([](const auto& c) { return c.cfl_max; }, cfg);
}

void RunConfig::validate() const {
  std::visit([](const auto& c) { c.validate(); }, solver);
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw Error("t_final must be finite and >= 0");
  if (num_frames < 1) throw Error("num_frames must be at least 1");
  if (dt_initial && !(*dt_initial > 0.0)) throw Error("dt_initial must be positive");
  if (!(dt_max > 0.0)) throw Error("dt_max must be positive");
  if (dt_initial && *dt_initial > dt_max) throw Error("dt_initial must not exceed dt_max");
  if (fixed_dt && !(*fixed_dt > 0.0)) throw Error("fixed dt must be positive");
  if (max_steps < 1) throw Error("max_steps must be positive");
  if (workers < 1) throw Error("workers must be at least 1");
}

DtChoice select_dt(double dt_prev, double cfl_observed, double cfl_desired, double cfl_max,
                   double dt_max) {
  const bool accept = cfl_observed <= cfl_max;
  const double dt = std::min(dt_max, dt_prev * cfl_desired / std::max(cfl_observed, 1e-12));
  return {dt, accept};
}

Cell make_cell(const Patch& patch, int i, int j) {
  Cell c;
  c.rank = patch.rank();
  c.index = {patch.offset[0] + i, patch.rank() == 2 ? patch.offset[1] + j : 0};
  c.center[0] = patch.center(0, i);
  c.lower[0] = patch.edge(0, i);
  c.upper[0] = patch.edge(0, i + 1);
  if (patch.rank() == 2) {
    c.center[1] = patch.center(1, j);
    c.lower[1] = patch.edge(1, j);
    c.upper[1] = patch.edge(1, j + 1);
  }
  return c;
}

void source_update(State& state, const SourceFn& source, double dt) {
  if (!source) return;
  const int m_eq = state.num_eqn();
  std::vector<double> k1(m_eq), mid(m_eq), k2(m_eq);
  for (int j = 0; j < state.patch.ny(); ++j)
    for (int i = 0; i < state.patch.nx(); ++i) {
      const Cell cell = make_cell(state.patch, i, j);
      double* q = state.q.cell(i, j);
      source({q, static_cast<std::size_t>(m_eq)}, cell, state.t, k1);
      for (int m = 0; m < m_eq; ++m) mid[m] = q[m] + 0.5 * dt * k1[m];
      source(mid, cell, state.t + 0.5 * dt, k2);
      for (int m = 0; m < m_eq; ++m)
        if (k2[m] != 0.0) q[m] += dt * k2[m];
    }
}

void source_step(State& state, const SourceFn& source, double dt, SourceSplit scheme) {
  if (scheme == SourceSplit::Godunov) {
    source_update(state, source, dt);
    return;
  }
  const double t0 = state.t;
  source_update(state, source, 0.5 * dt);
  state.t = t0 + 0.5 * dt;
  source_update(state, source, 0.5 * dt);
  state.t = t0;
}

State initial_state(const Problem& problem, const Patch& patch, int num_ghost) {
  State s(patch, problem.num_eqn(), problem.num_aux, num_ghost);
  s.capacity_index = problem.capacity_index;
  for (int j = 0; j < patch.ny(); ++j)
    for (int i = 0; i < patch.nx(); ++i) {
      const Cell cell = make_cell(patch, i, j);
      problem.initial(cell, {s.q.cell(i, j), static_cast<std::size_t>(s.num_eqn())});
      if (problem.num_aux > 0)
        problem.aux_init(cell, {s.aux.cell(i, j), static_cast<std::size_t>(s.num_aux())});
      if (problem.capacity_index && !(s.aux(*problem.capacity_index, i, j) > 0.0))
        throw Error("capacity must be positive in every cell");
    }
  return s;
}

std::string frame_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame%04d.txt", index);
  return buf;
}

std::string write_frame(const Frame& frame, const std::string& outdir) {
  std::filesystem::create_directories(outdir);
  const std::string path = (std::filesystem::path(outdir) / frame_name(frame.index)).string();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "t " << format_double(frame.t) << '\n';
  os << "rank " << frame.rank << '\n';
  os << "cells " << frame.cells[0];
  if (frame.rank == 2) os << ' ' << frame.cells[1];
  os << '\n';
  os << "bounds " << format_double(frame.bounds[0]) << ' ' << format_double(frame.bounds[1]);
  if (frame.rank == 2)
    os << ' ' << format_double(frame.bounds[2]) << ' ' << format_double(frame.bounds[3]);
  os << '\n';
  os << "num_eqn " << frame.num_eqn << '\n';
  const std::size_t ncells = static_cast<std::size_t>(frame.cells[0]) * frame.cells[1];
  std::string line;
  for (std::size_t c = 0; c < ncells; ++c) {
    line.clear();
    for (int m = 0; m < frame.num_eqn; ++m) {
      if (m) line += ' ';
      line += format_double(frame.q[c * frame.num_eqn + m]);
    }
    line += '\n';
    os << line;
  }
  if (!os) throw Error("failed writing " + path);
  return path;
}

Frame read_frame(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  Frame f;
  auto expect = [&](const char* key) {
    std::string k;
    if (!(is >> k) || k != key) throw Error(path + ": expected '" + key + "'");
  };
  const auto name = std::filesystem::path(path).filename().string();
  if (std::sscanf(name.c_str(), "frame%d.txt", &f.index) != 1) f.index = 0;
  expect("t");
  is >> f.t;
  expect("rank");
  is >> f.rank;
  if (f.rank != 1 && f.rank != 2) throw Error(path + ": rank must be 1 or 2");
  expect("cells");
  is >> f.cells[0];
  if (f.rank == 2) is >> f.cells[1];
  expect("bounds");
  is >> f.bounds[0] >> f.bounds[1];
  if (f.rank == 2) is >> f.bounds[2] >> f.bounds[3];
  expect("num_eqn");
  is >> f.num_eqn;
  if (!is || f.num_eqn < 1 || f.cells[0] < 1 || f.cells[1] < 1) throw Error(path + ": bad header");
  f.q.resize(static_cast<std::size_t>(f.cells[0]) * f.cells[1] * f.num_eqn);
  for (double& v : f.q) {
    std::string tok;
    if (!(is >> tok)) throw Error(path + ": truncated data");
    v = std::strtod(tok.c_str(), nullptr);
  }
  return f;
}

void write_manifest(const std::vector<FrameInfo>& frames, const std::string& outdir) {
  std::filesystem::create_directories(outdir);
  const auto path = std::filesystem::path(outdir) / "manifest.txt";
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  for (const auto& f : frames) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d", f.index);
    os << buf << ' ' << format_double(f.t) << '\n';
  }
}

namespace {

struct Worker {
  const Problem& problem;
  const RunConfig& config;
  const Partition& part;
  Communicator& comm;
  RunResult& result;

  int expected_fills(const State& s) const {
    return std::visit(Overloaded{[&](const ClassicConfig&) { return s.rank() == 2 ? 2 : 0; },
                                 [&](const SharpClawConfig& c) {
                                   return ShuOsherTable::of(c.integrator).stages;
                                 }},
                      config.solver);
  }

  // Hyperbolic step that keeps the collective fill sequence intact even
  // when a kernel rejects its input: the missing fills are still made and
  // the step reports an infinite Courant number.
  double hyperbolic(State& s, double dt) {
    int fills = 0;
    bool in_fill = false;
    GhostFill fill = [&](State& st) {
      in_fill = true;
      fill_ghosts(comm, part, st, problem.bc);
      in_fill = false;
      ++fills;
    };
    const RiemannSolver& solver = *problem.solver;
    try {
      return std::visit(
          Overloaded{[&](const ClassicConfig& c) {
                       return s.rank() == 1 ? step1d_classic(s, solver, dt, c)
                                            : step2d_classic(s, solver, dt, c, fill);
                     },
                     [&](const SharpClawConfig& c) { return step_sharpclaw(s, solver, dt, c, fill); }},
          config.solver);
    } catch (const Error&) {
      if (in_fill) throw;
      for (int n = fills; n < expected_fills(s); ++n) fill(s);
      return std::numeric_limits<double>::infinity();
    }
  }

  void output(const State& s, int index) {
    std::vector<double> full = gather_natural(comm, part, s);
    if (comm.rank() != 0) return;
    Frame f;
    f.index = index;
    f.t = s.t;
    f.rank = s.rank();
    f.cells = {part.mx, part.my};
    f.bounds = {problem.domain[0].lower, problem.domain[0].upper,
                s.rank() == 2 ? problem.domain[1].lower : 0.0,
                s.rank() == 2 ? problem.domain[1].upper : 0.0};
    f.num_eqn = s.num_eqn();
    f.q = std::move(full);
    FrameInfo info{index, s.t, ""};
    if (!config.outdir.empty()) info.path = write_frame(f, config.outdir);
    result.frames.push_back(info);
    if (!config.outdir.empty()) write_manifest(result.frames, config.outdir);
    if (config.on_frame) config.on_frame(f);
  }

  void operator()() {
    const int g = num_ghost_for(config.solver);
    const Tile& tile = part.tile(comm.rank());
    State s = initial_state(problem, Patch::tile(problem.domain, tile.offset, tile.count), g);
    if (problem.num_aux > 0) fill_aux_ghosts(comm, part, s, problem.bc);
    const double desired = cfl_desired_of(config.solver);
    const double cfl_max = cfl_max_of(config.solver);
    const bool strang = problem.source && problem.source_split == SourceSplit::Strang;

    output(s, 0);
    double dt = config.fixed_dt ? *config.fixed_dt
                                : config.dt_initial.value_or(1e-4 * config.t_final);
    dt = std::min(dt, config.dt_max);
    long steps = 0, rejected = 0;
    double max_cfl = 0.0;
    for (int frame = 1; frame <= config.num_frames; ++frame) {
      const double target = frame * config.t_final / config.num_frames;
      while (s.t < target) {
        if (steps >= config.max_steps)
          throw Error("max_steps (" + std::to_string(config.max_steps) + ") exceeded at t = " +
                      format_double(s.t));
        // a step landing within rounding of the output time ends exactly on it
        const bool hit = s.t + dt * (1.0 + 1e-9) >= target;
        const double dt_step = hit ? target - s.t : dt;
        const State snapshot = s;
        if (strang) source_update(s, problem.source, 0.5 * dt_step);
        fill_ghosts(comm, part, s, problem.bc);
        double cfl = hyperbolic(s, dt_step);
        if (problem.source) {
          if (strang) {
            s.t = snapshot.t + 0.5 * dt_step;
            source_update(s, problem.source, 0.5 * dt_step);
          } else {
            source_update(s, problem.source, dt_step);
          }
        }
        if (!all_finite(s.q) || std::isnan(cfl)) cfl = std::numeric_limits<double>::infinity();
        cfl = comm.allreduce_max(cfl);

        bool accept = false;
        double dt_next = dt;
        if (!std::isfinite(cfl)) {
          if (config.fixed_dt) throw Error("solution became non-finite at t = " + format_double(snapshot.t));
          dt_next = 0.5 * dt_step;
        } else {
          const DtChoice choice = select_dt(dt_step, cfl, desired, cfl_max, config.dt_max);
          accept = choice.accept;
          dt_next = choice.dt;
          if (config.fixed_dt && !accept)
            throw Error("Courant number " + format_double(cfl) + " exceeds cfl_max " +
                        format_double(cfl_max) + " with a fixed dt");
        }
        if (!accept) {
          s = snapshot;
          ++rejected;
          dt = dt_next;
          if (dt < 1e-12 * config.t_final)
            throw Error("time step fell below 1e-12*t_final at t = " + format_double(s.t));
          continue;
        }
        s.t = hit ? target : snapshot.t + dt_step;
        ++steps;
        max_cfl = std::max(max_cfl, cfl);
        dt = config.fixed_dt ? *config.fixed_dt : dt_next;
      }
      output(s, frame);
    }
    if (comm.rank() == 0) {
      result.steps = steps;
      result.rejected = rejected;
      result.t = s.t;
      result.max_cfl = max_cfl;
    }
  }
};

}  // namespace

RunResult run(const Problem& problem, const RunConfig& config) {
  problem.validate();
  config.validate();
  const int g = num_ghost_for(config.solver);
  const int mx = problem.domain[0].num_cells;
  const int my = problem.domain.size() == 2 ? problem.domain[1].num_cells : 1;
  const Partition part = Partition::make(mx, my, config.workers, g);
  RunResult result;
  run_workers(config.workers, [&](Communicator& comm) {
    Worker{problem, config, part, comm, result}();
  });
  return result;
}

}  // namespace fvclaw
