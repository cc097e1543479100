#include "fvclaw/sharpclaw.hpp"

#include <cmath>
#include <limits>

namespace fvclaw {

SspIntegrator parse_integrator(const std::string& name) {
  if (name == "ssp33") return SspIntegrator::SSP33;
  if (name == "ssp104") return SspIntegrator::SSP104;
  throw Error("unknown time integrator '" + name + "' (expected ssp33|ssp104)");
}

std::string to_string(SspIntegrator integrator) {
  return integrator == SspIntegrator::SSP33 ? "ssp33" : "ssp104";
}

void validate_weno_order(int order) {
  if (order < 5 || order > 17 || order % 2 == 0) throw Error("weno order must be odd in 5..17");
}

SharpClawConfig SharpClawConfig::with(SspIntegrator integrator, int weno_order) {
  SharpClawConfig c;
  c.weno_order = weno_order;
  c.integrator = integrator;
  if (integrator == SspIntegrator::SSP33) {
    c.cfl_desired = 0.9;
    c.cfl_max = 1.0;
  }
  return c;
}

void SharpClawConfig::validate() const {
  validate_weno_order(weno_order);
  if (!(cfl_desired > 0.0) || cfl_desired > cfl_max)
    throw Error("sharpclaw solver needs 0 < cfl_desired <= cfl_max");
  if (!(epsilon > 0.0)) throw Error("WENO epsilon must be positive");
}

void reconstruct_line(std::span<const double> line, int nv, int n, int g, int k, double epsilon,
                      std::vector<double>& lo, std::vector<double>& hi) {
  if (g < k) throw Error("WENO order needs at least " + std::to_string(k) + " ghost cells");
  const WenoKernel& left = weno_kernel(k, EdgePoint::LeftEdge);
  const WenoKernel& right = weno_kernel(k, EdgePoint::RightEdge);
  lo.resize(static_cast<std::size_t>(n + 2) * nv);
  hi.resize(static_cast<std::size_t>(n + 2) * nv);
  for (int c = -1; c <= n; ++c) {
    const double* start = line.data() + static_cast<std::ptrdiff_t>(c - k + 1 + g) * nv;
    for (int m = 0; m < nv; ++m) {
      const std::size_t at = static_cast<std::size_t>(c + 1) * nv + m;
      lo[at] = reconstruct_strided(start + m, nv, left, epsilon);
      hi[at] = reconstruct_strided(start + m, nv, right, epsilon);
    }
  }
}

InterfaceValues reconstruct_interfaces(const State& state, const SharpClawConfig& cfg) {
  if (state.rank() != 1) throw Error("reconstruct_interfaces needs a rank-1 state");
  const int n = state.patch.nx();
  const int nv = state.num_eqn();
  std::vector<double> line, lo, hi;
  gather_line(state.q, 0, 0, line);
  reconstruct_line(line, nv, n, state.num_ghost(), cfg.k(), cfg.epsilon, lo, hi);
  InterfaceValues out;
  out.num_vars = nv;
  out.num_interfaces = n + 1;
  out.q_minus.assign(hi.begin(), hi.end() - nv);
  out.q_plus.assign(lo.begin() + nv, lo.end());
  return out;
}

double sharpclaw_line_rhs(std::span<const double> line, std::span<const double> aux,
                          std::span<const double> kappa, int n, int g, double dx,
                          const RiemannSolver& solver, int normal, const SharpClawConfig& cfg,
                          std::span<double> dq) {
  const int meqn = solver.num_eqn();
  const int cells = n + 2 * g;
  const int naux = aux.empty() ? 0 : static_cast<int>(aux.size() / cells);
  std::vector<double> lo, hi;
  reconstruct_line(line, meqn, n, g, cfg.k(), cfg.epsilon, lo, hi);
  auto at = [&](std::vector<double>& v, int c) { return v.data() + static_cast<std::size_t>(c + 1) * meqn; };
  auto aux_at = [&](int c) {
    return naux > 0 ? aux.data() + static_cast<std::size_t>(c + g) * naux : nullptr;
  };
  auto inv_kdx = [&](int c) { return 1.0 / (dx * (kappa.empty() ? 1.0 : kappa[c + g])); };

  // Interface c-1/2 for c = 0..n, stored at index c.
  InterfaceStates in;
  in.size = n + 1;
  in.q_left = at(hi, -1);
  in.q_right = at(lo, 0);
  in.q_stride = meqn;
  if (naux > 0) {
    in.aux_left = aux_at(-1);
    in.aux_right = aux_at(0);
    in.aux_stride = naux;
  }
  RiemannOutput rp;
  solver.solve(in, normal, rp);

  std::vector<double> internal(meqn);
  for (int i = 0; i < n; ++i) {
    solver.internal_fluctuation({at(lo, i), static_cast<std::size_t>(meqn)},
                                {at(hi, i), static_cast<std::size_t>(meqn)}, aux_at(i), normal,
                                internal);
    const double* ap = rp.apdq_at(i);
    const double* am = rp.amdq_at(i + 1);
    const double r = inv_kdx(i);
    double* d = dq.data() + static_cast<std::size_t>(i) * meqn;
    for (int m = 0; m < meqn; ++m) d[m] -= r * (ap[m] + am[m] + internal[m]);
  }

  double rate = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int p = 0; p < rp.num_waves; ++p) {
      const double s = rp.s(i, p);
      rate = std::max({rate, s * inv_kdx(i), -s * inv_kdx(i - 1)});
    }
  return rate;
}

double sharpclaw_rhs(const State& state, const RiemannSolver& solver, const SharpClawConfig& cfg,
                     Field& dqdt) {
  if (!dqdt.same_shape(state.q)) throw Error("rhs output shape does not match the state");
  std::fill(dqdt.values().begin(), dqdt.values().end(), 0.0);
  const int g = state.num_ghost();
  const int meqn = state.num_eqn();
  std::vector<double> qline, auxline, kline, dline;
  double rate = 0.0;
  for (int dim = 0; dim < state.rank(); ++dim) {
    const int n = dim == 0 ? state.patch.nx() : state.patch.ny();
    const int ntrans = state.rank() == 1 ? 1 : (dim == 0 ? state.patch.ny() : state.patch.nx());
    const double dx = state.patch.delta(dim);
    for (int t = 0; t < ntrans; ++t) {
      gather_line(state.q, dim, t, qline);
      if (state.num_aux() > 0) gather_line(state.aux, dim, t, auxline);
      if (state.capacity_index) {
        kline.resize(n + 2 * g);
        for (int c = -g; c < n + g; ++c)
          kline[c + g] = dim == 0 ? state.aux(*state.capacity_index, c, t)
                                  : state.aux(*state.capacity_index, t, c);
      }
      dline.assign(static_cast<std::size_t>(n) * meqn, 0.0);
      rate = std::max(rate, sharpclaw_line_rhs(qline, auxline, kline, n, g, dx, solver, dim, cfg,
                                               dline));
      for (int c = 0; c < n; ++c) {
        double* dst = dim == 0 ? dqdt.cell(c, t) : dqdt.cell(t, c);
        for (int m = 0; m < meqn; ++m) dst[m] += dline[static_cast<std::size_t>(c) * meqn + m];
      }
    }
  }
  return rate;
}

ShuOsherTable ShuOsherTable::ssp33() {
  ShuOsherTable t;
  t.stages = 3;
  t.rows = {
      {{0, 1.0, 1.0}},
      {{0, 3.0 / 4.0, 0.0}, {1, 1.0 / 4.0, 1.0 / 4.0}},
      {{0, 1.0 / 3.0, 0.0}, {2, 2.0 / 3.0, 2.0 / 3.0}},
  };
  return t;
}

ShuOsherTable ShuOsherTable::ssp104() {
  ShuOsherTable t;
  t.stages = 10;
  const double sixth = 1.0 / 6.0;
  for (int i = 1; i <= 4; ++i) t.rows.push_back({{i - 1, 1.0, sixth}});
  t.rows.push_back({{0, 3.0 / 5.0, 0.0}, {4, 2.0 / 5.0, 1.0 / 15.0}});
  for (int i = 6; i <= 9; ++i) t.rows.push_back({{i - 1, 1.0, sixth}});
  t.rows.push_back({{0, 1.0 / 25.0, 0.0},
                    {4, 9.0 / 25.0, 3.0 / 50.0},
                    {9, 3.0 / 5.0, 1.0 / 10.0}});
  return t;
}

ShuOsherTable ShuOsherTable::of(SspIntegrator integrator) {
  return integrator == SspIntegrator::SSP33 ? ssp33() : ssp104();
}

ButcherTableau butcher(const ShuOsherTable& table) {
  const int s = table.stages;
  // coef[i][j]: y_i = u + dt Σ_j coef[i][j] F(y_j).
  std::vector<std::vector<double>> coef(s + 1, std::vector<double>(s, 0.0));
  for (int i = 1; i <= s; ++i) {
    for (const auto& e : table.rows[i - 1]) {
      for (int j = 0; j < s; ++j) coef[i][j] += e.alpha * coef[e.j][j];
      coef[i][e.j] += e.beta;
    }
  }
  ButcherTableau b;
  b.a.assign(coef.begin(), coef.begin() + s);
  b.b = coef[s];
  for (const auto& row : b.a) {
    double c = 0.0;
    for (double v : row) c += v;
    b.c.push_back(c);
  }
  return b;
}

double step_sharpclaw(State& state, const RiemannSolver& solver, double dt,
                      const SharpClawConfig& cfg, const GhostFill& fill) {
  if (!(dt > 0.0)) throw Error("dt must be positive");
  if (state.num_ghost() < cfg.num_ghost())
    throw Error("WENO order " + std::to_string(cfg.weno_order) + " needs " +
                std::to_string(cfg.num_ghost()) + " ghost cells");
  const double t0 = state.t;
  auto rhs = [&](State& y, State& f) {
    fill(y);
    return sharpclaw_rhs(y, solver, cfg, f.q);
  };
  const double rate = ssp_step(state, rhs, dt, ShuOsherTable::of(cfg.integrator));
  state.t = t0;
  return dt * rate;
}

}  // namespace fvclaw
