#include "fvclaw/classic.hpp"

#include <algorithm>
#include <cmath>

namespace fvclaw {

LimiterKind parse_limiter(const std::string& name) {
  if (name == "none") return LimiterKind::None;
  if (name == "minmod") return LimiterKind::Minmod;
  if (name == "superbee") return LimiterKind::Superbee;
  if (name == "mc") return LimiterKind::MC;
  if (name == "vanleer") return LimiterKind::VanLeer;
  throw Error("unknown limiter '" + name + "' (expected mc|minmod|superbee|vanleer|none)");
}

std::string to_string(LimiterKind kind) {
  switch (kind) {
    case LimiterKind::None: return "none";
    case LimiterKind::Minmod: return "minmod";
    case LimiterKind::Superbee: return "superbee";
    case LimiterKind::MC: return "mc";
    case LimiterKind::VanLeer: return "vanleer";
  }
  return "?";
}

double limiter_value(double theta, LimiterKind kind) {
  switch (kind) {
    case LimiterKind::None:
      return 1.0;
    case LimiterKind::Minmod:
      return std::max(0.0, std::min(1.0, theta));
    case LimiterKind::Superbee:
      return std::max({0.0, std::min(1.0, 2.0 * theta), std::min(2.0, theta)});
    case LimiterKind::MC:
      return std::max(0.0, std::min({(1.0 + theta) / 2.0, 2.0, 2.0 * theta}));
    case LimiterKind::VanLeer:
      return (theta + std::abs(theta)) / (1.0 + std::abs(theta));
  }
  return 1.0;
}

void ClassicConfig::validate() const {
  if (order != 1 && order != 2) throw Error("classic order must be 1 or 2");
  if (limiters.empty()) throw Error("classic solver needs at least one limiter");
  if (!(cfl_desired > 0.0) || cfl_desired > cfl_max || cfl_max > 1.0)
    throw Error("classic solver needs 0 < cfl_desired <= cfl_max <= 1");
}

double classic_sweep(std::span<double> line, std::span<const double> aux,
                     std::span<const double> kappa, int n, int g, double dt, double dx,
                     const RiemannSolver& solver, int normal, const ClassicConfig& cfg) {
  if (g < 2) throw Error("classic solver needs at least 2 ghost cells");
  const int meqn = solver.num_eqn();
  const int mw = solver.num_waves();
  const int cells = n + 2 * g;
  const int naux = aux.empty() ? 0 : static_cast<int>(aux.size() / cells);
  auto q = [&](int c) { return line.data() + static_cast<std::size_t>(c + g) * meqn; };
  auto dtdx = [&](int c) { return dt / (dx * (kappa.empty() ? 1.0 : kappa[c + g])); };

  // Interface i (i = 1-g .. n+g-1) separates cells i-1 and i; stored at k = i-(1-g).
  const int first = 1 - g;
  const int num_if = cells - 1;
  InterfaceStates in;
  in.size = num_if;
  in.q_left = q(first - 1);
  in.q_right = q(first);
  in.q_stride = meqn;
  if (naux > 0) {
    in.aux_left = aux.data();
    in.aux_right = aux.data() + naux;
    in.aux_stride = naux;
  }
  RiemannOutput rp;
  solver.solve(in, normal, rp);
  auto K = [&](int i) { return i - first; };

  std::vector<double> updated(static_cast<std::size_t>(n) * meqn);
  for (int i = 0; i < n; ++i) {
    const double* ap = rp.apdq_at(K(i));
    const double* am = rp.amdq_at(K(i + 1));
    const double r = dtdx(i);
    const double* qi = q(i);
    for (int m = 0; m < meqn; ++m) updated[static_cast<std::size_t>(i) * meqn + m] = qi[m] - r * (ap[m] + am[m]);
  }

  double cfl = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int p = 0; p < mw; ++p) {
      const double s = rp.s(K(i), p);
      cfl = std::max({cfl, dtdx(i) * s, -dtdx(i - 1) * s});
    }

  if (cfg.order == 2) {
    std::vector<double> ftilde(static_cast<std::size_t>(n + 1) * meqn, 0.0);
    std::vector<double> limited(meqn);
    for (int i = 0; i <= n; ++i) {
      const double dtdx_ave = 0.5 * (dtdx(i - 1) + dtdx(i));
      double* fi = ftilde.data() + static_cast<std::size_t>(i) * meqn;
      for (int p = 0; p < mw; ++p) {
        const double s = rp.s(K(i), p);
        const double* w = rp.wave_at(K(i), p);
        double wnorm2 = 0.0;
        for (int m = 0; m < meqn; ++m) wnorm2 += w[m] * w[m];
        if (wnorm2 == 0.0) continue;
        double phi = 1.0;
        const LimiterKind kind = cfg.limiter(p);
        if (kind != LimiterKind::None) {
          const int upwind = s > 0.0 ? i - 1 : i + 1;
          const double* wu = rp.wave_at(K(upwind), p);
          double dot = 0.0;
          for (int m = 0; m < meqn; ++m) dot += wu[m] * w[m];
          phi = limiter_value(dot / wnorm2, kind);
        }
        const double abs_s = std::abs(s);
        const double factor =
            0.5 * (rp.fwave ? (s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0)) : abs_s) *
            (1.0 - abs_s * dtdx_ave) * phi;
        for (int m = 0; m < meqn; ++m) fi[m] += factor * w[m];
      }
    }
    for (int i = 0; i < n; ++i) {
      const double r = dtdx(i);
      const double* fl = ftilde.data() + static_cast<std::size_t>(i) * meqn;
      const double* fr = fl + meqn;
      for (int m = 0; m < meqn; ++m)
        updated[static_cast<std::size_t>(i) * meqn + m] -= r * (fr[m] - fl[m]);
    }
  }

  std::copy(updated.begin(), updated.end(), q(0));
  return cfl;
}

double sweep_classic(State& state, const RiemannSolver& solver, double dt,
                     const ClassicConfig& cfg, int dim) {
  const int g = state.num_ghost();
  const int n = dim == 0 ? state.patch.nx() : state.patch.ny();
  const int ntrans = state.rank() == 1 ? 1 : (dim == 0 ? state.patch.ny() : state.patch.nx());
  const double dx = state.patch.delta(dim);
  std::vector<double> qline, auxline, kline;
  double cfl = 0.0;
  for (int t = 0; t < ntrans; ++t) {
    gather_line(state.q, dim, t, qline);
    if (state.num_aux() > 0) gather_line(state.aux, dim, t, auxline);
    if (state.capacity_index) {
      kline.resize(n + 2 * g);
      for (int c = -g; c < n + g; ++c)
        kline[c + g] = dim == 0 ? state.aux(*state.capacity_index, c, t)
                                : state.aux(*state.capacity_index, t, c);
    }
    cfl = std::max(cfl, classic_sweep(qline, auxline, kline, n, g, dt, dx, solver, dim, cfg));
    scatter_line_interior(state.q, dim, t, qline);
  }
  return cfl;
}

double step1d_classic(State& state, const RiemannSolver& solver, double dt,
                      const ClassicConfig& cfg) {
  if (state.rank() != 1) throw Error("step1d_classic needs a rank-1 state");
  if (!(dt > 0.0)) throw Error("dt must be positive");
  return sweep_classic(state, solver, dt, cfg, 0);
}

double step2d_classic(State& state, const RiemannSolver& solver, double dt,
                      const ClassicConfig& cfg, const GhostFill& fill) {
  if (state.rank() != 2) throw Error("step2d_classic needs a rank-2 state");
  if (!(dt > 0.0)) throw Error("dt must be positive");
  double cfl = sweep_classic(state, solver, 0.5 * dt, cfg, 0);
  fill(state);
  cfl = std::max(cfl, sweep_classic(state, solver, dt, cfg, 1));
  fill(state);
  cfl = std::max(cfl, sweep_classic(state, solver, 0.5 * dt, cfg, 0));
  return cfl;
}

}  // namespace fvclaw
