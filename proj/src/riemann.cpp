#include "fvclaw/riemann.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace fvclaw {

void RiemannOutput::resize(int m, int mw, int n) {
  num_eqn = m;
  num_waves = mw;
  size = n;
  wave.assign(static_cast<std::size_t>(n) * mw * m, 0.0);
  speed.assign(static_cast<std::size_t>(n) * mw, 0.0);
  amdq.assign(static_cast<std::size_t>(n) * m, 0.0);
  apdq.assign(static_cast<std::size_t>(n) * m, 0.0);
}

InterfaceStates single_interface(std::span<const double> ql, std::span<const double> qr,
                                 std::span<const double> aux_l, std::span<const double> aux_r) {
  InterfaceStates in;
  in.size = 1;
  in.q_left = ql.data();
  in.q_right = qr.data();
  in.q_stride = static_cast<int>(ql.size());
  if (!aux_l.empty()) {
    in.aux_left = aux_l.data();
    in.aux_right = aux_r.data();
    in.aux_stride = static_cast<int>(aux_l.size());
  }
  return in;
}

void RiemannSolver::internal_fluctuation(std::span<const double> q_lo,
                                         std::span<const double> q_hi, const double* aux,
                                         int normal, std::span<double> out) const {
  std::array<double, 16> f_lo{};
  std::array<double, 16> f_hi{};
  const auto m = static_cast<std::size_t>(num_eqn());
  flux(q_lo, aux, normal, std::span(f_lo).first(m));
  flux(q_hi, aux, normal, std::span(f_hi).first(m));
  for (std::size_t i = 0; i < m; ++i) out[i] = f_hi[i] - f_lo[i];
}

namespace {

// Splits Σ s_p W_p into left/right-going parts by the sign of each speed.
void upwind_fluctuations(RiemannOutput& out, int k) {
  double* am = out.amdq_at(k);
  double* ap = out.apdq_at(k);
  for (int m = 0; m < out.num_eqn; ++m) am[m] = ap[m] = 0.0;
  for (int p = 0; p < out.num_waves; ++p) {
    double s = out.s(k, p);
    const double* w = out.wave_at(k, p);
    double sm = std::min(s, 0.0);
    double sp = std::max(s, 0.0);
    for (int m = 0; m < out.num_eqn; ++m) {
      am[m] += sm * w[m];
      ap[m] += sp * w[m];
    }
  }
}

void check_normal(int normal, int dims) {
  if (normal < 0 || normal >= dims) throw Error("normal direction out of range");
}

}  // namespace

// ---------------------------------------------------------------- advection

Advection::Advection(std::vector<double> velocity) : velocity_(std::move(velocity)) {
  if (velocity_.empty() || velocity_.size() > 2) throw Error("advection needs 1 or 2 velocities");
}

void Advection::solve(const InterfaceStates& in, int normal, RiemannOutput& out) const {
  check_normal(normal, dims());
  out.resize(1, 1, in.size);
  const double u = velocity_[normal];
  for (int k = 0; k < in.size; ++k) {
    double w = in.qr(k, 1)[0] - in.ql(k, 1)[0];
    out.W(k, 0, 0) = w;
    out.s(k, 0) = u;
    out.amdq[k] = std::min(u, 0.0) * w;
    out.apdq[k] = std::max(u, 0.0) * w;
  }
}

void Advection::flux(std::span<const double> q, const double*, int normal,
                     std::span<double> f) const {
  f[0] = velocity_[normal] * q[0];
}

// ---------------------------------------------------------------- acoustics

Acoustics::Acoustics(int dims, double rho, double bulk) : dims_(dims), rho_(rho), bulk_(bulk) {
  if (dims < 1 || dims > 2) throw Error("acoustics: dims must be 1 or 2");
  if (!(rho > 0.0) || !(bulk > 0.0)) throw Error("acoustics: material parameters must be positive");
}

Acoustics Acoustics::variable(int dims) {
  if (dims < 1 || dims > 2) throw Error("acoustics: dims must be 1 or 2");
  Acoustics a;
  a.dims_ = dims;
  a.variable_ = true;
  return a;
}

void Acoustics::material(const double* aux, double& rho, double& bulk) const {
  if (variable_) {
    if (!aux) throw Error("acoustics: variable material needs aux (rho, K)");
    rho = aux[0];
    bulk = aux[1];
    if (!(rho > 0.0) || !(bulk > 0.0))
      throw Error("acoustics: material parameters must be positive");
  } else {
    rho = rho_;
    bulk = bulk_;
  }
}

void Acoustics::solve(const InterfaceStates& in, int normal, RiemannOutput& out) const {
  check_normal(normal, dims_);
  const int meqn = num_eqn();
  const int mn = 1 + normal;
  const int mt = 2 - normal;
  const int right_wave = dims_ == 2 ? 2 : 1;
  out.resize(meqn, num_waves(), in.size);
  for (int k = 0; k < in.size; ++k) {
    auto ql = in.ql(k, meqn);
    auto qr = in.qr(k, meqn);
    double rho_l, bulk_l, rho_r, bulk_r;
    material(in.al(k), rho_l, bulk_l);
    material(in.ar(k), rho_r, bulk_r);
    const double c_l = std::sqrt(bulk_l / rho_l);
    const double c_r = std::sqrt(bulk_r / rho_r);
    const double z_l = rho_l * c_l;
    const double z_r = rho_r * c_r;
    const double dp = qr[0] - ql[0];
    const double du = qr[mn] - ql[mn];
    const double a1 = (-dp + z_r * du) / (z_l + z_r);
    const double a2 = (dp + z_l * du) / (z_l + z_r);

    out.W(k, 0, 0) = -a1 * z_l;
    out.W(k, 0, mn) = a1;
    out.s(k, 0) = -c_l;
    out.W(k, right_wave, 0) = a2 * z_r;
    out.W(k, right_wave, mn) = a2;
    out.s(k, right_wave) = c_r;
    if (dims_ == 2) {
      out.W(k, 1, mt) = qr[mt] - ql[mt];
      out.s(k, 1) = 0.0;
    }
    upwind_fluctuations(out, k);
  }
}

void Acoustics::flux(std::span<const double> q, const double* aux, int normal,
                     std::span<double> f) const {
  double rho, bulk;
  material(aux, rho, bulk);
  const int mn = 1 + normal;
  f[0] = bulk * q[mn];
  f[mn] = q[0] / rho;
  if (dims_ == 2) f[2 - normal] = 0.0;
}

// ---------------------------------------------------------------- shallow water

ShallowWater::ShallowWater(int dims, double gravity, bool entropy_fix)
    : dims_(dims), g_(gravity), efix_(entropy_fix) {
  if (dims < 1 || dims > 2) throw Error("shallow water: dims must be 1 or 2");
  if (!(gravity > 0.0)) throw Error("shallow water: gravity must be positive");
}

void ShallowWater::solve(const InterfaceStates& in, int normal, RiemannOutput& out) const {
  check_normal(normal, dims_);
  const int meqn = num_eqn();
  const int mw = num_waves();
  const int mn = 1 + normal;
  const int mt = 2 - normal;
  const int last = mw - 1;
  out.resize(meqn, mw, in.size);
  for (int k = 0; k < in.size; ++k) {
    auto ql = in.ql(k, meqn);
    auto qr = in.qr(k, meqn);
    const double hl = ql[0];
    const double hr = qr[0];
    if (!(hl > 0.0) || !(hr > 0.0)) throw Error("shallow water: non-positive depth");
    const double ul = ql[mn] / hl;
    const double ur = qr[mn] / hr;
    const double sl = std::sqrt(hl);
    const double sr = std::sqrt(hr);
    const double u = (sl * ul + sr * ur) / (sl + sr);
    const double hbar = 0.5 * (hl + hr);
    const double c = std::sqrt(g_ * hbar);
    const double d0 = hr - hl;
    const double d1 = qr[mn] - ql[mn];
    const double a1 = ((u + c) * d0 - d1) / (2.0 * c);
    const double a3 = (-(u - c) * d0 + d1) / (2.0 * c);

    double v = 0.0;
    if (dims_ == 2) {
      const double vl = ql[mt] / hl;
      const double vr = qr[mt] / hr;
      v = (sl * vl + sr * vr) / (sl + sr);
      const double a2 = (qr[mt] - ql[mt]) - v * d0;
      out.W(k, 1, mt) = a2;
      out.s(k, 1) = u;
    }
    out.W(k, 0, 0) = a1;
    out.W(k, 0, mn) = a1 * (u - c);
    out.s(k, 0) = u - c;
    out.W(k, last, 0) = a3;
    out.W(k, last, mn) = a3 * (u + c);
    out.s(k, last) = u + c;
    if (dims_ == 2) {
      out.W(k, 0, mt) = a1 * v;
      out.W(k, last, mt) = a3 * v;
    }

    if (!efix_) {
      upwind_fluctuations(out, k);
      continue;
    }

    // Harten–Hyman: split a transonic rarefaction between both sides.
    double* am = out.amdq_at(k);
    double* ap = out.apdq_at(k);
    for (int m = 0; m < meqn; ++m) am[m] = 0.0;
    const double s0 = ul - std::sqrt(g_ * hl);
    const double* w1 = out.wave_at(k, 0);
    const double h1 = hl + w1[0];
    const double s1 = h1 > 0.0 ? (ql[mn] + w1[mn]) / h1 - std::sqrt(g_ * h1) : out.s(k, 0);
    double sfract;
    if (s0 < 0.0 && s1 > 0.0)
      sfract = s0 * (s1 - out.s(k, 0)) / (s1 - s0);
    else
      sfract = std::min(out.s(k, 0), 0.0);
    for (int m = 0; m < meqn; ++m) am[m] += sfract * w1[m];

    bool check_last = true;
    if (dims_ == 2) {
      if (out.s(k, 1) < 0.0) {
        for (int m = 0; m < meqn; ++m) am[m] += out.s(k, 1) * out.W(k, 1, m);
      } else {
        check_last = false;
      }
    }
    if (check_last) {
      const double* w3 = out.wave_at(k, last);
      const double s3r = ur + std::sqrt(g_ * hr);
      const double h2 = hr - w3[0];
      const double s2 = h2 > 0.0 ? (qr[mn] - w3[mn]) / h2 + std::sqrt(g_ * h2) : out.s(k, last);
      if (s2 < 0.0 && s3r > 0.0)
        sfract = s2 * (s3r - out.s(k, last)) / (s3r - s2);
      else
        sfract = std::min(out.s(k, last), 0.0);
      for (int m = 0; m < meqn; ++m) am[m] += sfract * w3[m];
    }
    for (int m = 0; m < meqn; ++m) {
      double total = 0.0;
      for (int p = 0; p < mw; ++p) total += out.s(k, p) * out.W(k, p, m);
      ap[m] = total - am[m];
    }
  }
}

void ShallowWater::flux(std::span<const double> q, const double*, int normal,
                        std::span<double> f) const {
  const int mn = 1 + normal;
  const double h = q[0];
  const double un = q[mn] / h;
  f[0] = q[mn];
  f[mn] = q[mn] * un + 0.5 * g_ * h * h;
  if (dims_ == 2) f[2 - normal] = q[2 - normal] * un;
}

// ---------------------------------------------------------------- Euler

Euler::Euler(int dims, double gamma, bool tracer, bool entropy_fix)
    : dims_(dims), gamma_(gamma), tracer_(tracer), efix_(entropy_fix) {
  if (dims < 1 || dims > 2) throw Error("euler: dims must be 1 or 2");
  if (!(gamma > 1.0)) throw Error("euler: gamma must exceed 1");
}

double Euler::pressure(std::span<const double> q) const {
  double ke = 0.0;
  for (int d = 0; d < dims_; ++d) ke += q[1 + d] * q[1 + d];
  return (gamma_ - 1.0) * (q[energy_index()] - 0.5 * ke / q[0]);
}

void Euler::solve(const InterfaceStates& in, int normal, RiemannOutput& out) const {
  check_normal(normal, dims_);
  const int meqn = num_eqn();
  const int mw = num_waves();
  const int mn = 1 + normal;
  const int mt = dims_ == 2 ? 2 - normal : -1;
  const int me = energy_index();
  const int mtr = tracer_ ? me + 1 : -1;
  const double g1 = gamma_ - 1.0;
  out.resize(meqn, mw, in.size);

  for (int k = 0; k < in.size; ++k) {
    auto ql = in.ql(k, meqn);
    auto qr = in.qr(k, meqn);
    const double rl = ql[0];
    const double rr = qr[0];
    if (!(rl > 0.0) || !(rr > 0.0)) throw Error("euler: non-positive density");
    const double pl = pressure(ql);
    const double pr = pressure(qr);
    if (!(pl > 0.0) || !(pr > 0.0)) throw Error("euler: non-positive pressure");

    const double sl = std::sqrt(rl);
    const double sr = std::sqrt(rr);
    const double sw = sl + sr;
    const double u = (ql[mn] / sl + qr[mn] / sr) / sw;
    const double v = mt >= 0 ? (ql[mt] / sl + qr[mt] / sr) / sw : 0.0;
    const double enth = ((ql[me] + pl) / sl + (qr[me] + pr) / sr) / sw;
    const double u2v2 = u * u + v * v;
    const double a2 = g1 * (enth - 0.5 * u2v2);
    if (!(a2 > 0.0)) throw Error("euler: Roe average has imaginary sound speed");
    const double a = std::sqrt(a2);

    const double d0 = qr[0] - ql[0];
    const double dn = qr[mn] - ql[mn];
    const double dt = mt >= 0 ? qr[mt] - ql[mt] : 0.0;
    const double de = qr[me] - ql[me];
    const double a3 = g1 / a2 * ((enth - u2v2) * d0 + u * dn + v * dt - de);
    const double shear = dt - v * d0;
    const double a4 = (dn + (a - u) * d0 - a * a3) / (2.0 * a);
    const double a1 = d0 - a3 - a4;

    out.W(k, 0, 0) = a1;
    out.W(k, 0, mn) = a1 * (u - a);
    out.W(k, 0, me) = a1 * (enth - u * a);
    out.s(k, 0) = u - a;

    out.W(k, 1, 0) = a3;
    out.W(k, 1, mn) = a3 * u;
    out.W(k, 1, me) = a3 * 0.5 * u2v2 + shear * v;
    out.s(k, 1) = u;

    out.W(k, 2, 0) = a4;
    out.W(k, 2, mn) = a4 * (u + a);
    out.W(k, 2, me) = a4 * (enth + u * a);
    out.s(k, 2) = u + a;

    if (mt >= 0) {
      out.W(k, 0, mt) = a1 * v;
      out.W(k, 1, mt) = a3 * v + shear;
      out.W(k, 2, mt) = a4 * v;
    }
    if (tracer_) {
      out.W(k, 3, mtr) = qr[mtr] - ql[mtr];
      out.s(k, 3) = u;
    }

    if (!efix_) {
      upwind_fluctuations(out, k);
      continue;
    }

    auto sound = [&](std::span<const double> q) {
      double p = pressure(q);
      return (q[0] > 0.0 && p > 0.0) ? std::sqrt(gamma_ * p / q[0]) : -1.0;
    };

    double* am = out.amdq_at(k);
    double* ap = out.apdq_at(k);
    for (int m = 0; m < meqn; ++m) am[m] = 0.0;

    std::array<double, 8> tmp{};
    auto mid = std::span(tmp).first(static_cast<std::size_t>(meqn));

    // 1-wave
    const double s0 = ql[mn] / rl - sound(ql);
    for (int m = 0; m < meqn; ++m) mid[m] = ql[m] + out.W(k, 0, m);
    const double c1 = sound(mid);
    const double s1 = c1 > 0.0 ? mid[mn] / mid[0] - c1 : out.s(k, 0);
    double sfract;
    if (s0 < 0.0 && s1 > 0.0)
      sfract = s0 * (s1 - out.s(k, 0)) / (s1 - s0);
    else
      sfract = std::min(out.s(k, 0), 0.0);
    for (int m = 0; m < meqn; ++m) am[m] += sfract * out.W(k, 0, m);

    // contact (and tracer) waves, then the 3-wave
    if (out.s(k, 1) < 0.0) {
      for (int p = 1; p < mw; ++p) {
        if (p == 2) continue;
        for (int m = 0; m < meqn; ++m) am[m] += out.s(k, p) * out.W(k, p, m);
      }
      const double s3r = qr[mn] / rr + sound(qr);
      for (int m = 0; m < meqn; ++m) mid[m] = qr[m] - out.W(k, 2, m);
      const double c2 = sound(mid);
      const double s2 = c2 > 0.0 ? mid[mn] / mid[0] + c2 : out.s(k, 2);
      if (s2 < 0.0 && s3r > 0.0)
        sfract = s2 * (s3r - out.s(k, 2)) / (s3r - s2);
      else
        sfract = std::min(out.s(k, 2), 0.0);
      for (int m = 0; m < meqn; ++m) am[m] += sfract * out.W(k, 2, m);
    }
    for (int m = 0; m < meqn; ++m) {
      double total = 0.0;
      for (int p = 0; p < mw; ++p) total += out.s(k, p) * out.W(k, p, m);
      ap[m] = total - am[m];
    }
  }
}

void Euler::flux(std::span<const double> q, const double*, int normal,
                 std::span<double> f) const {
  const int mn = 1 + normal;
  const int me = energy_index();
  const double un = q[mn] / q[0];
  const double p = pressure(q);
  f[0] = q[mn];
  for (int d = 0; d < dims_; ++d) f[1 + d] = q[1 + d] * un;
  f[mn] += p;
  f[me] = (q[me] + p) * un;
  // A passive tracer has no flux; its within-cell term is handled by
  // internal_fluctuation.
  if (tracer_) f[me + 1] = 0.0;
}

void Euler::internal_fluctuation(std::span<const double> q_lo, std::span<const double> q_hi,
                                 const double* aux, int normal, std::span<double> out) const {
  RiemannSolver::internal_fluctuation(q_lo, q_hi, aux, normal, out);
  if (!tracer_) return;
  const int mn = 1 + normal;
  const int mtr = energy_index() + 1;
  const double sl = std::sqrt(q_lo[0]);
  const double sr = std::sqrt(q_hi[0]);
  const double u = (q_lo[mn] / sl + q_hi[mn] / sr) / (sl + sr);
  out[mtr] = u * (q_hi[mtr] - q_lo[mtr]);
}

// ---------------------------------------------------------------- p-system

PSystem::PSystem(int dims) : dims_(dims) {
  if (dims < 1 || dims > 2) throw Error("p-system: dims must be 1 or 2");
}

void PSystem::flux(std::span<const double> q, const double* aux, int normal,
                   std::span<double> f) const {
  if (!aux) throw Error("p-system needs aux (rho, K)");
  const int mn = 1 + normal;
  f[0] = -q[mn] / aux[0];
  f[mn] = -stress(q[0], aux[1]);
  if (dims_ == 2) f[2 - normal] = 0.0;
}

void PSystem::solve(const InterfaceStates& in, int normal, RiemannOutput& out) const {
  check_normal(normal, dims_);
  if (!in.aux_left || !in.aux_right) throw Error("p-system needs aux (rho, K)");
  const int meqn = num_eqn();
  const int mn = 1 + normal;
  out.resize(meqn, 2, in.size);
  out.fwave = true;
  std::array<double, 3> fl{};
  std::array<double, 3> fr{};
  for (int k = 0; k < in.size; ++k) {
    auto ql = in.ql(k, meqn);
    auto qr = in.qr(k, meqn);
    const double* al = in.al(k);
    const double* ar = in.ar(k);
    const double rho_l = al[0], bulk_l = al[1];
    const double rho_r = ar[0], bulk_r = ar[1];
    if (!(rho_l > 0.0) || !(rho_r > 0.0) || !(bulk_l > 0.0) || !(bulk_r > 0.0))
      throw Error("p-system: non-positive rho or K");
    flux(ql, al, normal, std::span(fl).first(meqn));
    flux(qr, ar, normal, std::span(fr).first(meqn));
    const double df0 = fr[0] - fl[0];
    const double df1 = fr[mn] - fl[mn];
    const double ds_l = stress_derivative(ql[0], bulk_l);
    const double ds_r = stress_derivative(qr[0], bulk_r);
    const double z_l = std::sqrt(rho_l * ds_l);
    const double z_r = std::sqrt(rho_r * ds_r);
    const double b1 = (z_r * df0 + df1) / (z_l + z_r);
    const double b2 = (z_l * df0 - df1) / (z_l + z_r);

    out.W(k, 0, 0) = b1;
    out.W(k, 0, mn) = b1 * z_l;
    out.s(k, 0) = -std::sqrt(ds_l / rho_l);
    out.W(k, 1, 0) = b2;
    out.W(k, 1, mn) = -b2 * z_r;
    out.s(k, 1) = std::sqrt(ds_r / rho_r);

    double* am = out.amdq_at(k);
    double* ap = out.apdq_at(k);
    for (int m = 0; m < meqn; ++m) {
      am[m] = out.W(k, 0, m);
      ap[m] = out.W(k, 1, m);
    }
  }
}

}  // namespace fvclaw
