#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "fvclaw/geometry.hpp"

namespace testing_support {

inline fvclaw::State line_state(std::vector<double> values, int num_ghost, double lower = 0.0,
                                double upper = 1.0) {
  const int n = static_cast<int>(values.size());
  fvclaw::State s(fvclaw::Patch::whole({fvclaw::Dimension("x", lower, upper, n)}), 1, 0, num_ghost);
  for (int i = 0; i < n; ++i) s.q(0, i) = values[i];
  return s;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1.0});
  return std::abs(a - b) / scale;
}

inline double total_variation(const fvclaw::State& s) {
  double tv = 0.0;
  for (int i = 1; i < s.patch.nx(); ++i) tv += std::abs(s.q(0, i) - s.q(0, i - 1));
  // periodic closure
  tv += std::abs(s.q(0, 0) - s.q(0, s.patch.nx() - 1));
  return tv;
}

/// Exact Riemann solver for the 1D Euler equations of an ideal gas
/// (two-rarefaction/two-shock pressure function with Newton iteration).
struct ExactEuler {
  double gamma;
  double rho_l, u_l, p_l, rho_r, u_r, p_r;
  double p_star = 0.0, u_star = 0.0;

  double sound(double rho, double p) const { return std::sqrt(gamma * p / rho); }

  void side(double p, double rho, double pk, double& f, double& df) const {
    const double a = sound(rho, pk);
    if (p > pk) {
      const double A = 2.0 / ((gamma + 1.0) * rho);
      const double B = (gamma - 1.0) / (gamma + 1.0) * pk;
      const double q = std::sqrt(A / (p + B));
      f = (p - pk) * q;
      df = q * (1.0 - 0.5 * (p - pk) / (B + p));
    } else {
      const double r = p / pk;
      f = 2.0 * a / (gamma - 1.0) * (std::pow(r, (gamma - 1.0) / (2.0 * gamma)) - 1.0);
      df = 1.0 / (rho * a) * std::pow(r, -(gamma + 1.0) / (2.0 * gamma));
    }
  }

  void solve() {
    double p = 0.5 * (p_l + p_r);
    for (int it = 0; it < 100; ++it) {
      double fl, dfl, fr, dfr;
      side(p, rho_l, p_l, fl, dfl);
      side(p, rho_r, p_r, fr, dfr);
      const double step = (fl + fr + (u_r - u_l)) / (dfl + dfr);
      p = std::max(1e-12, p - step);
      if (std::abs(step) < 1e-14 * p) break;
    }
    double fl, dfl, fr, dfr;
    side(p, rho_l, p_l, fl, dfl);
    side(p, rho_r, p_r, fr, dfr);
    p_star = p;
    u_star = 0.5 * (u_l + u_r) + 0.5 * (fr - fl);
  }

  /// Speeds of the left-family head/tail (equal for a shock), contact,
  /// and right-family tail/head.
  std::vector<double> signal_speeds() const {
    const double al = sound(rho_l, p_l), ar = sound(rho_r, p_r);
    std::vector<double> s;
    if (p_star > p_l) {
      const double sl = u_l - al * std::sqrt((gamma + 1.0) / (2.0 * gamma) * p_star / p_l +
                                             (gamma - 1.0) / (2.0 * gamma));
      s.push_back(sl);
      s.push_back(sl);
    } else {
      const double a_star = al * std::pow(p_star / p_l, (gamma - 1.0) / (2.0 * gamma));
      s.push_back(u_l - al);
      s.push_back(u_star - a_star);
    }
    s.push_back(u_star);
    if (p_star > p_r) {
      const double sr = u_r + ar * std::sqrt((gamma + 1.0) / (2.0 * gamma) * p_star / p_r +
                                             (gamma - 1.0) / (2.0 * gamma));
      s.push_back(sr);
      s.push_back(sr);
    } else {
      const double a_star = ar * std::pow(p_star / p_r, (gamma - 1.0) / (2.0 * gamma));
      s.push_back(u_star + a_star);
      s.push_back(u_r + ar);
    }
    return s;
  }
};

}  // namespace testing_support
