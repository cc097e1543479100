#pragma once

// Interface Riemann solvers. Every solver works on a whole sweep of
// interfaces at once: interface k separates state q_left[k] (left) from
// q_right[k] (right), and the normal direction selects which velocity
// component is treated as normal in 2D.

#include <cmath>
#include <span>
#include <vector>

#include "fvclaw/geometry.hpp"

namespace fvclaw {

struct RiemannOutput {
  int num_eqn = 0;
  int num_waves = 0;
  int size = 0;
  /// Waves are flux jumps (f-waves) rather than state jumps.
  bool fwave = false;
  std::vector<double> wave;   // [k][p][m]
  std::vector<double> speed;  // [k][p]
  std::vector<double> amdq;   // [k][m]  left-going fluctuation A-dQ
  std::vector<double> apdq;   // [k][m]  right-going fluctuation A+dQ

  void resize(int num_eqn, int num_waves, int size);
  double& W(int k, int p, int m) { return wave[(static_cast<std::size_t>(k) * num_waves + p) * num_eqn + m]; }
  double W(int k, int p, int m) const { return wave[(static_cast<std::size_t>(k) * num_waves + p) * num_eqn + m]; }
  double& s(int k, int p) { return speed[static_cast<std::size_t>(k) * num_waves + p]; }
  double s(int k, int p) const { return speed[static_cast<std::size_t>(k) * num_waves + p]; }
  double* wave_at(int k, int p) { return &W(k, p, 0); }
  const double* wave_at(int k, int p) const {
    return wave.data() + (static_cast<std::size_t>(k) * num_waves + p) * num_eqn;
  }
  double* amdq_at(int k) { return amdq.data() + static_cast<std::size_t>(k) * num_eqn; }
  double* apdq_at(int k) { return apdq.data() + static_cast<std::size_t>(k) * num_eqn; }
  const double* amdq_at(int k) const { return amdq.data() + static_cast<std::size_t>(k) * num_eqn; }
  const double* apdq_at(int k) const { return apdq.data() + static_cast<std::size_t>(k) * num_eqn; }
};

/// States on both sides of `size` consecutive interfaces. Entry k of q_left
/// starts at q_left + k*q_stride; aux likewise with aux_stride (aux may be
/// null when the solver needs none).
struct InterfaceStates {
  int size = 0;
  const double* q_left = nullptr;
  const double* q_right = nullptr;
  int q_stride = 0;
  const double* aux_left = nullptr;
  const double* aux_right = nullptr;
  int aux_stride = 0;

  std::span<const double> ql(int k, int n) const { return {q_left + static_cast<std::size_t>(k) * q_stride, static_cast<std::size_t>(n)}; }
  std::span<const double> qr(int k, int n) const { return {q_right + static_cast<std::size_t>(k) * q_stride, static_cast<std::size_t>(n)}; }
  const double* al(int k) const { return aux_left ? aux_left + static_cast<std::size_t>(k) * aux_stride : nullptr; }
  const double* ar(int k) const { return aux_right ? aux_right + static_cast<std::size_t>(k) * aux_stride : nullptr; }
};

/// Convenience for a single interface.
InterfaceStates single_interface(std::span<const double> ql, std::span<const double> qr,
                                 std::span<const double> aux_l = {},
                                 std::span<const double> aux_r = {});

class RiemannSolver {
 public:
  virtual ~RiemannSolver() = default;

  virtual int num_eqn() const = 0;
  virtual int num_waves() const = 0;
  /// Number of leading aux entries the solver reads.
  virtual int num_aux() const { return 0; }
  /// Spatial dimensions the state vector is laid out for (1 or 2).
  virtual int dims() const = 0;
  virtual bool fwave() const { return false; }

  virtual void solve(const InterfaceStates& in, int normal, RiemannOutput& out) const = 0;

  /// Physical flux in the normal direction.
  virtual void flux(std::span<const double> q, const double* aux, int normal,
                    std::span<double> f) const = 0;

  /// Within-cell fluctuation between reconstructed edge values q_lo (left
  /// edge) and q_hi (right edge) using the cell's own coefficients. Defaults
  /// to the flux difference f(q_hi) - f(q_lo).
  virtual void internal_fluctuation(std::span<const double> q_lo, std::span<const double> q_hi,
                                    const double* aux, int normal, std::span<double> out) const;
};

/// Scalar advection q_t + u·∇q = 0 with a constant velocity per direction.
class Advection final : public RiemannSolver {
 public:
  explicit Advection(std::vector<double> velocity);
  int num_eqn() const override { return 1; }
  int num_waves() const override { return 1; }
  int dims() const override { return static_cast<int>(velocity_.size()); }
  void solve(const InterfaceStates& in, int normal, RiemannOutput& out) const override;
  void flux(std::span<const double> q, const double* aux, int normal, std::span<double> f) const override;

 private:
  std::vector<double> velocity_;
};

/// Linear acoustics, q = (p, u[, v]). Material (ρ, K) is either constant or
/// read from aux entries (0, 1) per cell. In 2D the transverse velocity jump
/// is carried by a zero-speed wave.
class Acoustics final : public RiemannSolver {
 public:
  Acoustics(int dims, double rho, double bulk);
  static Acoustics variable(int dims);

  int num_eqn() const override { return 1 + dims_; }
  int num_waves() const override { return dims_ == 2 ? 3 : 2; }
  int num_aux() const override { return variable_ ? 2 : 0; }
  int dims() const override { return dims_; }
  void solve(const InterfaceStates& in, int normal, RiemannOutput& out) const override;
  void flux(std::span<const double> q, const double* aux, int normal, std::span<double> f) const override;

 private:
  Acoustics() = default;
  void material(const double* aux, double& rho, double& bulk) const;
  int dims_ = 1;
  double rho_ = 1.0;
  double bulk_ = 1.0;
  bool variable_ = false;
};

/// Shallow water, q = (h, hu[, hv]), Roe linearization with the
/// Harten–Hyman entropy fix.
class ShallowWater final : public RiemannSolver {
 public:
  ShallowWater(int dims, double gravity, bool entropy_fix = true);
  int num_eqn() const override { return 1 + dims_; }
  int num_waves() const override { return 1 + dims_; }
  int dims() const override { return dims_; }
  double gravity() const { return g_; }
  void solve(const InterfaceStates& in, int normal, RiemannOutput& out) const override;
  void flux(std::span<const double> q, const double* aux, int normal, std::span<double> f) const override;

 private:
  int dims_;
  double g_;
  bool efix_;
};

/// Compressible Euler, q = (ρ, ρu[, ρv], E[, φ]) for an ideal gas. Roe
/// linearization with Harten–Hyman entropy fix. The shear jump rides in the
/// contact wave; an optional passive tracer φ (non-conservative,
/// φ_t + u·∇φ = 0) gets its own wave family moving at the contact speed.
class Euler final : public RiemannSolver {
 public:
  Euler(int dims, double gamma, bool tracer = false, bool entropy_fix = true);
  int num_eqn() const override { return dims_ + 2 + (tracer_ ? 1 : 0); }
  int num_waves() const override { return 3 + (tracer_ ? 1 : 0); }
  int dims() const override { return dims_; }
  double gamma() const { return gamma_; }
  bool has_tracer() const { return tracer_; }
  int energy_index() const { return dims_ + 1; }
  double pressure(std::span<const double> q) const;

  void solve(const InterfaceStates& in, int normal, RiemannOutput& out) const override;
  void flux(std::span<const double> q, const double* aux, int normal, std::span<double> f) const override;
  void internal_fluctuation(std::span<const double> q_lo, std::span<const double> q_hi,
                            const double* aux, int normal, std::span<double> out) const override;

 private:
  int dims_;
  double gamma_;
  bool tracer_;
  bool efix_;
};

/// Nonlinear elasticity p-system with spatially varying coefficients,
/// q = (ε, ρu[, ρv]), aux = (ρ, K), σ(ε) = exp(Kε) + 1. f-wave solver:
/// the flux jump (side-local coefficients) is split against the
/// eigenvectors of the per-side linearizations.
class PSystem final : public RiemannSolver {
 public:
  explicit PSystem(int dims);
  int num_eqn() const override { return 1 + dims_; }
  int num_waves() const override { return 2; }
  int num_aux() const override { return 2; }
  int dims() const override { return dims_; }
  bool fwave() const override { return true; }

  static double stress(double strain, double bulk) { return std::exp(bulk * strain) + 1.0; }
  static double stress_derivative(double strain, double bulk) {
    return bulk * std::exp(bulk * strain);
  }

  void solve(const InterfaceStates& in, int normal, RiemannOutput& out) const override;
  void flux(std::span<const double> q, const double* aux, int normal, std::span<double> f) const override;

 private:
  int dims_;
};

}  // namespace fvclaw
