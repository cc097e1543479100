#pragma once

// WENO tables in exact rational arithmetic: sub-stencil reconstruction
// coefficients, optimal linear weights (with positive/negative splitting when
// needed) and Jiang–Shu smoothness quadratic forms, for cell-edge points.
//
// Sub-stencil r (r = 0..k-1) of cell i covers cells i-r .. i-r+k-1, so the
// edge value is sum_j c[r][j] * Q[i-r+j].

#include <gmpxx.h>

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace fvclaw {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;

enum class EdgePoint { LeftEdge, RightEdge };

constexpr int kMaxWenoK = 9;

struct SplitWeights {
  RationalVector positive;  // normalized, sums to 1
  RationalVector negative;  // normalized, sums to 1
  Rational sigma_positive;
  Rational sigma_negative;  // d = sigma_positive*positive - sigma_negative*negative
};

struct WenoTables {
  int k = 1;
  EdgePoint point = EdgePoint::RightEdge;
  RationalMatrix recon;                // [r][j]
  RationalVector weights;              // d_r
  std::vector<RationalMatrix> smoothness;  // B_r, beta_r = Q^T B_r Q over Q[i-r .. i-r+k-1]
  std::optional<SplitWeights> split;
};

/// Edge-value coefficients of the degree-(width-1) polynomial matching the
/// cell averages of cells offset-..offset+width-1 relative to the target
/// cell (offset <= 0). Valid for any width >= 1.
RationalVector stencil_coeffs(int width, int offset, EdgePoint point);

RationalVector recon_coeffs(int k, int r, EdgePoint point);
/// Full-stencil (2k-1 point) coefficients over cells i-k+1 .. i+k-1.
RationalVector full_stencil_coeffs(int k, EdgePoint point);
RationalVector optimal_weights(int k, EdgePoint point);
/// Shi splitting of a weight vector; empty when every weight is non-negative.
std::optional<SplitWeights> split_weights(const RationalVector& d);
std::vector<RationalMatrix> smoothness_coeffs(int k);

WenoTables make_tables(int k, EdgePoint point);

/// Σ_r d_r c_r aligned on the full stencil, as exact rationals.
RationalVector combine_substencils(const WenoTables& tables);

/// Writes one line per reconstruction coefficient: `k r j num/den`.
void dump_tables(std::ostream& os, const WenoTables& tables);

/// Floating-point copy of one table set, used by the reconstruction kernel.
struct WenoKernel {
  int k = 1;
  EdgePoint point = EdgePoint::RightEdge;
  std::vector<double> recon;       // [r*k + j]
  std::vector<double> weights;     // d_r
  std::vector<double> smoothness;  // [(r*k + a)*k + b]
  bool split = false;
  std::vector<double> positive, negative;
  double sigma_positive = 1.0, sigma_negative = 0.0;

  static WenoKernel from_tables(const WenoTables& tables);
};

/// Memoized kernel for (k, point); tables are generated once per process.
const WenoKernel& weno_kernel(int k, EdgePoint point);

/// Nonlinear WENO edge value. `window` holds Q[i-k+1 .. i+k-1] (2k-1
/// values). With split weights, the positive and negative parts get their
/// own nonlinear weights and are recombined.
double reconstruct(std::span<const double> window, const WenoKernel& kernel,
                   double epsilon = 1e-6);
/// Same with a strided window: value n is window[n*stride].
double reconstruct_strided(const double* window, int stride, const WenoKernel& kernel,
                           double epsilon);

}  // namespace fvclaw
