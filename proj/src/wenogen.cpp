#include "fvclaw/wenogen.hpp"

#include <cmath>
#include <mutex>
#include <ostream>
#include <string>

#include "fvclaw/geometry.hpp"

namespace fvclaw {

namespace {

void check_k(int k) {
  if (k < 1 || k > kMaxWenoK)
    throw Error("WENO sub-stencil width k must be in 1.." + std::to_string(kMaxWenoK) +
                " (got " + std::to_string(k) + ")");
}

Rational ipow(const Rational& base, int e) {
  Rational out = 1;
  for (int n = 0; n < e; ++n) out *= base;
  return out;
}

// Cell averages of x^d over the cells [c, c+1], c = offset + j.
RationalMatrix average_matrix(int width, int offset) {
  RationalMatrix m(width, RationalVector(width));
  for (int j = 0; j < width; ++j) {
    Rational a = offset + j;
    Rational b = a + 1;
    for (int d = 0; d < width; ++d) m[j][d] = (ipow(b, d + 1) - ipow(a, d + 1)) / (d + 1);
  }
  return m;
}

// Exact Gauss–Jordan inverse.
RationalMatrix inverse(RationalMatrix a) {
  const int n = static_cast<int>(a.size());
  RationalMatrix inv(n, RationalVector(n, 0));
  for (int i = 0; i < n; ++i) inv[i][i] = 1;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) throw Error("singular reconstruction system");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    Rational p = a[col][col];
    for (int j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (int row = 0; row < n; ++row) {
      if (row == col || a[row][col] == 0) continue;
      Rational f = a[row][col];
      for (int j = 0; j < n; ++j) {
        a[row][j] -= f * a[col][j];
        inv[row][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

Rational falling(int d, int l) {
  Rational out = 1;
  for (int n = 0; n < l; ++n) out *= d - n;
  return out;
}

}  // namespace

RationalVector stencil_coeffs(int width, int offset, EdgePoint point) {
  if (width < 1) throw Error("stencil width must be positive");
  RationalMatrix minv = inverse(average_matrix(width, offset));
  // Edge value = e^T a with a = Minv Q, so the coefficients are e^T Minv.
  const Rational x = point == EdgePoint::RightEdge ? 1 : 0;
  RationalVector c(width, 0);
  for (int d = 0; d < width; ++d) {
    Rational e = d == 0 ? Rational(1) : ipow(x, d);
    if (e == 0) continue;
    for (int j = 0; j < width; ++j) c[j] += e * minv[d][j];
  }
  return c;
}

RationalVector recon_coeffs(int k, int r, EdgePoint point) {
  check_k(k);
  if (r < 0 || r >= k) throw Error("sub-stencil shift out of range");
  return stencil_coeffs(k, -r, point);
}

RationalVector full_stencil_coeffs(int k, EdgePoint point) {
  check_k(k);
  return stencil_coeffs(2 * k - 1, -(k - 1), point);
}

RationalVector optimal_weights(int k, EdgePoint point) {
  check_k(k);
  RationalMatrix c(k);
  for (int r = 0; r < k; ++r) c[r] = recon_coeffs(k, r, point);
  const RationalVector full = full_stencil_coeffs(k, point);
  // Sub-stencil r starts at full-stencil position k-1-r. Position p < k
  // involves only shifts r >= k-1-p, which determines d_{k-1-p}.
  RationalVector d(k, 0);
  for (int p = 0; p < k; ++p) {
    const int r = k - 1 - p;
    Rational rest = 0;
    for (int rr = r + 1; rr < k; ++rr) rest += d[rr] * c[rr][p - (k - 1 - rr)];
    if (c[r][0] == 0) throw Error("degenerate sub-stencil coefficients");
    d[r] = (full[p] - rest) / c[r][0];
  }
  for (int p = 0; p < 2 * k - 1; ++p) {
    Rational sum = 0;
    for (int r = 0; r < k; ++r) {
      int j = p - (k - 1 - r);
      if (j >= 0 && j < k) sum += d[r] * c[r][j];
    }
    if (sum != full[p]) throw Error("no linear weights reproduce the full stencil");
  }
  return d;
}

std::optional<SplitWeights> split_weights(const RationalVector& d) {
  bool negative = false;
  for (const auto& v : d) negative = negative || v < 0;
  if (!negative) return std::nullopt;
  SplitWeights s;
  s.sigma_positive = 0;
  s.sigma_negative = 0;
  for (const auto& v : d) {
    Rational gp = (v + 3 * abs(v)) / 2;
    s.positive.push_back(gp);
    s.negative.push_back(gp - v);
    s.sigma_positive += gp;
    s.sigma_negative += gp - v;
  }
  for (auto& v : s.positive) v /= s.sigma_positive;
  for (auto& v : s.negative) v /= s.sigma_negative;
  return s;
}

std::vector<RationalMatrix> smoothness_coeffs(int k) {
  check_k(k);
  // H[d][e] = Σ_{l=1}^{k-1} ∫_0^1 (x^d)^(l) (x^e)^(l) dx on the unit target cell.
  RationalMatrix h(k, RationalVector(k, 0));
  for (int d = 0; d < k; ++d)
    for (int e = 0; e < k; ++e)
      for (int l = 1; l <= std::min(d, e); ++l)
        h[d][e] += falling(d, l) * falling(e, l) / Rational(d + e - 2 * l + 1);
  std::vector<RationalMatrix> forms;
  for (int r = 0; r < k; ++r) {
    RationalMatrix minv = inverse(average_matrix(k, -r));
    RationalMatrix b(k, RationalVector(k, 0));
    for (int a = 0; a < k; ++a)
      for (int bb = 0; bb < k; ++bb) {
        Rational sum = 0;
        for (int d = 0; d < k; ++d)
          for (int e = 0; e < k; ++e)
            if (h[d][e] != 0) sum += minv[d][a] * h[d][e] * minv[e][bb];
        b[a][bb] = sum;
      }
    forms.push_back(std::move(b));
  }
  return forms;
}

WenoTables make_tables(int k, EdgePoint point) {
  check_k(k);
  WenoTables t;
  t.k = k;
  t.point = point;
  for (int r = 0; r < k; ++r) t.recon.push_back(recon_coeffs(k, r, point));
  t.weights = optimal_weights(k, point);
  t.smoothness = smoothness_coeffs(k);
  t.split = split_weights(t.weights);
  return t;
}

RationalVector combine_substencils(const WenoTables& t) {
  const int k = t.k;
  RationalVector out(2 * k - 1, 0);
  for (int r = 0; r < k; ++r)
    for (int j = 0; j < k; ++j) out[k - 1 - r + j] += t.weights[r] * t.recon[r][j];
  return out;
}

void dump_tables(std::ostream& os, const WenoTables& t) {
  for (int r = 0; r < t.k; ++r)
    for (int j = 0; j < t.k; ++j) {
      const Rational& c = t.recon[r][j];
      os << t.k << ' ' << r << ' ' << j << ' ' << c.get_num() << '/' << c.get_den() << '\n';
    }
}

WenoKernel WenoKernel::from_tables(const WenoTables& t) {
  WenoKernel w;
  w.k = t.k;
  w.point = t.point;
  for (const auto& row : t.recon)
    for (const auto& c : row) w.recon.push_back(c.get_d());
  for (const auto& d : t.weights) w.weights.push_back(d.get_d());
  for (const auto& b : t.smoothness)
    for (const auto& row : b)
      for (const auto& c : row) w.smoothness.push_back(c.get_d());
  if (t.split) {
    w.split = true;
    for (const auto& v : t.split->positive) w.positive.push_back(v.get_d());
    for (const auto& v : t.split->negative) w.negative.push_back(v.get_d());
    w.sigma_positive = t.split->sigma_positive.get_d();
    w.sigma_negative = t.split->sigma_negative.get_d();
  }
  return w;
}

const WenoKernel& weno_kernel(int k, EdgePoint point) {
  check_k(k);
  static std::array<std::array<std::once_flag, 2>, kMaxWenoK + 1> flags;
  static std::array<std::array<WenoKernel, 2>, kMaxWenoK + 1> kernels;
  const int side = point == EdgePoint::RightEdge ? 1 : 0;
  std::call_once(flags[k][side],
                 [&] { kernels[k][side] = WenoKernel::from_tables(make_tables(k, point)); });
  return kernels[k][side];
}

double reconstruct_strided(const double* window, int stride, const WenoKernel& w,
                           double epsilon) {
  const int k = w.k;
  // deviations from the centre value; both the sub-stencil values and the
  // smoothness forms are shift invariant
  const double center = window[static_cast<std::ptrdiff_t>(k - 1) * stride];
  std::array<double, kMaxWenoK> dev{};
  std::array<double, kMaxWenoK> sub{};
  std::array<double, kMaxWenoK> inv_beta2{};
  for (int r = 0; r < k; ++r) {
    const double* q = window + static_cast<std::ptrdiff_t>(k - 1 - r) * stride;
    for (int j = 0; j < k; ++j) dev[j] = q[j * stride] - center;
    const double* c = w.recon.data() + r * k;
    double v = 0.0;
    for (int j = 0; j < k; ++j) v += c[j] * dev[j];
    sub[r] = v;
    const double* b = w.smoothness.data() + static_cast<std::size_t>(r) * k * k;
    double beta = 0.0;
    for (int a = 0; a < k; ++a) {
      double row = 0.0;
      for (int bb = 0; bb < k; ++bb) row += b[a * k + bb] * dev[bb];
      beta += dev[a] * row;
    }
    const double denom = epsilon + beta;
    inv_beta2[r] = 1.0 / (denom * denom);
  }
  auto combine = [&](const std::vector<double>& d) {
    double num = 0.0, den = 0.0;
    for (int r = 0; r < k; ++r) {
      const double alpha = d[r] * inv_beta2[r];
      num += alpha * sub[r];
      den += alpha;
    }
    return num / den;
  };
  if (!w.split) return center + combine(w.weights);
  return center + (w.sigma_positive * combine(w.positive) - w.sigma_negative * combine(w.negative));
}

double reconstruct(std::span<const double> window, const WenoKernel& kernel, double epsilon) {
  if (static_cast<int>(window.size()) != 2 * kernel.k - 1)
    throw Error("reconstruction window must hold 2k-1 values");
  return reconstruct_strided(window.data(), 1, kernel, epsilon);
}

}  // namespace fvclaw
