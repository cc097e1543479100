#pragma once

// Equispaced tensor-product grids, cell-average storage with ghost frames,
// and boundary-condition application.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fvclaw {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One equispaced coordinate direction. Cell i spans
/// [lower + i*delta, lower + (i+1)*delta).
struct Dimension {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  int num_cells = 1;

  Dimension() = default;
  Dimension(std::string name, double lower, double upper, int num_cells);

  double delta() const { return (upper - lower) / num_cells; }
  double edge(int i) const { return lower + i * delta(); }
  double center(int i) const { return lower + (i + 0.5) * delta(); }
};

std::vector<double> cell_centers(const Dimension& dim);

/// The part of a grid held by one worker. `dims` always describe the whole
/// domain so that coordinates are computed identically on every tile;
/// `offset`/`count` select the owned block.
struct Patch {
  std::vector<Dimension> dims;
  std::array<int, 2> offset{0, 0};
  std::array<int, 2> count{1, 1};

  static Patch whole(std::vector<Dimension> dims);
  static Patch tile(std::vector<Dimension> dims, std::array<int, 2> offset,
                    std::array<int, 2> count);

  int rank() const { return static_cast<int>(dims.size()); }
  int nx() const { return count[0]; }
  int ny() const { return count[1]; }
  double delta(int d) const { return dims[d].delta(); }
  /// Center of local cell i (may be a ghost index) along dimension d.
  double center(int d, int i) const { return dims[d].center(offset[d] + i); }
  double edge(int d, int i) const { return dims[d].edge(offset[d] + i); }
  /// True when this patch touches the lower/upper physical boundary along d.
  bool at_lower(int d) const { return offset[d] == 0; }
  bool at_upper(int d) const { return offset[d] + count[d] == dims[d].num_cells; }
  bool covers(int d) const { return at_lower(d) && at_upper(d); }
};

/// Cell-centered array with the variable index fastest and a ghost frame of
/// `num_ghost` layers in every active dimension. Indices are interior-relative:
/// i in [-g, nx+g), j in [-g, ny+g) (j == 0 only in 1D).
class Field {
 public:
  Field() = default;
  Field(int num_vars, int rank, int nx, int ny, int num_ghost);

  int num_vars() const { return num_vars_; }
  int rank() const { return rank_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int num_ghost() const { return ghost_; }
  int ghost(int d) const { return d == 0 ? ghost_ : (rank_ == 2 ? ghost_ : 0); }
  int extent(int d) const { return (d == 0 ? nx_ : ny_) + 2 * ghost(d); }

  std::size_t index(int m, int i, int j = 0) const {
    return static_cast<std::size_t>(m) +
           static_cast<std::size_t>(num_vars_) *
               (static_cast<std::size_t>(i + ghost_) +
                static_cast<std::size_t>(stride_y_) * static_cast<std::size_t>(j + ghost(1)));
  }
  double& operator()(int m, int i, int j = 0) { return data_[index(m, i, j)]; }
  double operator()(int m, int i, int j = 0) const { return data_[index(m, i, j)]; }
  double* cell(int i, int j = 0) { return data_.data() + index(0, i, j); }
  const double* cell(int i, int j = 0) const { return data_.data() + index(0, i, j); }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  bool same_shape(const Field& other) const;

 private:
  int num_vars_ = 0;
  int rank_ = 1;
  int nx_ = 0;
  int ny_ = 1;
  int ghost_ = 0;
  int stride_y_ = 0;
  std::vector<double> data_;
};

struct State {
  Patch patch;
  Field q;
  Field aux;
  std::optional<int> capacity_index;
  double t = 0.0;

  State() = default;
  State(Patch patch, int num_eqn, int num_aux, int num_ghost);

  int num_eqn() const { return q.num_vars(); }
  int num_aux() const { return aux.num_vars(); }
  int num_ghost() const { return q.num_ghost(); }
  int rank() const { return patch.rank(); }
  double capacity(int i, int j = 0) const {
    return capacity_index ? aux(*capacity_index, i, j) : 1.0;
  }
};

enum class Side { Lower = 0, Upper = 1 };

struct Periodic {};
/// Zero-order extrapolation (outflow).
struct Extrapolation {};
/// Mirror the interior and negate the listed components (normal velocities).
struct Wall {
  std::vector<int> reflect_components;
};
/// Fills the ghost layers of one side; must cover the full transverse extent
/// including ghost rows.
struct Custom {
  std::function<void(State&, int dim, Side side)> fill;
};

using BoundaryCondition = std::variant<Periodic, Extrapolation, Wall, Custom>;

struct BoundarySpec {
  /// sides[d][0] is the lower side of dimension d, sides[d][1] the upper.
  std::vector<std::array<BoundaryCondition, 2>> sides;

  static BoundarySpec uniform(int rank, const BoundaryCondition& bc);
  const BoundaryCondition& at(int dim, Side side) const {
    return sides.at(dim)[static_cast<int>(side)];
  }
  bool periodic(int dim) const;
  void validate(int rank) const;
};

/// Fills every ghost cell of `state.q`: lower/upper x over all rows, then
/// lower/upper y over all columns (so corners come from the y rule).
void apply_bcs(State& state, const BoundarySpec& spec);
/// As above but first checks the state's ghost width equals `num_ghost`.
void apply_bcs(State& state, const BoundarySpec& spec, int num_ghost);
/// Ghost fill for one side only. Periodic requires the patch to span `dim`.
void apply_bc_side(State& state, const BoundaryCondition& bc, int dim, Side side);

/// aux ghost rule: periodic sides wrap, every other side extrapolates.
void apply_aux_bc_side(State& state, const BoundaryCondition& bc, int dim, Side side);
void apply_aux_bcs(State& state, const BoundarySpec& spec);

/// Σ κ_i Q_i times the cell volume over interior cells, per equation.
std::vector<double> weighted_total(const State& state);

/// Copies cells [-g, n+g) along `dim` at transverse interior index `fixed`
/// into `out` (variables fastest).
void gather_line(const Field& field, int dim, int fixed, std::vector<double>& out);
/// Writes the interior cells [0, n) of a gathered line back into `field`.
void scatter_line_interior(Field& field, int dim, int fixed, std::span<const double> line);

bool all_finite(const Field& field);

}  // namespace fvclaw
