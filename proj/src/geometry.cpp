#include "fvclaw/geometry.hpp"

#include <cmath>
#include <utility>

namespace fvclaw {

Dimension::Dimension(std::string name_, double lower_, double upper_, int num_cells_)
    : name(std::move(name_)), lower(lower_), upper(upper_), num_cells(num_cells_) {
  if (!(upper > lower)) throw Error("dimension " + name + ": upper must exceed lower");
  if (num_cells < 1) throw Error("dimension " + name + ": num_cells must be positive");
}

std::vector<double> cell_centers(const Dimension& dim) {
  std::vector<double> x(dim.num_cells);
  for (int i = 0; i < dim.num_cells; ++i) x[i] = dim.center(i);
  return x;
}

Patch Patch::whole(std::vector<Dimension> dims) {
  Patch p;
  if (dims.empty() || dims.size() > 2) throw Error("patch rank must be 1 or 2");
  p.count = {dims[0].num_cells, dims.size() == 2 ? dims[1].num_cells : 1};
  p.dims = std::move(dims);
  return p;
}

Patch Patch::tile(std::vector<Dimension> dims, std::array<int, 2> offset,
                  std::array<int, 2> count) {
  Patch p = whole(std::move(dims));
  p.offset = offset;
  p.count = count;
  for (int d = 0; d < p.rank(); ++d) {
    if (offset[d] < 0 || count[d] < 1 || offset[d] + count[d] > p.dims[d].num_cells)
      throw Error("tile outside of domain");
  }
  return p;
}

Field::Field(int num_vars, int rank, int nx, int ny, int num_ghost)
    : num_vars_(num_vars), rank_(rank), nx_(nx), ny_(rank == 2 ? ny : 1), ghost_(num_ghost) {
  if (num_vars < 0 || nx < 1 || ny_ < 1 || num_ghost < 0 || rank < 1 || rank > 2)
    throw Error("invalid field shape");
  stride_y_ = nx_ + 2 * ghost_;
  data_.assign(static_cast<std::size_t>(num_vars_) * extent(0) * extent(1), 0.0);
}

bool Field::same_shape(const Field& o) const {
  return num_vars_ == o.num_vars_ && rank_ == o.rank_ && nx_ == o.nx_ && ny_ == o.ny_ &&
         ghost_ == o.ghost_;
}

State::State(Patch patch_, int num_eqn, int num_aux, int num_ghost)
    : patch(std::move(patch_)),
      q(num_eqn, patch.rank(), patch.nx(), patch.ny(), num_ghost),
      aux(num_aux, patch.rank(), patch.nx(), patch.ny(), num_ghost) {}

BoundarySpec BoundarySpec::uniform(int rank, const BoundaryCondition& bc) {
  BoundarySpec s;
  for (int d = 0; d < rank; ++d) s.sides.push_back({bc, bc});
  return s;
}

bool BoundarySpec::periodic(int dim) const {
  return std::holds_alternative<Periodic>(sides.at(dim)[0]);
}

void BoundarySpec::validate(int rank) const {
  if (static_cast<int>(sides.size()) != rank)
    throw Error("boundary spec rank does not match patch rank");
  for (int d = 0; d < rank; ++d) {
    bool lo = std::holds_alternative<Periodic>(sides[d][0]);
    bool hi = std::holds_alternative<Periodic>(sides[d][1]);
    if (lo != hi) throw Error("periodic boundary must be set on both sides of a dimension");
    for (const auto& bc : sides[d]) {
      if (const auto* c = std::get_if<Custom>(&bc); c && !c->fill)
        throw Error("custom boundary condition without callback");
    }
  }
}

namespace {

// Source/target cell pairs along `dim` for one ghost layer, applied to every
// transverse index including ghosts.
template <class CopyCell>
void for_each_transverse(const Field& f, int dim, CopyCell&& copy) {
  int other = 1 - dim;
  if (f.rank() == 1) {
    copy(0);
    return;
  }
  int g = f.ghost(other);
  int n = other == 0 ? f.nx() : f.ny();
  for (int t = -g; t < n + g; ++t) copy(t);
}

void copy_cell(Field& f, int dim, int t, int from, int to, const std::vector<int>* negate) {
  int nv = f.num_vars();
  const double* src = dim == 0 ? f.cell(from, t) : f.cell(t, from);
  double* dst = dim == 0 ? f.cell(to, t) : f.cell(t, to);
  for (int m = 0; m < nv; ++m) dst[m] = src[m];
  if (negate)
    for (int m : *negate) dst[m] = -dst[m];
}

enum class Rule { Wrap, Extrapolate, Mirror };

void fill_side(Field& f, int dim, Side side, Rule rule, const std::vector<int>* negate) {
  if (f.num_vars() == 0) return;
  int g = f.ghost(dim);
  int n = dim == 0 ? f.nx() : f.ny();
  for_each_transverse(f, dim, [&](int t) {
    for (int layer = 1; layer <= g; ++layer) {
      int to = side == Side::Lower ? -layer : n - 1 + layer;
      int from = 0;
      switch (rule) {
        case Rule::Wrap:
          from = side == Side::Lower ? n - layer : layer - 1;
          break;
        case Rule::Extrapolate:
          from = side == Side::Lower ? 0 : n - 1;
          break;
        case Rule::Mirror:
          from = side == Side::Lower ? layer - 1 : n - layer;
          break;
      }
      copy_cell(f, dim, t, from, to, rule == Rule::Mirror ? negate : nullptr);
    }
  });
}

void check_periodic_span(const State& s, int dim) {
  if (!s.patch.covers(dim))
    throw Error("local periodic wrap requires the patch to span the dimension");
}

}  // namespace

void apply_bc_side(State& state, const BoundaryCondition& bc, int dim, Side side) {
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Periodic>) {
          check_periodic_span(state, dim);
          fill_side(state.q, dim, side, Rule::Wrap, nullptr);
        } else if constexpr (std::is_same_v<T, Extrapolation>) {
          fill_side(state.q, dim, side, Rule::Extrapolate, nullptr);
        } else if constexpr (std::is_same_v<T, Wall>) {
          for (int m : b.reflect_components)
            if (m < 0 || m >= state.num_eqn()) throw Error("wall component out of range");
          fill_side(state.q, dim, side, Rule::Mirror, &b.reflect_components);
        } else {
          b.fill(state, dim, side);
        }
      },
      bc);
}

void apply_bcs(State& state, const BoundarySpec& spec) {
  spec.validate(state.rank());
  for (int d = 0; d < state.rank(); ++d) {
    apply_bc_side(state, spec.at(d, Side::Lower), d, Side::Lower);
    apply_bc_side(state, spec.at(d, Side::Upper), d, Side::Upper);
  }
}

void apply_bcs(State& state, const BoundarySpec& spec, int num_ghost) {
  if (state.num_ghost() != num_ghost)
    throw Error("ghost width mismatch: state has " + std::to_string(state.num_ghost()) +
                ", expected " + std::to_string(num_ghost));
  apply_bcs(state, spec);
}

void apply_aux_bc_side(State& state, const BoundaryCondition& bc, int dim, Side side) {
  if (std::holds_alternative<Periodic>(bc)) {
    check_periodic_span(state, dim);
    fill_side(state.aux, dim, side, Rule::Wrap, nullptr);
  } else {
    fill_side(state.aux, dim, side, Rule::Extrapolate, nullptr);
  }
}

void apply_aux_bcs(State& state, const BoundarySpec& spec) {
  spec.validate(state.rank());
  for (int d = 0; d < state.rank(); ++d) {
    apply_aux_bc_side(state, spec.at(d, Side::Lower), d, Side::Lower);
    apply_aux_bc_side(state, spec.at(d, Side::Upper), d, Side::Upper);
  }
}

std::vector<double> weighted_total(const State& state) {
  const int m_eq = state.num_eqn();
  std::vector<double> total(m_eq, 0.0);
  double vol = state.patch.delta(0);
  if (state.rank() == 2) vol *= state.patch.delta(1);
  for (int j = 0; j < state.patch.ny(); ++j)
    for (int i = 0; i < state.patch.nx(); ++i) {
      double kappa = state.capacity(i, j);
      for (int m = 0; m < m_eq; ++m) total[m] += kappa * state.q(m, i, j);
    }
  for (double& v : total) v *= vol;
  return total;
}

void gather_line(const Field& f, int dim, int fixed, std::vector<double>& out) {
  int nv = f.num_vars();
  int g = f.ghost(dim);
  int n = dim == 0 ? f.nx() : f.ny();
  out.resize(static_cast<std::size_t>(nv) * (n + 2 * g));
  double* dst = out.data();
  for (int c = -g; c < n + g; ++c) {
    const double* src = dim == 0 ? f.cell(c, fixed) : f.cell(fixed, c);
    for (int m = 0; m < nv; ++m) *dst++ = src[m];
  }
}

void scatter_line_interior(Field& f, int dim, int fixed, std::span<const double> line) {
  int nv = f.num_vars();
  int g = f.ghost(dim);
  int n = dim == 0 ? f.nx() : f.ny();
  const double* src = line.data() + static_cast<std::size_t>(nv) * g;
  for (int c = 0; c < n; ++c) {
    double* dst = dim == 0 ? f.cell(c, fixed) : f.cell(fixed, c);
    for (int m = 0; m < nv; ++m) dst[m] = *src++;
  }
}

bool all_finite(const Field& f) {
  for (int j = 0; j < f.ny(); ++j)
    for (int i = 0; i < f.nx(); ++i)
      for (int m = 0; m < f.num_vars(); ++m)
        if (!std::isfinite(f(m, i, j))) return false;
  return true;
}

}  // namespace fvclaw
