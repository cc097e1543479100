#include "fvclaw/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace fvclaw {

namespace {

class AbortedError : public Error {
 public:
  using Error::Error;
};

constexpr int kTagReduceUp = 200;
constexpr int kTagReduceDown = 201;
constexpr int kTagGather = 300;

int halo_tag(int field, int dim, bool sender_high) { return field * 8 + dim * 2 + (sender_high ? 1 : 0); }

}  // namespace

Hub::Hub(int size, std::chrono::milliseconds timeout)
    : size_(size), timeout_(timeout), queues_(static_cast<std::size_t>(size) * size) {
  if (size < 1) throw Error("worker count must be positive");
}

void Hub::send(int src, int dst, int tag, std::vector<double> data) {
  if (src < 0 || src >= size_ || dst < 0 || dst >= size_) throw Error("send to unknown worker");
  {
    std::lock_guard lock(mutex_);
    queues_[static_cast<std::size_t>(src) * size_ + dst].push_back({tag, std::move(data)});
  }
  cv_.notify_all();
}

std::vector<double> Hub::recv(int dst, int src, int tag) {
  if (src < 0 || src >= size_ || dst < 0 || dst >= size_) throw Error("recv from unknown worker");
  std::unique_lock lock(mutex_);
  auto& queue = queues_[static_cast<std::size_t>(src) * size_ + dst];
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  while (true) {
    auto it = std::find_if(queue.begin(), queue.end(), [&](const Message& m) { return m.tag == tag; });
    if (it != queue.end()) {
      std::vector<double> data = std::move(it->data);
      queue.erase(it);
      return data;
    }
    if (aborted_) throw AbortedError("parallel run aborted: " + abort_reason_);
    if (cv_.wait_until(lock, deadline) == std::cv_status::timeout &&
        std::chrono::steady_clock::now() >= deadline)
      throw Error("worker " + std::to_string(dst) + " timed out waiting for worker " +
                  std::to_string(src) + " (tag " + std::to_string(tag) + ")");
  }
}

void Hub::abort(const std::string& reason) {
  {
    std::lock_guard lock(mutex_);
    if (!aborted_) {
      aborted_ = true;
      abort_reason_ = reason;
    }
  }
  cv_.notify_all();
}

bool Hub::aborted() const {
  std::lock_guard lock(mutex_);
  return aborted_;
}

double Communicator::allreduce_max(double value) const {
  if (size() == 1) return value;
  auto combine = [](double a, double b) {
    if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
    return std::max(a, b);
  };
  if (rank_ == 0) {
    double m = value;
    for (int w = 1; w < size(); ++w) m = combine(m, recv(w, kTagReduceUp).at(0));
    for (int w = 1; w < size(); ++w) send(w, kTagReduceDown, {m});
    return m;
  }
  send(0, kTagReduceUp, {value});
  return recv(0, kTagReduceDown).at(0);
}

double reduce_max(const Communicator& comm, double value) { return comm.allreduce_max(value); }

void run_workers(int workers, const std::function<void(Communicator&)>& body,
                 std::chrono::milliseconds timeout) {
  Hub hub(workers, timeout);
  if (workers == 1) {
    Communicator comm(hub, 0);
    body(comm);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        Communicator comm(hub, w);
        body(comm);
      } catch (...) {
        errors[w] = std::current_exception();
        hub.abort("worker " + std::to_string(w) + " failed");
      }
    });
  }
  for (auto& t : threads) t.join();
  std::exception_ptr first_abort;
  for (auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const AbortedError&) {
      if (!first_abort) first_abort = e;
    } catch (...) {
      throw;
    }
  }
  if (first_abort) std::rethrow_exception(first_abort);
}

Partition Partition::make(int mx, int my, int workers, int halo_width) {
  if (mx < 1 || my < 1) throw Error("grid must have at least one cell per dimension");
  if (workers < 1) throw Error("worker count must be positive");
  if (static_cast<long long>(workers) > static_cast<long long>(mx) * my)
    throw Error("cannot split " + std::to_string(mx) + "x" + std::to_string(my) + " cells over " +
                std::to_string(workers) + " workers");
  int best_px = 0;
  long long best_hi = 0, best_lo = 1;
  for (int px = 1; px <= workers; ++px) {
    if (workers % px != 0) continue;
    const int py = workers / px;
    if (px > mx || py > my) continue;
    if (px > 1 && mx / px < halo_width) continue;
    if (py > 1 && my / py < halo_width) continue;
    const long long a = static_cast<long long>(px) * my;
    const long long b = static_cast<long long>(py) * mx;
    const long long hi = std::max(a, b), lo = std::min(a, b);
    // hi/lo <= best_hi/best_lo, ties go to the later (larger) px.
    if (best_px == 0 || hi * best_lo <= best_hi * lo) {
      best_px = px;
      best_hi = hi;
      best_lo = lo;
    }
  }
  if (best_px == 0)
    throw Error("cannot split " + std::to_string(mx) + "x" + std::to_string(my) + " cells over " +
                std::to_string(workers) + " workers with halo width " +
                std::to_string(halo_width));
  Partition p;
  p.mx = mx;
  p.my = my;
  p.px = best_px;
  p.py = workers / best_px;
  p.halo_width = halo_width;
  auto starts = [](int m, int parts) {
    std::vector<int> s{0};
    const int base = m / parts, rem = m % parts;
    for (int t = 0; t < parts; ++t) s.push_back(s.back() + base + (t < rem ? 1 : 0));
    return s;
  };
  p.x_starts = starts(mx, p.px);
  p.y_starts = starts(my, p.py);
  int global = 0;
  for (int iy = 0; iy < p.py; ++iy)
    for (int ix = 0; ix < p.px; ++ix) {
      Tile t;
      t.worker = p.worker_at(ix, iy);
      t.offset = {p.x_starts[ix], p.y_starts[iy]};
      t.count = {p.x_starts[ix + 1] - p.x_starts[ix], p.y_starts[iy + 1] - p.y_starts[iy]};
      t.first_global = global;
      global += t.size();
      p.tiles.push_back(t);
    }
  return p;
}

int Partition::owner(int i, int j) const {
  if (i < 0 || i >= mx || j < 0 || j >= my) throw Error("cell index out of range");
  const int ix = static_cast<int>(std::upper_bound(x_starts.begin(), x_starts.end(), i) - x_starts.begin()) - 1;
  const int iy = static_cast<int>(std::upper_bound(y_starts.begin(), y_starts.end(), j) - y_starts.begin()) - 1;
  return worker_at(ix, iy);
}

std::optional<int> Partition::neighbor(int worker, Direction dir, bool periodic) const {
  auto [ix, iy] = coords(worker);
  auto step = [&](int v, int delta, int n) -> std::optional<int> {
    int w = v + delta;
    if (w >= 0 && w < n) return w;
    if (periodic && n > 1) return (w + n) % n;
    return std::nullopt;
  };
  switch (dir) {
    case Direction::Left:
      if (auto v = step(ix, -1, px)) return worker_at(*v, iy);
      break;
    case Direction::Right:
      if (auto v = step(ix, 1, px)) return worker_at(*v, iy);
      break;
    case Direction::Down:
      if (auto v = step(iy, -1, py)) return worker_at(ix, *v);
      break;
    case Direction::Up:
      if (auto v = step(iy, 1, py)) return worker_at(ix, *v);
      break;
  }
  return std::nullopt;
}

int Partition::natural_to_global(int natural) const {
  if (natural < 0 || natural >= mx * my) throw Error("natural index out of range");
  const int i = natural % mx, j = natural / mx;
  const Tile& t = tiles[owner(i, j)];
  return t.first_global + (j - t.offset[1]) * t.count[0] + (i - t.offset[0]);
}

int Partition::global_to_natural(int global) const {
  if (global < 0 || global >= mx * my) throw Error("global index out of range");
  auto it = std::upper_bound(tiles.begin(), tiles.end(), global,
                             [](int g, const Tile& t) { return g < t.first_global; });
  const Tile& t = *(it - 1);
  const int local = global - t.first_global;
  const int i = t.offset[0] + local % t.count[0];
  const int j = t.offset[1] + local / t.count[0];
  return j * mx + i;
}

std::optional<int> LocalLayout::local_index(int i, int j) const {
  const int li = i - lower[0], lj = j - lower[1];
  if (li < 0 || li >= extent[0] || lj < 0 || lj >= extent[1]) return std::nullopt;
  return lj * extent[0] + li;
}

std::array<int, 2> LocalLayout::cell(int local) const {
  return {lower[0] + local % extent[0], lower[1] + local / extent[0]};
}

bool LocalLayout::is_halo(int local) const {
  auto [i, j] = cell(local);
  return i < owned_lower[0] || i >= owned_lower[0] + owned_count[0] || j < owned_lower[1] ||
         j >= owned_lower[1] + owned_count[1];
}

LocalLayout local_layout(const Partition& part, int worker) {
  const Tile& t = part.tile(worker);
  const int h = part.halo_width;
  LocalLayout l;
  l.owned_lower = t.offset;
  l.owned_count = t.count;
  const bool left = part.neighbor(worker, Direction::Left, false).has_value();
  const bool right = part.neighbor(worker, Direction::Right, false).has_value();
  const bool down = part.neighbor(worker, Direction::Down, false).has_value();
  const bool up = part.neighbor(worker, Direction::Up, false).has_value();
  l.lower = {t.offset[0] - (left ? h : 0), t.offset[1] - (down ? h : 0)};
  l.extent = {t.count[0] + (left ? h : 0) + (right ? h : 0),
              t.count[1] + (down ? h : 0) + (up ? h : 0)};
  return l;
}

namespace {

// Layers [first, first+g) along `dim`; transverse range covers interior
// rows for dim 0 and all columns (incl. ghosts) for dim 1.
std::vector<double> pack_layers(const Field& f, int dim, int first, int g) {
  std::vector<double> out;
  const int nv = f.num_vars();
  if (dim == 0) {
    for (int j = 0; j < f.ny(); ++j)
      for (int l = 0; l < g; ++l) {
        const double* c = f.cell(first + l, j);
        out.insert(out.end(), c, c + nv);
      }
  } else {
    const int gx = f.ghost(0);
    for (int l = 0; l < g; ++l)
      for (int i = -gx; i < f.nx() + gx; ++i) {
        const double* c = f.cell(i, first + l);
        out.insert(out.end(), c, c + nv);
      }
  }
  return out;
}

void unpack_layers(Field& f, int dim, int first, int g, const std::vector<double>& in) {
  const int nv = f.num_vars();
  const double* src = in.data();
  std::size_t expected = 0;
  if (dim == 0)
    expected = static_cast<std::size_t>(f.ny()) * g * nv;
  else
    expected = static_cast<std::size_t>(f.nx() + 2 * f.ghost(0)) * g * nv;
  if (in.size() != expected) throw Error("halo message has the wrong size (mismatched halo widths?)");
  if (dim == 0) {
    for (int j = 0; j < f.ny(); ++j)
      for (int l = 0; l < g; ++l) {
        double* c = f.cell(first + l, j);
        std::copy(src, src + nv, c);
        src += nv;
      }
  } else {
    const int gx = f.ghost(0);
    for (int l = 0; l < g; ++l)
      for (int i = -gx; i < f.nx() + gx; ++i) {
        double* c = f.cell(i, first + l);
        std::copy(src, src + nv, c);
        src += nv;
      }
  }
}

// Exchanges halos of one dimension; returns which sides faced a neighbor.
std::array<bool, 2> exchange_dim(const Communicator& comm, const Partition& part, Field& f,
                                 int field_id, int dim, bool periodic) {
  const int w = comm.rank();
  const auto lower = part.neighbor(w, dim == 0 ? Direction::Left : Direction::Down, periodic);
  const auto upper = part.neighbor(w, dim == 0 ? Direction::Right : Direction::Up, periodic);
  const int g = f.ghost(dim);
  const int n = dim == 0 ? f.nx() : f.ny();
  if (f.num_vars() > 0 && g > 0) {
    if ((lower || upper) && g != part.halo_width)
      throw Error("tile ghost width " + std::to_string(g) + " does not match halo width " +
                  std::to_string(part.halo_width));
    if (lower) comm.send(*lower, halo_tag(field_id, dim, false), pack_layers(f, dim, 0, g));
    if (upper) comm.send(*upper, halo_tag(field_id, dim, true), pack_layers(f, dim, n - g, g));
    if (lower) unpack_layers(f, dim, -g, g, comm.recv(*lower, halo_tag(field_id, dim, true)));
    if (upper) unpack_layers(f, dim, n, g, comm.recv(*upper, halo_tag(field_id, dim, false)));
  }
  return {lower.has_value(), upper.has_value()};
}

void check_tile(const Communicator& comm, const Partition& part, const State& state) {
  if (comm.size() != part.workers()) throw Error("worker count does not match the partition");
  const Tile& t = part.tile(comm.rank());
  if (state.patch.offset != t.offset || state.patch.count != t.count)
    throw Error("state does not hold this worker's tile");
}

template <class PhysicalSide>
void fill_field(const Communicator& comm, const Partition& part, State& state, Field& f,
                int field_id, const BoundarySpec& spec, PhysicalSide&& physical) {
  check_tile(comm, part, state);
  spec.validate(state.rank());
  for (int d = 0; d < state.rank(); ++d) {
    auto faced = exchange_dim(comm, part, f, field_id, d, spec.periodic(d));
    if (!faced[0]) physical(spec.at(d, Side::Lower), d, Side::Lower);
    if (!faced[1]) physical(spec.at(d, Side::Upper), d, Side::Upper);
  }
}

}  // namespace

void fill_ghosts(const Communicator& comm, const Partition& part, State& state,
                 const BoundarySpec& spec) {
  fill_field(comm, part, state, state.q, 0, spec, [&](const BoundaryCondition& bc, int d, Side s) {
    apply_bc_side(state, bc, d, s);
  });
}

void fill_aux_ghosts(const Communicator& comm, const Partition& part, State& state,
                     const BoundarySpec& spec) {
  fill_field(comm, part, state, state.aux, 1, spec, [&](const BoundaryCondition& bc, int d, Side s) {
    apply_aux_bc_side(state, bc, d, s);
  });
}

void exchange_halos(const Communicator& comm, const Partition& part, State& state, bool periodic_x,
                    bool periodic_y) {
  check_tile(comm, part, state);
  exchange_dim(comm, part, state.q, 0, 0, periodic_x);
  if (state.rank() == 2) exchange_dim(comm, part, state.q, 0, 1, periodic_y);
}

void exchange_halos(std::vector<State>& tiles, const Partition& part, bool periodic_x,
                    bool periodic_y) {
  if (static_cast<int>(tiles.size()) != part.workers())
    throw Error("tile count does not match the partition");
  run_workers(part.workers(), [&](Communicator& comm) {
    exchange_halos(comm, part, tiles[comm.rank()], periodic_x, periodic_y);
  });
}

namespace {

std::vector<double> pack_interior(const State& s) {
  std::vector<double> out;
  const int nv = s.num_eqn();
  out.reserve(static_cast<std::size_t>(s.patch.nx()) * s.patch.ny() * nv);
  for (int j = 0; j < s.patch.ny(); ++j)
    for (int i = 0; i < s.patch.nx(); ++i) {
      const double* c = s.q.cell(i, j);
      out.insert(out.end(), c, c + nv);
    }
  return out;
}

void place_tile(std::vector<double>& full, const Partition& part, const Tile& t, int nv,
                const std::vector<double>& data) {
  if (data.size() != static_cast<std::size_t>(t.size()) * nv) throw Error("gathered tile has the wrong size");
  const double* src = data.data();
  for (int j = 0; j < t.count[1]; ++j)
    for (int i = 0; i < t.count[0]; ++i) {
      const std::size_t nat = static_cast<std::size_t>(t.offset[1] + j) * part.mx + (t.offset[0] + i);
      std::copy(src, src + nv, full.begin() + nat * nv);
      src += nv;
    }
}

}  // namespace

std::vector<double> gather_natural(const Communicator& comm, const Partition& part,
                                   const State& state) {
  check_tile(comm, part, state);
  const int nv = state.num_eqn();
  if (comm.rank() != 0) {
    comm.send(0, kTagGather, pack_interior(state));
    return {};
  }
  std::vector<double> full(static_cast<std::size_t>(part.mx) * part.my * nv);
  place_tile(full, part, part.tile(0), nv, pack_interior(state));
  for (int w = 1; w < comm.size(); ++w) place_tile(full, part, part.tile(w), nv, comm.recv(w, kTagGather));
  return full;
}

std::vector<double> gather_natural(const std::vector<State>& tiles, const Partition& part) {
  if (static_cast<int>(tiles.size()) != part.workers())
    throw Error("tile count does not match the partition");
  const int nv = tiles.at(0).num_eqn();
  std::vector<double> full(static_cast<std::size_t>(part.mx) * part.my * nv);
  for (int w = 0; w < part.workers(); ++w) place_tile(full, part, part.tile(w), nv, pack_interior(tiles[w]));
  return full;
}

}  // namespace fvclaw
