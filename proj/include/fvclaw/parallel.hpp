#pragma once

// In-process SPMD layer: workers run on threads and exchange data only
// through ordered point-to-point channels. Provides the tile layout of a
// grid, the natural/global/local numberings, two-phase halo exchange,
// max-reduction and natural-order gather.

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fvclaw/geometry.hpp"

namespace fvclaw {

/// Shared mailbox of one parallel run: one FIFO per (source, destination).
class Hub {
 public:
  explicit Hub(int size, std::chrono::milliseconds timeout = std::chrono::minutes(2));

  int size() const { return size_; }
  void send(int src, int dst, int tag, std::vector<double> data);
  /// First queued message from `src` with `tag`; blocks until one arrives,
  /// the hub is aborted, or the timeout expires (both raise Error).
  std::vector<double> recv(int dst, int src, int tag);
  void abort(const std::string& reason);
  bool aborted() const;

 private:
  struct Message {
    int tag;
    std::vector<double> data;
  };
  int size_;
  std::chrono::milliseconds timeout_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<std::deque<Message>> queues_;  // [src*size + dst]
  bool aborted_ = false;
  std::string abort_reason_;
};

class Communicator {
 public:
  Communicator(Hub& hub, int rank) : hub_(&hub), rank_(rank) {}
  int rank() const { return rank_; }
  int size() const { return hub_->size(); }
  void send(int dst, int tag, std::vector<double> data) const { hub_->send(rank_, dst, tag, std::move(data)); }
  std::vector<double> recv(int src, int tag) const { return hub_->recv(rank_, src, tag); }
  /// Every worker gets the same maximum; NaN anywhere yields NaN.
  double allreduce_max(double value) const;
  void barrier() const { allreduce_max(0.0); }

 private:
  Hub* hub_;
  int rank_;
};

/// Runs body(comm) on `workers` threads. The first failure aborts the hub
/// so blocked peers wake up, and is rethrown after all threads join.
void run_workers(int workers, const std::function<void(Communicator&)>& body,
                 std::chrono::milliseconds timeout = std::chrono::minutes(2));

double reduce_max(const Communicator& comm, double value);

enum class Direction { Left = 0, Right = 1, Down = 2, Up = 3 };

struct Tile {
  int worker = 0;
  std::array<int, 2> offset{0, 0};
  std::array<int, 2> count{1, 1};
  int first_global = 0;
  int size() const { return count[0] * count[1]; }
};

/// Tiling of an mx×my grid (my = 1 for 1D) over a px×py worker grid.
/// Workers are numbered row-major from the bottom-left tile.
struct Partition {
  int mx = 1, my = 1;
  int px = 1, py = 1;
  int halo_width = 0;
  std::vector<int> x_starts;  // px+1 entries
  std::vector<int> y_starts;  // py+1 entries
  std::vector<Tile> tiles;

  /// Worker grid with px·py = workers whose aspect ratio px/py is closest
  /// to mx/my (ties prefer larger px), among grids whose tiles are at least
  /// halo_width cells wide.
  static Partition make(int mx, int my, int workers, int halo_width);

  int workers() const { return px * py; }
  int worker_at(int ix, int iy) const { return iy * px + ix; }
  std::array<int, 2> coords(int worker) const { return {worker % px, worker / px}; }
  const Tile& tile(int worker) const { return tiles.at(worker); }
  int owner(int i, int j) const;
  /// Neighbor across one side, wrapping around when `periodic` and the
  /// direction has more than one worker.
  std::optional<int> neighbor(int worker, Direction dir, bool periodic) const;

  int natural_to_global(int natural) const;
  int global_to_natural(int global) const;
};

/// Per-worker numbering over owned cells plus halo cells that face an
/// existing neighbor (not the physical boundary), row-major from the
/// lower-left corner of that box.
struct LocalLayout {
  std::array<int, 2> lower{0, 0};  // global cell index of the box corner
  std::array<int, 2> extent{1, 1};
  std::array<int, 2> owned_lower{0, 0};
  std::array<int, 2> owned_count{1, 1};

  int size() const { return extent[0] * extent[1]; }
  /// Local index of global cell (i, j), or empty if outside the box.
  std::optional<int> local_index(int i, int j) const;
  bool is_halo(int local) const;
  std::array<int, 2> cell(int local) const;
};

LocalLayout local_layout(const Partition& part, int worker);

/// Fills every ghost cell of one worker's tile: per dimension, halos that
/// face a neighbor are received from it; the remaining sides get their
/// physical boundary condition (x first over interior rows, then y over
/// all columns, so corners match a serial fill).
void fill_ghosts(const Communicator& comm, const Partition& part, State& state,
                 const BoundarySpec& spec);
/// Same for aux, with the aux boundary rule on physical sides.
void fill_aux_ghosts(const Communicator& comm, const Partition& part, State& state,
                     const BoundarySpec& spec);

/// Halo exchange only: ghost cells facing neighbors are filled, ghost
/// cells on the physical boundary are left untouched.
void exchange_halos(const Communicator& comm, const Partition& part, State& state,
                    bool periodic_x = false, bool periodic_y = false);
/// Convenience: exchange over a set of tiles held by one caller (tiles[w]
/// belongs to worker w).
void exchange_halos(std::vector<State>& tiles, const Partition& part, bool periodic_x = false,
                    bool periodic_y = false);

/// Interior q of every tile in natural order (cell-major, equations
/// fastest). Collective; the result is returned on worker 0, empty elsewhere.
std::vector<double> gather_natural(const Communicator& comm, const Partition& part,
                                   const State& state);
std::vector<double> gather_natural(const std::vector<State>& tiles, const Partition& part);

}  // namespace fvclaw
