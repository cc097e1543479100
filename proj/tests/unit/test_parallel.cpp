#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "fvclaw/parallel.hpp"

using namespace fvclaw;

namespace {

State tile_state(const Partition& part, int w, int nv, int g, double xhi = 1.0, double yhi = 1.0) {
  const Tile& t = part.tile(w);
  std::vector<Dimension> dims{Dimension("x", 0, xhi, part.mx), Dimension("y", 0, yhi, part.my)};
  return State(Patch::tile(dims, t.offset, t.count), nv, 0, g);
}

std::vector<State> scatter(const State& full, const Partition& part) {
  std::vector<State> tiles;
  for (int w = 0; w < part.workers(); ++w) {
    State s = tile_state(part, w, full.num_eqn(), full.num_ghost());
    const Tile& t = part.tile(w);
    for (int j = 0; j < t.count[1]; ++j)
      for (int i = 0; i < t.count[0]; ++i)
        for (int m = 0; m < full.num_eqn(); ++m) s.q(m, i, j) = full.q(m, t.offset[0] + i, t.offset[1] + j);
    tiles.push_back(std::move(s));
  }
  return tiles;
}

// Global numbering of the 5×6 mesh on 4 workers, rows listed bottom-up.
const int kFigureGlobal[6][5] = {
    {0, 1, 2, 9, 10},     {3, 4, 5, 11, 12},    {6, 7, 8, 13, 14},
    {15, 16, 17, 24, 25}, {18, 19, 20, 26, 27}, {21, 22, 23, 28, 29},
};

}  // namespace

TEST_CASE("partition examples") {
  const Partition p = Partition::make(5, 6, 4, 1);
  CHECK(p.px == 2);
  CHECK(p.py == 2);
  CHECK(p.x_starts == std::vector<int>{0, 3, 5});
  CHECK(p.y_starts == std::vector<int>{0, 3, 6});
  CHECK(p.tile(0).count == std::array<int, 2>{3, 3});

  const Partition one = Partition::make(7, 3, 1, 2);
  CHECK(one.tiles.size() == 1);
  CHECK(one.tile(0).count == std::array<int, 2>{7, 3});

  const Partition even = Partition::make(8, 8, 4, 2);
  for (const Tile& t : even.tiles) CHECK(t.count == std::array<int, 2>{4, 4});

  const Partition wide = Partition::make(80, 40, 2, 2);
  CHECK(wide.px == 2);
  CHECK(wide.py == 1);
}

TEST_CASE("impossible partitions are rejected") {
  CHECK_THROWS_AS(Partition::make(2, 2, 5, 1), Error);
  CHECK_THROWS_AS(Partition::make(3, 3, 4, 2), Error);
  CHECK_THROWS_AS(Partition::make(4, 4, 0, 1), Error);
}

TEST_CASE("figure numbering") {
  const Partition p = Partition::make(5, 6, 4, 1);
  CHECK(p.natural_to_global(10) == 6);
  CHECK(p.natural_to_global(18) == 24);
  CHECK(p.natural_to_global(0) == 0);
  for (int j = 0; j < 6; ++j)
    for (int i = 0; i < 5; ++i) {
      CHECK(p.natural_to_global(j * 5 + i) == kFigureGlobal[j][i]);
      CHECK(p.global_to_natural(kFigureGlobal[j][i]) == j * 5 + i);
    }
  CHECK_THROWS_AS(p.natural_to_global(30), Error);
  CHECK_THROWS_AS(p.global_to_natural(-1), Error);
}

TEST_CASE("figure local numbering of worker 0") {
  const Partition p = Partition::make(5, 6, 4, 1);
  const LocalLayout l = local_layout(p, 0);
  CHECK(l.size() == 16);
  const std::set<int> halo{3, 7, 11, 12, 13, 14, 15};
  for (int local = 0; local < 16; ++local) {
    CHECK(l.cell(local) == std::array<int, 2>{local % 4, local / 4});
    CHECK(l.is_halo(local) == (halo.count(local) == 1));
    CHECK(l.local_index(local % 4, local / 4) == local);
  }
  CHECK_FALSE(l.local_index(4, 0).has_value());
  CHECK_FALSE(l.local_index(0, 4).has_value());
  // owned cells map onto the worker's contiguous global range
  std::set<int> globals;
  for (int local = 0; local < 16; ++local)
    if (!l.is_halo(local)) {
      const auto c = l.cell(local);
      globals.insert(p.natural_to_global(c[1] * 5 + c[0]));
    }
  CHECK(globals == std::set<int>{0, 1, 2, 3, 4, 5, 6, 7, 8});
}

TEST_CASE("random layouts cover the grid and number it bijectively") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> size(1, 40), workers(1, 16), halo(0, 3);
  int tested = 0;
  while (tested < 200) {
    const int mx = size(rng), my = size(rng), w = workers(rng), h = halo(rng);
    Partition p;
    try {
      p = Partition::make(mx, my, w, h);
    } catch (const Error&) {
      continue;
    }
    ++tested;
    CHECK(p.workers() == w);
    std::vector<int> owner(mx * my, -1);
    int expected_first = 0;
    for (const Tile& t : p.tiles) {
      CHECK(t.first_global == expected_first);
      expected_first += t.size();
      if (w > 1 && h > 0) {
        if (p.px > 1) CHECK(t.count[0] >= h);
        if (p.py > 1) CHECK(t.count[1] >= h);
      }
      for (int j = 0; j < t.count[1]; ++j)
        for (int i = 0; i < t.count[0]; ++i) {
          const int nat = (t.offset[1] + j) * mx + t.offset[0] + i;
          CHECK(owner[nat] == -1);
          owner[nat] = t.worker;
        }
    }
    CHECK(std::count(owner.begin(), owner.end(), -1) == 0);
    for (int d = 0; d < 2; ++d) {
      const auto& starts = d == 0 ? p.x_starts : p.y_starts;
      int lo = 1 << 30, hi = 0;
      for (std::size_t k = 0; k + 1 < starts.size(); ++k) {
        lo = std::min(lo, starts[k + 1] - starts[k]);
        hi = std::max(hi, starts[k + 1] - starts[k]);
      }
      CHECK(hi - lo <= 1);
    }
    std::vector<char> hit(mx * my, 0);
    for (int nat = 0; nat < mx * my; ++nat) {
      const int g = p.natural_to_global(nat);
      REQUIRE(g >= 0);
      REQUIRE(g < mx * my);
      CHECK(hit[g] == 0);
      hit[g] = 1;
      CHECK(p.global_to_natural(g) == nat);
      const Tile& t = p.tile(owner[nat]);
      CHECK(g >= t.first_global);
      CHECK(g < t.first_global + t.size());
      CHECK(p.owner(nat % mx, nat / mx) == owner[nat]);
    }
  }
}

TEST_CASE("halo exchange between two side-by-side workers") {
  const Partition p = Partition::make(4, 3, 2, 1);
  REQUIRE(p.px == 2);
  std::vector<State> tiles{tile_state(p, 0, 1, 1), tile_state(p, 1, 1, 1)};
  for (int j = 0; j < 3; ++j) {
    tiles[0].q(0, 1, j) = j + 1.0;
    tiles[1].q(0, 0, j) = 10.0 + j;
  }
  tiles[1].q(0, -1, 1) = -5.0;
  tiles[0].q(0, -1, 1) = -7.0;
  exchange_halos(tiles, p);
  for (int j = 0; j < 3; ++j) {
    CHECK(tiles[1].q(0, -1, j) == j + 1.0);
    CHECK(tiles[0].q(0, 2, j) == 10.0 + j);
  }
  // the physical side is left alone
  CHECK(tiles[0].q(0, -1, 1) == -7.0);
}

TEST_CASE("single-worker periodic exchange is a no-op") {
  const Partition p = Partition::make(4, 4, 1, 2);
  std::vector<State> tiles{tile_state(p, 0, 1, 2)};
  std::fill(tiles[0].q.values().begin(), tiles[0].q.values().end(), 3.0);
  tiles[0].q(0, 1, 1) = 9.0;
  const auto before = tiles[0].q.values();
  exchange_halos(tiles, p, true, true);
  CHECK(std::equal(before.begin(), before.end(), tiles[0].q.values().begin()));
}

TEST_CASE("ghost fills with halos match a serial fill including corners") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<BoundarySpec> specs;
  specs.push_back(BoundarySpec::uniform(2, Periodic{}));
  BoundarySpec mixed;
  mixed.sides = {{Wall{{1}}, Extrapolation{}}, {Wall{{2}}, Extrapolation{}}};
  specs.push_back(mixed);
  BoundarySpec half;
  half.sides = {{Periodic{}, Periodic{}}, {Extrapolation{}, Wall{{2}}}};
  specs.push_back(half);

  for (int workers : {2, 4, 6})
    for (const auto& spec : specs) {
      const int mx = 9, my = 8, g = 2;
      State full(Patch::whole({Dimension("x", 0, 1, mx), Dimension("y", 0, 1, my)}), 3, 0, g);
      for (double& v : full.q.values()) v = u(rng);
      auto tiles = scatter(full, Partition::make(mx, my, workers, g));
      apply_bcs(full, spec);
      const Partition p = Partition::make(mx, my, workers, g);
      run_workers(workers, [&](Communicator& comm) { fill_ghosts(comm, p, tiles[comm.rank()], spec); });
      for (int w = 0; w < workers; ++w) {
        const Tile& t = p.tile(w);
        for (int j = -g; j < t.count[1] + g; ++j)
          for (int i = -g; i < t.count[0] + g; ++i)
            for (int m = 0; m < 3; ++m)
              CHECK(tiles[w].q(m, i, j) == full.q(m, t.offset[0] + i, t.offset[1] + j));
      }
    }
}

TEST_CASE("max reduction") {
  const std::vector<double> values{0.3, 0.7, 0.1, 0.7};
  std::vector<double> got(4);
  run_workers(4, [&](Communicator& comm) { got[comm.rank()] = reduce_max(comm, values[comm.rank()]); });
  for (double g : got) CHECK(g == 0.7);

  std::vector<double> single(1);
  run_workers(1, [&](Communicator& comm) { single[0] = comm.allreduce_max(0.25); });
  CHECK(single[0] == 0.25);

  std::mt19937 rng(16);
  std::uniform_real_distribution<double> u(-100, 100);
  std::vector<double> random(16), results(16);
  for (double& v : random) v = u(rng);
  run_workers(16, [&](Communicator& comm) {
    for (int round = 0; round < 3; ++round) results[comm.rank()] = comm.allreduce_max(random[comm.rank()]);
  });
  const double serial = *std::max_element(random.begin(), random.end());
  for (double r : results) CHECK(r == serial);

  std::vector<double> nan_results(3);
  run_workers(3, [&](Communicator& comm) {
    nan_results[comm.rank()] = comm.allreduce_max(comm.rank() == 2 ? std::nan("") : 1.0);
  });
  for (double r : nan_results) CHECK(std::isnan(r));
}

TEST_CASE("natural-order gather") {
  const int mx = 5, my = 6;
  State full(Patch::whole({Dimension("x", 0, 1, mx), Dimension("y", 0, 1, my)}), 2, 0, 1);
  for (int j = 0; j < my; ++j)
    for (int i = 0; i < mx; ++i) {
      full.q(0, i, j) = std::sin(0.3 * i + 1.1 * j);
      full.q(1, i, j) = i * 100.0 + j;
    }
  std::vector<double> serial;
  for (int j = 0; j < my; ++j)
    for (int i = 0; i < mx; ++i) serial.insert(serial.end(), {full.q(0, i, j), full.q(1, i, j)});

  for (int workers : {1, 4}) {
    const Partition p = Partition::make(mx, my, workers, 1);
    auto tiles = scatter(full, p);
    CHECK(gather_natural(tiles, p) == serial);
    std::vector<double> at_root;
    run_workers(workers, [&](Communicator& comm) {
      auto g = gather_natural(comm, p, tiles[comm.rank()]);
      if (comm.rank() == 0) at_root = std::move(g);
      else CHECK(g.empty());
    });
    CHECK(at_root == serial);
  }
}

TEST_CASE("a silent peer surfaces as a timeout error") {
  CHECK_THROWS_WITH_AS(
      run_workers(2, [](Communicator& comm) {
        if (comm.rank() == 0) comm.recv(1, 7);
      }, std::chrono::milliseconds(100)),
      doctest::Contains("timed out"), Error);
}

TEST_CASE("a failing worker aborts its blocked peers") {
  CHECK_THROWS_WITH_AS(run_workers(3, [](Communicator& comm) {
                         if (comm.rank() == 1) throw Error("worker failure");
                         comm.allreduce_max(1.0);
                       }),
                       "worker failure", Error);
}

TEST_CASE("mismatched halo widths are rejected") {
  const Partition p = Partition::make(6, 2, 2, 2);
  std::vector<State> tiles{tile_state(p, 0, 1, 1), tile_state(p, 1, 1, 1)};
  CHECK_THROWS_AS(exchange_halos(tiles, p), Error);
}
