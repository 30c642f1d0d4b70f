#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "mph/grid_lattice.hpp"

using mph::GridLattice;
using mph::GridPoint;
using mph::join;
using mph::kernel_support;
using mph::leq;
using mph::meet;

namespace {

std::vector<GridPoint> all_points(const GridLattice& lat) {
  std::vector<GridPoint> pts;
  for (int x = 0; x <= lat.m; ++x)
    for (int y = 0; y <= lat.n; ++y) pts.push_back({x, y});
  return pts;
}

}  // namespace

TEST_CASE("meet and join examples") {
  CHECK(meet({2, 3}, {1, 5}) == GridPoint{1, 3});
  CHECK(join({2, 3}, {1, 5}) == GridPoint{2, 5});

  const GridLattice lat{7, 9};
  CHECK(meet({0, 0}, {lat.m, lat.n}) == GridPoint{0, 0});
  CHECK(join({0, 0}, {lat.m, lat.n}) == GridPoint{lat.m, lat.n});

  CHECK(meet({4, 4}, {4, 4}) == GridPoint{4, 4});
  CHECK(join({4, 4}, {4, 4}) == GridPoint{4, 4});
}

TEST_CASE("lattice axioms hold exhaustively on small lattices") {
  for (const GridLattice lat : {GridLattice{2, 3}, GridLattice{4, 2}, GridLattice{1, 1}}) {
    const auto pts = all_points(lat);
    for (const auto a : pts) {
      CHECK(meet(a, a) == a);
      CHECK(join(a, a) == a);
      for (const auto b : pts) {
        CHECK(meet(a, b) == meet(b, a));
        CHECK(join(a, b) == join(b, a));
        // absorption
        CHECK(meet(a, join(a, b)) == a);
        CHECK(join(a, meet(a, b)) == a);
        // order recovery
        const bool le = leq(a, b);
        CHECK((meet(a, b) == a) == le);
        CHECK((join(a, b) == b) == le);
        for (const auto c : pts) {
          CHECK(meet(meet(a, b), c) == meet(a, meet(b, c)));
          CHECK(join(join(a, b), c) == join(a, join(b, c)));
        }
      }
    }
  }
}

TEST_CASE("kernel_support evenly spaced sites") {
  const auto s40 = kernel_support({39, 39}, 4);
  CHECK(s40.xs == std::vector<int>{0, 13, 26, 39});
  CHECK(s40.ys == std::vector<int>{0, 13, 26, 39});

  const auto s20 = kernel_support({19, 19}, 4);
  CHECK(s20.xs == std::vector<int>{0, 6, 13, 19});

  const auto tiny = kernel_support({1, 1}, 2);
  CHECK(tiny.xs == std::vector<int>{0, 1});
  CHECK(tiny.ys == std::vector<int>{0, 1});

  // rectangular lattice: spacing follows each axis independently
  const auto rect = kernel_support({9, 19}, 4);
  CHECK(rect.xs == std::vector<int>{0, 3, 6, 9});
  CHECK(rect.ys == std::vector<int>{0, 6, 13, 19});
}

TEST_CASE("kernel_support always contains bottom and top coordinates") {
  for (int m = 1; m <= 12; ++m)
    for (int n = 1; n <= 12; ++n)
      for (int s = 2; s <= std::min(m, n) + 1; ++s) {
        const auto sup = kernel_support({m, n}, s);
        CHECK(sup.xs.front() == 0);
        CHECK(sup.xs.back() == m);
        CHECK(sup.ys.front() == 0);
        CHECK(sup.ys.back() == n);
        // sites sorted and distinct
        for (std::size_t i = 1; i < sup.xs.size(); ++i) CHECK(sup.xs[i] > sup.xs[i - 1]);
        for (std::size_t i = 1; i < sup.ys.size(); ++i) CHECK(sup.ys[i] > sup.ys[i - 1]);
      }
}

TEST_CASE("kernel_support rejects invalid side counts") {
  CHECK_THROWS_AS(kernel_support({5, 5}, 1), std::invalid_argument);
  CHECK_THROWS_AS(kernel_support({5, 5}, 0), std::invalid_argument);
  CHECK_THROWS_AS(kernel_support({3, 5}, 5), std::invalid_argument);
}
