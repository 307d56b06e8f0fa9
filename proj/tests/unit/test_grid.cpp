#include <catch_amalgamated.hpp>

#include "nsplab/grid.hpp"

using namespace nsplab;

TEST_CASE("grid coordinates are bit-reproducible from (origin, spacing, index)",
          "[grid]") {
  const Grid g(1, 7, 0.125, {-0.4375, 0.0});
  for (int i = 0; i < g.size(); ++i) {
    REQUIRE(g.x(i) == -0.4375 + i * 0.125);
  }
  const Grid g2(2, 5, 0.25, {-0.5, -0.5});
  REQUIRE(g2.size() == 25);
  const auto c = g2.coords(g2.flatten(3, 2));
  REQUIRE(c[0] == -0.5 + 3 * 0.25);
  REQUIRE(c[1] == -0.5 + 2 * 0.25);
}

TEST_CASE("dirichlet_1d places interior points symmetrically", "[grid]") {
  const Grid g = Grid::dirichlet_1d(-1.0, 1.0, 3);
  REQUIRE(g.spacing == Catch::Approx(0.5));
  REQUIRE(g.x(0) == Catch::Approx(-0.5));
  REQUIRE(g.x(2) == Catch::Approx(0.5));
}

TEST_CASE("mask algebra: full, complement, counts", "[grid]") {
  const Grid g(1, 10, 0.1);
  auto full = DomainMask::full(g);
  REQUIRE(full.count() == 10);
  auto none = full.complement();
  REQUIRE(none.count() == 0);

  DomainMask half(g, "half");
  for (int i = 0; i < 5; ++i) half.in[i] = true;
  REQUIRE(half.complement().count() == 5);
  REQUIRE(half.symmetric_difference_count(full) == 5);
}

TEST_CASE("mask distance equals min pairwise point distance", "[grid]") {
  const Grid g(1, 10, 0.5, {0.0, 0.0});
  DomainMask a(g, "a"), b(g, "b");
  a.in[0] = a.in[1] = true;       // x = 0.0, 0.5
  b.in[5] = b.in[9] = true;       // x = 2.5, 4.5
  REQUIRE(mask_distance(a, b) == Catch::Approx(2.0));
  REQUIRE(std::isinf(mask_distance(a, DomainMask(g))));
}

TEST_CASE("connected components split an annular 2D mask correctly", "[grid]") {
  const Grid g = Grid::dirichlet_2d(-1.0, 1.0, 21);
  DomainMask allowed(g, "allowed");
  // allowed = everything except a square ring (the "barrier")
  for (int i = 0; i < g.size(); ++i) {
    const auto c = g.coords(i);
    const double r = std::max(std::abs(c[0]), std::abs(c[1]));
    allowed.in[i] = !(r > 0.3 && r < 0.6);
  }
  const auto comps = connected_components(allowed);
  REQUIRE(comps.size() == 2);
  int interior = -1, exterior = -1;
  for (size_t k = 0; k < comps.size(); ++k) {
    if (touches_box_boundary(comps[k]))
      exterior = static_cast<int>(k);
    else
      interior = static_cast<int>(k);
  }
  REQUIRE(interior >= 0);
  REQUIRE(exterior >= 0);
  REQUIRE(comps[interior].count() < comps[exterior].count());
}

TEST_CASE("distance_to_mask is exact on a line", "[grid]") {
  const Grid g(1, 9, 1.0, {0.0, 0.0});
  DomainMask target(g, "t");
  target.in[4] = true;  // x = 4
  const auto d = distance_to_mask(target);
  for (int i = 0; i < 9; ++i) REQUIRE(d(i) == Catch::Approx(std::abs(i - 4.0)));
}
