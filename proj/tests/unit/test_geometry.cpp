#include <doctest.h>

#include <cmath>

#include "fracphase/geometry.hpp"

using namespace fracphase;

TEST_CASE("signed distance to a half-plane is the coordinate") {
  const auto d = BoxDomain::create(2, {-0.5, -0.5}, {0.5, 0.5}, 0.125, 0.25);
  const auto A = IndicatorSet::half_space(d, 0, 0.0);
  const auto dist = signed_distance(A);
  for (int c = 0; c < d.cell_count(); ++c) {
    const double x1 = d.center(c)[0];
    CHECK(dist[c] == doctest::Approx(x1).epsilon(1e-12));
  }
}

TEST_CASE("signed distance from the center of a unit square is +1/2") {
  const auto d = BoxDomain::create(2, {-1.0, -1.0}, {1.0, 1.0}, 0.125, 0.25);
  SignRegion square;
  square.lo = {-0.5, -0.5};
  square.hi = {0.5, 0.5};
  const auto A = IndicatorSet::from_region(d, square);
  const auto dist = signed_distance(A);
  // cell nearest the origin: centers sit at odd multiples of h/2
  int best = 0;
  double bd = 1e9;
  for (int c = 0; c < d.cell_count(); ++c) {
    const auto x = d.center(c);
    const double r = std::hypot(x[0], x[1]);
    if (r < bd) {
      bd = r;
      best = c;
    }
  }
  const auto xb = d.center(best);
  const double expected = 0.5 - std::max(std::abs(xb[0]), std::abs(xb[1]));
  CHECK(dist[best] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(dist[best] > 0.4);
}

TEST_CASE("signed distance flips sign exactly across the boundary") {
  const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.25, 0.25);
  const auto A = IndicatorSet::half_space(d, 0, 0.0);
  const auto dist = signed_distance(A);
  for (int c = 0; c + 1 < d.cell_count(); ++c) {
    if (A.mask[c] != A.mask[c + 1]) {
      CHECK(dist[c] * dist[c + 1] < 0.0);
      CHECK(std::abs(dist[c]) == doctest::Approx(0.125));
    }
  }
}

TEST_CASE("signed distance rejects empty and full sets") {
  const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.25, 0.25);
  IndicatorSet empty;
  empty.domain = d;
  empty.mask.assign(d.cell_count(), 0);
  CHECK_THROWS_AS(signed_distance(empty), std::invalid_argument);
  IndicatorSet full = empty;
  full.mask.assign(d.cell_count(), 1);
  full.ext_kind = IndicatorSet::ExteriorMask::AllTrue;
  CHECK_THROWS_AS(signed_distance(full), std::invalid_argument);
}

TEST_CASE("pixel perimeter of a single cell is 4h") {
  const auto d = BoxDomain::create(2, {0.0, 0.0}, {1.0, 1.0}, 0.1, 0.2);
  IndicatorSet one;
  one.domain = d;
  one.mask.assign(d.cell_count(), 0);
  // pick an interior cell away from the boundary
  const auto interior = d.interior_cells();
  one.mask[interior[interior.size() / 2]] = 1;
  const auto all = d.all_cells();
  CHECK(pixel_perimeter(one, all) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("pixel perimeter of a half-plane through the unit square is 1") {
  const auto d = BoxDomain::create(2, {0.0, 0.0}, {1.0, 1.0}, 0.1, 0.2);
  const auto E = IndicatorSet::half_space(d, 0, 0.5);
  CHECK(pixel_perimeter(E, d.interior_cells()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pixel perimeter vanishes when E covers the region") {
  const auto d = BoxDomain::create(2, {0.0, 0.0}, {1.0, 1.0}, 0.1, 0.2);
  IndicatorSet full;
  full.domain = d;
  full.mask.assign(d.cell_count(), 0);
  for (int c : d.interior_cells()) full.mask[c] = 1;
  CHECK(pixel_perimeter(full, d.interior_cells()) == 0.0);
}
