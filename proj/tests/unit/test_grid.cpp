#include <doctest.h>

#include <cstdio>
#include <random>

#include "fracphase/grid.hpp"

using namespace fracphase;

TEST_CASE("build_domain cell counts") {
  const auto d1 = BoxDomain::create(1, {-1.0}, {1.0}, 0.5, 1.0);
  CHECK(d1.interior_count() == 4);
  CHECK(d1.cell_count() - d1.interior_count() == 4);

  const auto d2 = BoxDomain::create(2, {0.0, 0.0}, {1.0, 1.0}, 0.25, 0.5);
  CHECK(d2.interior_count() == 16);
  CHECK(d2.cell_count() - d2.interior_count() == 48);
}

TEST_CASE("build_domain rejects non-divisible extents") {
  CHECK_THROWS_AS(BoxDomain::create(1, {0.0}, {1.0}, 0.3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(BoxDomain::create(1, {0.0}, {1.0}, 0.25, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(BoxDomain::create(1, {1.0}, {0.0}, 0.25, 0.0), std::invalid_argument);
}

TEST_CASE("cell centers and interior flags") {
  const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.5, 1.0);
  CHECK(d.nx() == 8);
  CHECK(d.center(0)[0] == doctest::Approx(-1.75));
  CHECK(!d.is_interior(0));
  CHECK(d.is_interior(d.cell(2)));
}

TEST_CASE("to_field maps masks to +/-1") {
  const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.25, 0.5);
  IndicatorSet empty;
  empty.domain = d;
  empty.mask.assign(d.cell_count(), 0);
  const auto fe = to_field(empty);
  for (double v : fe.values) CHECK(v == -1.0);
  CHECK(fe.exterior.kind == ExteriorSpec::Kind::Constant);
  CHECK(fe.exterior.constant == -1.0);

  IndicatorSet full = empty;
  full.mask.assign(d.cell_count(), 1);
  full.ext_kind = IndicatorSet::ExteriorMask::AllTrue;
  for (double v : to_field(full).values) CHECK(v == 1.0);

  const auto half = IndicatorSet::half_space(d, 0, 0.0);
  const auto fh = to_field(half);
  for (int c = 0; c < d.cell_count(); ++c)
    CHECK(fh.values[c] == (d.center(c)[0] > 0 ? 1.0 : -1.0));
}

TEST_CASE("threshold recovers the mask") {
  const auto d = BoxDomain::create(2, {0.0, 0.0}, {1.0, 1.0}, 0.25, 0.25);
  std::mt19937_64 rng(3);
  IndicatorSet set;
  set.domain = d;
  set.mask.resize(d.cell_count());
  for (auto& m : set.mask) m = rng() & 1;
  const auto back = threshold_field(to_field(set));
  CHECK(back.mask == set.mask);
}

TEST_CASE("l1_distance examples") {
  const auto d = BoxDomain::create(1, {0.0}, {1.0}, 0.25, 0.0);
  const auto region = d.interior_cells();
  auto a = ScalarField::constant(d, 0.0);
  auto b = ScalarField::constant(d, 1.0);
  CHECK(l1_distance(a, a, region) == 0.0);
  CHECK(l1_distance(a, b, region) == doctest::Approx(1.0));
  auto p = ScalarField::constant(d, 1.0);
  auto q = ScalarField::constant(d, -1.0);
  CHECK(l1_distance(p, q, region) == doctest::Approx(2.0 * 1.0));

  const auto other = BoxDomain::create(1, {0.0}, {1.0}, 0.5, 0.0);
  auto c = ScalarField::constant(other, 0.0);
  CHECK_THROWS_AS(l1_distance(a, c, region), std::invalid_argument);
}

TEST_CASE("l1_distance is a metric on random fields") {
  const auto d = BoxDomain::create(1, {0.0}, {1.0}, 0.125, 0.0);
  const auto region = d.interior_cells();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto randf = [&] {
    auto f = ScalarField::constant(d, 0.0);
    for (auto& v : f.values) v = dist(rng);
    return f;
  };
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = randf(), b = randf(), c = randf();
    const double ab = l1_distance(a, b, region);
    CHECK(ab >= 0.0);
    CHECK(ab == l1_distance(b, a, region));
    CHECK(ab <= l1_distance(a, c, region) + l1_distance(c, b, region) + 1e-14);
  }
  const auto a = randf();
  CHECK(l1_distance(a, a, region) == 0.0);
}

TEST_CASE("mask round trip through text files") {
  const auto d = BoxDomain::create(2, {-0.5, -0.5}, {0.5, 0.5}, 0.25, 0.25);
  const auto set = IndicatorSet::half_space(d, 1, 0.0);
  const std::string path = "test_mask_roundtrip.txt";
  write_mask(path, set);
  const auto back = read_mask(path);
  CHECK(back.domain.same_grid(d));
  CHECK(back.mask == set.mask);
  std::remove(path.c_str());
}
