#include <doctest.h>

#include <cmath>
#include <random>

#include "fracphase/energy.hpp"

using namespace fracphase;

namespace {

ScalarField random_field(const BoxDomain& d, std::uint64_t seed,
                         ExteriorSpec ext = ExteriorSpec::constant_value(-1.0)) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto u = ScalarField::constant(d, 0.0, std::move(ext));
  for (auto& v : u.values) v = dist(rng);
  return u;
}

}  // namespace

TEST_CASE("quartic potential satisfies every condition") {
  const auto rep = validate_potential(quartic_double_well());
  CHECK(rep.zero_at_plus_one);
  CHECK(rep.zero_at_minus_one);
  CHECK(rep.positive_inside);
  CHECK(rep.flat_at_walls);
  CHECK(rep.convex_at_walls);
  CHECK(rep.pass());
  CHECK(quartic_double_well().value(0.0) == doctest::Approx(0.25));
}

TEST_CASE("single-well 1-u^2 fails the wall conditions") {
  PotentialSpec p;
  p.value = [](double u) { return 1.0 - u * u; };
  p.first_derivative = [](double u) { return -2.0 * u; };
  p.second_derivative = [](double) { return -2.0; };
  p.name = "concave";
  const auto rep = validate_potential(p);
  CHECK(rep.zero_at_plus_one);
  CHECK(!rep.flat_at_walls);
  CHECK(!rep.convex_at_walls);
  CHECK(!rep.pass());
}

TEST_CASE("regime tags and scaling factors") {
  CHECK(scaling_factor(0.1, frac_order(0.25)) == doctest::Approx(0.316227766016838).epsilon(1e-12));
  CHECK(scaling_factor(0.1, frac_order(0.5)) == doctest::Approx(0.230258509299405).epsilon(1e-12));
  CHECK(scaling_factor(0.1, frac_order(0.75)) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK_THROWS_AS(scaling_factor(1.0, frac_order(0.5)), std::invalid_argument);
  CHECK_THROWS_AS(FracOrder(0.4, SRegime::Half), std::invalid_argument);
  CHECK_THROWS_AS(FracOrder(0.5, SRegime::AboveHalf), std::invalid_argument);
  CHECK(frac_order(0.5).regime == SRegime::Half);
}

TEST_CASE("pure phase has zero energy") {
  const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.125, 0.25);
  const auto w = KernelWeights::build(d, 0.75, 4);
  const auto u = ScalarField::constant(d, 1.0, ExteriorSpec::constant_value(1.0));
  const auto b = total_energy(u, w, quartic_double_well(), 0.1, frac_order(0.75));
  CHECK(b.interior_seminorm == 0.0);
  CHECK(b.exterior_interaction == 0.0);
  CHECK(b.potential == 0.0);
  CHECK(b.j_eps == 0.0);
  CHECK(b.f_eps == 0.0);
  CHECK(b.i_eps == 0.0);
}

TEST_CASE("sharp interfaces make F identical to K for s < 1/2") {
  const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.125, 0.25);
  const auto w = KernelWeights::build(d, 0.25, 8);
  const auto u = to_field(IndicatorSet::half_space(d, 0, 0.0));
  const double k = gagliardo(u, w);
  const auto p = quartic_double_well();
  for (double eps : {0.1, 0.01}) {
    const auto b = total_energy(u, w, p, eps, frac_order(0.25));
    CHECK(b.f_eps == k);  // bit-for-bit
    CHECK(b.i_is_f_convention);
    CHECK(b.i_eps == b.f_eps);
  }
}

TEST_CASE("I_eps is bounded by F_eps on random fields") {
  const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.125, 0.25);
  const auto p = quartic_double_well();
  for (double s_val : {0.5, 0.75}) {
    const auto w = KernelWeights::build(d, s_val, 4);
    for (int trial = 0; trial < 10; ++trial) {
      const auto u = random_field(d, 100 + trial);
      const auto b = total_energy(u, w, p, 0.07, frac_order(s_val));
      CHECK(b.i_eps <= b.f_eps * (1.0 + 1e-12) + 1e-15);
    }
  }
}

TEST_CASE("gradient vanishes at the global minimum") {
  const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.25, 0.5);
  const auto w = KernelWeights::build(d, 0.5, 4);
  const auto u = ScalarField::constant(d, 1.0, ExteriorSpec::constant_value(1.0));
  const auto g = energy_gradient(u, w, quartic_double_well(), 0.1, frac_order(0.5));
  for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("gradient matches central differences") {
  const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.25, 0.5);
  const auto p = quartic_double_well();
  for (double s_val : {0.25, 0.75}) {
    const auto w = KernelWeights::build(d, s_val, 4);
    const FracOrder s = frac_order(s_val);
    auto u = random_field(d, 42, ExteriorSpec::sign_pattern(SignRegion::half_space(0, 0.0)));
    for (auto& v : u.values) v *= 0.9;  // keep away from the box bounds
    const auto g = energy_gradient(u, w, p, 0.1, s);
    EnergyEvaluator ev(u, w, p, 0.1, s);
    const double step = 1e-6;
    for (int c : d.interior_cells()) {
      auto up = u.values, dn = u.values;
      up[c] += step;
      dn[c] -= step;
      const double fd = (ev.j_energy(up) - ev.j_energy(dn)) / (2.0 * step);
      CHECK(g[c] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("odd fields have mirror-antisymmetric gradients") {
  const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.125, 0.25);
  const auto w = KernelWeights::build(d, 0.75, 4);
  auto u = ScalarField::constant(d, 0.0, ExteriorSpec::sign_pattern(SignRegion::half_space(0, 0.0)));
  for (int c = 0; c < d.cell_count(); ++c) {
    const double x = d.center(c)[0];
    u.values[c] = std::tanh(2.0 * x);
  }
  const auto g = energy_gradient(u, w, quartic_double_well(), 0.1, frac_order(0.75));
  const int n = d.cell_count();
  for (int c = 0; c < n; ++c) {
    const int mirror = n - 1 - c;
    CHECK(g[c] == doctest::Approx(-g[mirror]).epsilon(1e-10));
  }
}

TEST_CASE("F subadditive and I superadditive on random disjoint pairs") {
  const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.125, 0.25);
  const auto p = quartic_double_well();
  const auto interior = d.interior_cells();
  std::mt19937_64 rng(7);
  for (double s_val : {0.5, 0.75}) {
    const auto w = KernelWeights::build(d, s_val, 4);
    for (int trial = 0; trial < 10; ++trial) {
      const auto u = random_field(d, 500 + trial);
      std::vector<int> E, F;
      for (int c : interior) (rng() & 1 ? E : F).push_back(c);
      if (E.empty() || F.empty()) continue;
      const auto rep = subadditivity_check(u, w, p, 0.05, frac_order(s_val), E, F);
      CHECK(rep.f_subadditive);
      CHECK(rep.i_superadditive);
    }
  }
}

TEST_CASE("subadditivity is equality for constants and strict for interfaces") {
  const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.125, 0.25);
  const auto p = quartic_double_well();
  const auto w = KernelWeights::build(d, 0.75, 4);
  const auto interior = d.interior_cells();
  std::vector<int> E(interior.begin(), interior.begin() + interior.size() / 2);
  std::vector<int> F(interior.begin() + interior.size() / 2, interior.end());

  const auto uc = ScalarField::constant(d, 1.0, ExteriorSpec::constant_value(1.0));
  const auto req = subadditivity_check(uc, w, p, 0.1, frac_order(0.75), E, F);
  CHECK(req.f_union == 0.0);
  CHECK(req.f_first + req.f_second == 0.0);

  // interface inside E
  const auto us = to_field(IndicatorSet::half_space(d, 0, -0.5));
  const auto rep = subadditivity_check(us, w, p, 0.1, frac_order(0.75), E, F);
  CHECK(rep.f_union < rep.f_first + rep.f_second - 1e-9);
}

TEST_CASE("discrete rescaling identity on matched grids") {
  // u on (-2,2) with h = 0.1; u_eps(x) = u(x/eps) on (-1,1) with h = 0.05.
  const double eps = 0.5;
  const auto big = BoxDomain::create(1, {-2.0}, {2.0}, 0.1, 0.4);
  const auto small = BoxDomain::create(1, {-1.0}, {1.0}, 0.05, 0.2);
  REQUIRE(big.cell_count() == small.cell_count());
  const auto ext = ExteriorSpec::sign_pattern(SignRegion::half_space(0, 0.0));
  auto u = ScalarField::constant(big, 0.0, ext);
  for (int c = 0; c < big.cell_count(); ++c)
    u.values[c] = std::tanh(1.7 * big.center(c)[0]);
  auto ueps = ScalarField::constant(small, 0.0, ext);
  ueps.values = u.values;

  const auto p = quartic_double_well();
  for (double s_val : {0.25, 0.5, 0.75}) {
    const auto wbig = KernelWeights::build(big, s_val, 8);
    const auto wsmall = KernelWeights::build(small, s_val, 8);
    const FracOrder s = frac_order(s_val);
    const double E_unscaled = total_energy(u, wbig, p, 1.0, s).j_eps;
    const double F_eps = total_energy(ueps, wsmall, p, eps, s).f_eps;
    double predicted;
    if (s.regime == SRegime::BelowHalf)
      predicted = std::pow(eps, 1.0 - 2.0 * s_val) * E_unscaled;
    else if (s.regime == SRegime::Half)
      predicted = E_unscaled / std::abs(std::log(eps));
    else
      predicted = E_unscaled;  // eps^{n-1} with n = 1
    CHECK(F_eps == doctest::Approx(predicted).epsilon(1e-12));
  }
}

TEST_CASE("F_eps varies continuously along an eps ladder within a regime") {
  const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.125, 0.25);
  const auto w = KernelWeights::build(d, 0.75, 4);
  const auto p = quartic_double_well();
  const auto u = random_field(d, 9);
  double prev = 0.0;
  bool first = true;
  for (double eps = 0.2; eps > 0.05; eps *= 0.98) {
    const double f = total_energy(u, w, p, eps, frac_order(0.75)).f_eps;
    if (!first) CHECK(std::abs(f - prev) / std::abs(prev) < 0.1);
    prev = f;
    first = false;
  }
}

TEST_CASE("breakdown invariants hold") {
  const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.125, 0.25);
  const auto w = KernelWeights::build(d, 0.5, 4);
  const auto u = random_field(d, 77);
  const auto b = total_energy(u, w, quartic_double_well(), 0.07, frac_order(0.5));
  const double j = std::pow(0.07, 1.0) * (b.interior_seminorm + b.exterior_interaction) +
                   b.potential;
  CHECK(b.j_eps == doctest::Approx(j).epsilon(1e-12));
  CHECK(b.f_eps == doctest::Approx(b.j_eps / scaling_factor(0.07, frac_order(0.5))).epsilon(1e-12));
}
