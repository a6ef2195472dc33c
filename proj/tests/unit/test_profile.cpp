#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "fracphase/profile.hpp"

using namespace fracphase;

namespace {

// One quick profile shared by the tests in this file (L and h at the loose
// end of the allowed range to stay fast).
const ProfileResult& quick_profile() {
  static const ProfileResult pr = [] {
    ProfileOptions opt;
    opt.max_iters = 12000;
    auto r = solve_profile(frac_order(0.75), 20.0, 0.05, quartic_double_well(), opt);
    estimate_bstar(r);
    return r;
  }();
  return pr;
}

}  // namespace

TEST_CASE("transverse kernel moment") {
  CHECK(transverse_moment(1, 0.6) == 1.0);
  CHECK(transverse_moment(2, 0.5) == doctest::Approx(2.0).epsilon(1e-12));
  const double c34 = std::sqrt(M_PI) * std::tgamma(1.25) / std::tgamma(1.75);
  CHECK(transverse_moment(2, 0.75) == doctest::Approx(c34).epsilon(1e-12));
}

TEST_CASE("solve_profile validates its arguments") {
  CHECK_THROWS_AS(solve_profile(frac_order(0.75), 10.0, 0.05, quartic_double_well()),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_profile(frac_order(0.75), 20.0, 0.1, quartic_double_well()),
                  std::invalid_argument);
}

TEST_CASE("profile is centered, monotone and odd") {
  const auto& pr = quick_profile();
  CHECK(pr.monotone);
  CHECK(pr.converged);
  // zero crossing at t = 0 after recentering
  ProfileTable tab;
  tab.t = pr.t;
  tab.u = pr.u;
  CHECK(std::abs(tab.eval(0.0)) <= 1e-9);
  CHECK(pr.antisymmetry_defect <= 1e-6);
}

TEST_CASE("profile tails decay algebraically") {
  const auto& pr = quick_profile();
  // -2s within a loose margin at this resolution; the acceptance run uses
  // L = 40, h = 0.02 with the pinned 15% margin.
  CHECK(pr.decay_exponent_fit == doctest::Approx(-1.5).epsilon(0.35));
  CHECK(pr.derivative_decay_fit == doctest::Approx(-2.5).epsilon(0.35));
}

TEST_CASE("ladder is Cauchy with positive limit and shrinking exterior share") {
  const auto& pr = quick_profile();
  CHECK(pr.b_star > 0.0);
  CHECK(pr.c_star == pr.b_star);  // ambient_dim = 1
  REQUIRE(pr.r_ladder.size() >= 4);
  for (std::size_t k = 2; k < pr.r_ladder.size(); ++k) {
    const double d1 = std::abs(pr.r_ladder[k].second - pr.r_ladder[k - 1].second);
    const double d0 = std::abs(pr.r_ladder[k - 1].second - pr.r_ladder[k - 2].second);
    CHECK(d1 <= d0 * 1.25 + 1e-12);
  }
  for (std::size_t k = 1; k < pr.exterior_share.size(); ++k)
    CHECK(pr.exterior_share[k].second <= pr.exterior_share[k - 1].second + 1e-12);
}

TEST_CASE("profiles from different initializations agree up to translation") {
  ProfileOptions opt;
  opt.max_iters = 12000;
  const auto base = quick_profile();
  // Re-solve from a random initialization by reproducing the solver loop.
  const auto domain = BoxDomain::create(1, {-20.0}, {20.0}, 0.05, 8 * 0.05);
  WeightOptions wopt;
  wopt.refinement = 8;
  const auto weights = KernelWeights::build(domain, 0.75, wopt);
  const auto ext = ExteriorSpec::sign_pattern(SignRegion::half_space(0, 0.0));
  const auto u0 = initial_field(domain, ext, MinimizeConfig::Init::RandomSeeded, 99);
  MinimizeConfig cfg;
  cfg.max_iters = 24000;
  cfg.grad_tol = 1e-10 * domain.h();
  cfg.stall_rel_tol = 1e-14;
  cfg.stall_window = 40;
  const auto res = minimize(u0, cfg, weights, quartic_double_well(), 1.0, frac_order(0.75));
  // recenter and compare by interpolation
  const auto interior = domain.interior_cells();
  std::vector<double> tt, uu;
  for (int c : interior) {
    tt.push_back(domain.center(c)[0]);
    uu.push_back(res.field.values[c]);
  }
  double t0 = 0.0;
  for (std::size_t k = 0; k + 1 < uu.size(); ++k)
    if (uu[k] <= 0.0 && uu[k + 1] > 0.0) {
      t0 = tt[k] - uu[k] * (tt[k + 1] - tt[k]) / (uu[k + 1] - uu[k]);
      break;
    }
  ProfileTable ours, theirs;
  for (std::size_t k = 0; k < tt.size(); ++k) ours.t.push_back(tt[k] - t0);
  ours.u = uu;
  theirs.t = base.t;
  theirs.u = base.u;
  double sup = 0.0;
  for (double q = -8.0; q <= 8.0; q += 0.05)
    sup = std::max(sup, std::abs(ours.eval(q) - theirs.eval(q)));
  CHECK(sup <= 1e-4);
}

TEST_CASE("recovery sequence interpolates the profile across the interface") {
  const auto& pr = quick_profile();
  const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.0125, 0.05);
  const auto A = IndicatorSet::half_space(d, 0, 0.0);
  const auto u = recovery_sequence(A, pr, 0.1);
  // boundary-straddling cells stay strictly inside (-1, 1)
  for (int c = 0; c < d.cell_count(); ++c)
    if (std::abs(d.center(c)[0]) < 0.05) {
      CHECK(std::abs(u.values[c]) < 1.0);
    }
  CHECK(u.exterior.kind == ExteriorSpec::Kind::Profile);
  CHECK(u.exterior.has_evaluator());

  // eps ladder: L1 distance to the indicator field decreases
  const auto chi = to_field(A);
  const auto interior = d.interior_cells();
  double prev = 1e9;
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto ue = recovery_sequence(A, pr, eps);
    const double dist = l1_distance(ue, chi, interior);
    CHECK(dist < prev);
    prev = dist;
  }
}

TEST_CASE("nonlocal perimeter: empty set, FK identity, h-refinement") {
  // empty set with exterior -1
  {
    const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.125, 0.25);
    const auto w = KernelWeights::build(d, 0.25, 8);
    IndicatorSet empty;
    empty.domain = d;
    empty.mask.assign(d.cell_count(), 0);
    CHECK(nonlocal_perimeter(empty, w).value == 0.0);
    CHECK(!nonlocal_perimeter(empty, w).divergent_warning);
  }
  // equals F_eps of the sharp field for every eps when s < 1/2
  {
    const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.125, 0.25);
    const auto w = KernelWeights::build(d, 0.25, 8);
    const auto E = IndicatorSet::half_space(d, 0, 0.0);
    const double per = nonlocal_perimeter(E, w).value;
    for (double eps : {0.3, 0.05})
      CHECK(total_energy(to_field(E), w, quartic_double_well(), eps, frac_order(0.25)).f_eps ==
            per);
  }
  // halving h converges (successive relative change < 5%)
  {
    double prev = 0.0;
    bool first = true;
    for (double h : {0.1, 0.05, 0.025}) {
      const auto d = BoxDomain::create(1, {-1.0}, {1.0}, h, 4 * h);
      const auto w = KernelWeights::build(d, 0.25, 8);
      const auto E = IndicatorSet::half_space(d, 0, 0.0);
      const double val = nonlocal_perimeter(E, w).value;
      if (!first) CHECK(std::abs(val - prev) / prev < 0.05);
      prev = val;
      first = false;
    }
  }
  // divergence warning for s >= 1/2
  {
    const auto d = BoxDomain::create(1, {-1.0}, {1.0}, 0.125, 0.25);
    const auto w = KernelWeights::build(d, 0.75, 8);
    const auto E = IndicatorSet::half_space(d, 0, 0.0);
    CHECK(nonlocal_perimeter(E, w).divergent_warning);
  }
}

TEST_CASE("profile serialization round trip") {
  const auto& pr = quick_profile();
  write_profile("profile_roundtrip_test", pr);
  const auto back = load_profile("profile_roundtrip_test");
  CHECK(back.s.s == pr.s.s);
  CHECK(back.ambient_dim == pr.ambient_dim);
  CHECK(back.b_star == pr.b_star);
  CHECK(back.c_star == pr.c_star);
  REQUIRE(back.t.size() == pr.t.size());
  CHECK(back.t.front() == pr.t.front());
  CHECK(back.u.back() == pr.u.back());
  REQUIRE(back.r_ladder.size() == pr.r_ladder.size());
  for (const char* suffix : {"_samples.csv", "_summary.csv", "_ladder.csv"})
    std::remove((std::string("profile_roundtrip_test") + suffix).c_str());
}
