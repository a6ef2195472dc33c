#include <doctest.h>

#include <cmath>

#include "fracphase/minimize.hpp"

using namespace fracphase;

namespace {

struct Setup1D {
  BoxDomain domain;
  KernelWeights weights;
  PotentialSpec p = quartic_double_well();
  FracOrder s;
  double eps;
  Setup1D(double s_val, double eps_, double h, double extent = 1.0)
      : domain(BoxDomain::create(1, {-extent}, {extent}, h, 4 * h)),
        weights(KernelWeights::build(domain, s_val, 8)),
        s(frac_order(s_val)),
        eps(eps_) {}
};

}  // namespace

TEST_CASE("global minimum converges immediately") {
  Setup1D ctx(0.75, 0.1, 0.05);
  const auto ext = ExteriorSpec::constant_value(1.0);
  const auto u0 = initial_field(ctx.domain, ext, MinimizeConfig::Init::ExteriorExtension, 0);
  MinimizeConfig cfg;
  const auto res = minimize(u0, cfg, ctx.weights, ctx.p, ctx.eps, ctx.s);
  CHECK(res.converged);
  CHECK(res.iterations == 0);
  CHECK(res.final_energy.f_eps == 0.0);
}

TEST_CASE("1D minimizer is odd and increasing with sign exterior") {
  Setup1D ctx(0.75, 0.1, 0.01);
  const auto ext = ExteriorSpec::sign_pattern(SignRegion::half_space(0, 0.0));
  const auto u0 = initial_field(ctx.domain, ext, MinimizeConfig::Init::SharpInterface, 0);
  MinimizeConfig cfg;
  cfg.max_iters = 4000;
  const auto res = minimize(u0, cfg, ctx.weights, ctx.p, ctx.eps, ctx.s);
  const auto interior = ctx.domain.interior_cells();
  const int n = static_cast<int>(interior.size());
  for (int k = 0; k < n; ++k) {
    const double left = res.field.values[interior[k]];
    const double right = res.field.values[interior[n - 1 - k]];
    CHECK(std::abs(left + right) <= 1e-6);
    if (k + 1 < n)
      CHECK(res.field.values[interior[k + 1]] >= res.field.values[interior[k]] - 1e-10);
  }
  // minimality vs the sharp-interface competitor (its own starting point)
  const auto competitor = total_energy(u0, ctx.weights, ctx.p, ctx.eps, ctx.s);
  CHECK(res.final_energy.f_eps <= competitor.f_eps);
}

TEST_CASE("energy trace is monotone and frozen cells never move") {
  Setup1D ctx(0.5, 0.1, 0.025);
  const auto ext = ExteriorSpec::sign_pattern(SignRegion::half_space(0, 0.0));
  const auto u0 = initial_field(ctx.domain, ext, MinimizeConfig::Init::RandomSeeded, 3);
  MinimizeConfig cfg;
  cfg.max_iters = 300;
  // freeze everything left of -0.5
  const auto interior = ctx.domain.interior_cells();
  for (int c : interior)
    if (ctx.domain.center(c)[0] > -0.5) cfg.free_region.push_back(c);
  const auto res = minimize(u0, cfg, ctx.weights, ctx.p, ctx.eps, ctx.s);
  for (std::size_t k = 1; k < res.energy_trace.size(); ++k)
    CHECK(res.energy_trace[k] <= res.energy_trace[k - 1] + 1e-12);
  for (int c : interior)
    if (ctx.domain.center(c)[0] <= -0.5) CHECK(res.field.values[c] == u0.values[c]);
  for (double v : res.field.values) CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("identical seeds give identical traces") {
  Setup1D ctx(0.75, 0.1, 0.025);
  const auto ext = ExteriorSpec::sign_pattern(SignRegion::half_space(0, 0.0));
  const auto u0 = initial_field(ctx.domain, ext, MinimizeConfig::Init::RandomSeeded, 11);
  MinimizeConfig cfg;
  cfg.max_iters = 60;
  const auto a = minimize(u0, cfg, ctx.weights, ctx.p, ctx.eps, ctx.s);
  const auto b = minimize(u0, cfg, ctx.weights, ctx.p, ctx.eps, ctx.s);
  REQUIRE(a.energy_trace.size() == b.energy_trace.size());
  for (std::size_t k = 0; k < a.energy_trace.size(); ++k)
    CHECK(a.energy_trace[k] == b.energy_trace[k]);
  CHECK(a.field.values == b.field.values);
}

TEST_CASE("minimize rejects non-finite initial energy") {
  Setup1D ctx(0.75, 0.1, 0.05);
  auto u0 = ScalarField::constant(ctx.domain, 0.0);
  u0.exterior = ExteriorSpec::profile_tag();  // no evaluator
  MinimizeConfig cfg;
  CHECK_THROWS_AS(minimize(u0, cfg, ctx.weights, ctx.p, ctx.eps, ctx.s),
                  std::invalid_argument);
}

TEST_CASE("local minimality check holds at convergence and has power") {
  Setup1D ctx(0.75, 0.1, 0.02);
  const auto ext = ExteriorSpec::sign_pattern(SignRegion::half_space(0, 0.0));
  const auto u0 = initial_field(ctx.domain, ext, MinimizeConfig::Init::SharpInterface, 0);
  MinimizeConfig cfg;
  cfg.max_iters = 4000;
  const auto res = minimize(u0, cfg, ctx.weights, ctx.p, ctx.eps, ctx.s);
  const auto rep = local_minimality_check(res, 100, 0.01, ctx.weights, ctx.p, ctx.eps, ctx.s);
  CHECK(rep.failures == 0);
  const auto rep0 = local_minimality_check(res, 10, 0.0, ctx.weights, ctx.p, ctx.eps, ctx.s);
  CHECK(rep0.failures == 0);

  MinimizeConfig one;
  one.max_iters = 1;
  const auto stuck = minimize(u0, one, ctx.weights, ctx.p, ctx.eps, ctx.s);
  const auto rep1 = local_minimality_check(stuck, 100, 0.01, ctx.weights, ctx.p, ctx.eps, ctx.s);
  CHECK(rep1.failures > 0);
}

TEST_CASE("re-minimizing a subdomain changes the energy negligibly") {
  Setup1D ctx(0.75, 0.1, 0.02);
  const auto ext = ExteriorSpec::sign_pattern(SignRegion::half_space(0, 0.0));
  const auto u0 = initial_field(ctx.domain, ext, MinimizeConfig::Init::SharpInterface, 0);
  MinimizeConfig cfg;
  cfg.max_iters = 6000;
  cfg.grad_tol = 1e-11 * ctx.domain.cell_measure();
  const auto res = minimize(u0, cfg, ctx.weights, ctx.p, ctx.eps, ctx.s);
  REQUIRE(res.converged);
  MinimizeConfig sub;
  sub.max_iters = 2000;
  for (int c : ctx.domain.interior_cells())
    if (std::abs(ctx.domain.center(c)[0]) < 0.5) sub.free_region.push_back(c);
  const auto res2 = minimize(res.field, sub, ctx.weights, ctx.p, ctx.eps, ctx.s);
  CHECK(std::abs(res2.final_energy.f_eps - res.final_energy.f_eps) <=
        1e-9 * (1.0 + std::abs(res.final_energy.f_eps)));
}
