#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "fracphase/harness.hpp"

using namespace fracphase;

namespace {

std::string write_tmp_config(const std::string& body, const std::string& name) {
  const std::string path = name;
  std::ofstream out(path);
  out << body;
  return path;
}

std::string strip_runtime_column(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.rfind(',');
    out << (pos == std::string::npos ? line : line.substr(0, pos)) << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("parse_config fills defaults from a minimal file") {
  const auto path = write_tmp_config(
      "scenario = gamma1d\n"
      "s = 0.75\n"
      "eps_ladder = 0.2, 0.1\n",
      "cfg_minimal.txt");
  const auto cfg = parse_config(path);
  CHECK(cfg.scenario == Scenario::Gamma1D);
  CHECK(cfg.s.s == 0.75);
  CHECK(cfg.s.regime == SRegime::AboveHalf);
  CHECK(cfg.h_rule == 0.1);
  CHECK(cfg.seed == 1);
  CHECK(cfg.refinement == 8);
  std::remove(path.c_str());
}

TEST_CASE("parse_config rejects a non-decreasing ladder") {
  const auto path = write_tmp_config(
      "scenario = gamma1d\ns = 0.75\neps_ladder = 0.1, 0.2\n", "cfg_ladder.txt");
  CHECK_THROWS_WITH_AS(parse_config(path),
                       doctest::Contains("strictly decreasing"), std::invalid_argument);
  std::remove(path.c_str());
}

TEST_CASE("parse_config rejects an under-resolved layer") {
  const auto path = write_tmp_config(
      "scenario = gamma1d\ns = 0.75\neps_ladder = 0.2, 0.1\nh_rule = 0.5\n",
      "cfg_hrule.txt");
  CHECK_THROWS_WITH_AS(parse_config(path), doctest::Contains("under-resolved"),
                       std::invalid_argument);
  std::remove(path.c_str());
}

TEST_CASE("parse_config reports unknown keys with their line") {
  const auto path = write_tmp_config(
      "scenario = gamma1d\ns = 0.75\neps_ladder = 0.2, 0.1\nwibble = 3\n",
      "cfg_unknown.txt");
  CHECK_THROWS_WITH_AS(parse_config(path), doctest::Contains(":4:"), std::invalid_argument);
  std::remove(path.c_str());
}

TEST_CASE("parse_config validates the regime tag") {
  const auto path = write_tmp_config(
      "scenario = gamma1d\ns = 0.75\nregime = half\neps_ladder = 0.2, 0.1\n",
      "cfg_regime.txt");
  CHECK_THROWS_AS(parse_config(path), std::invalid_argument);
  std::remove(path.c_str());
}

TEST_CASE("sweep with s >= 1/2 demands a profile") {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::Gamma1D;
  cfg.s = frac_order(0.75);
  cfg.eps_ladder = {0.2, 0.1};
  cfg.output_dir = "harness_test_noprof";
  cfg.profile_prefix = "harness_test_noprof/absent";
  CHECK_THROWS_WITH_AS(run_gamma_sweep(cfg), doctest::Contains("profile1d"),
                       std::runtime_error);
}

TEST_CASE("below-half sweep runs, satisfies property a and is deterministic") {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::NonlocalBelowHalf;
  cfg.s = frac_order(0.25);
  cfg.eps_ladder = {0.2, 0.1};
  cfg.h_rule = 0.1;
  cfg.max_iters = 800;
  cfg.output_dir = "harness_test_det1";
  const auto r1 = run_gamma_sweep(cfg);
  for (const auto& row : r1.rows) CHECK(row.i_eps <= row.f_eps * (1 + 1e-12) + 1e-15);
  cfg.output_dir = "harness_test_det2";
  const auto r2 = run_gamma_sweep(cfg);
  CHECK(strip_runtime_column("harness_test_det1/report.csv") ==
        strip_runtime_column("harness_test_det2/report.csv"));
  REQUIRE(r1.rows.size() == r2.rows.size());
  for (std::size_t k = 0; k < r1.rows.size(); ++k)
    CHECK(r1.rows[k].f_eps == r2.rows[k].f_eps);
}

TEST_CASE("scenario plumbing") {
  CHECK(scenario_name(Scenario::Gamma2DHalfplane) == "gamma2d-halfplane");
  const auto d = scenario_domain(Scenario::Gamma2DHalfplane, 0.1, 0.125, 4);
  CHECK(d.dim() == 2);
  CHECK(d.interior_count() == 80 * 80);
  const auto ext = scenario_exterior(Scenario::Gamma2DSquare);
  const double inside[2] = {-0.3, -0.3};
  const double outside[2] = {0.3, -0.3};
  CHECK(ext.value_at(inside, 2) == 1.0);
  CHECK(ext.value_at(outside, 2) == -1.0);
  CHECK(scenario_perimeter_target(Scenario::Gamma2DSquare) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}
