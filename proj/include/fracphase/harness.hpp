#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracphase/glue.hpp"
#include "fracphase/profile.hpp"

namespace fracphase {

enum class Scenario {
  Profile1D,
  Gamma1D,
  Gamma2DHalfplane,
  Gamma2DSquare,
  NonlocalBelowHalf,
  DensityCheck,
  EnergyBound,
};
std::string scenario_name(Scenario s);

struct ExperimentConfig {
  Scenario scenario = Scenario::Gamma1D;
  FracOrder s = frac_order(0.75);
  std::vector<double> eps_ladder;  // strictly decreasing
  double h_rule = 0.1;             // h = h_rule * eps; must be <= 0.2
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  int refinement = 8;
  int collar_cells = 4;
  int max_iters = 6000;
  int threads = 1;
  // profile handling
  std::string profile_prefix;  // default: <output_dir>/profile
  double profile_L = 40.0;
  double profile_h = 0.02;
  int profile_dim = 0;  // 0: inferred from the scenario dimension
  // density-check
  double theta1 = 0.5, theta2 = 0.0;
  std::vector<double> r_ladder = {0.4, 0.2, 0.1};
  double density_eps = 0.02;
  // glue demo
  double glue_delta = 0.4;
  int glue_M = 4;
  double glue_D_halfwidth = 0.5;

  std::string profile_prefix_or_default() const {
    return profile_prefix.empty() ? output_dir + "/profile" : profile_prefix;
  }
};

// key = value file, '#' comments; unknown keys and schema violations are
// reported with their line number.
ExperimentConfig parse_config(const std::string& path);

struct SweepRow {
  double eps = 0, h = 0;
  double f_eps = 0, i_eps = 0;
  double target = 0, relative_gap = 0;
  double l1_to_indicator = 0;  // s < 1/2 scenario; 0 elsewhere
  double runtime_s = 0;
  int iterations = 0;
  bool converged = false;
};

struct SweepReport {
  Scenario scenario;
  double s = 0;
  std::vector<SweepRow> rows;
  double extrapolated_limit = 0;
  double fit_exponent = 0;
  double tolerance = 0;
  bool gaps_decreasing = false;
  bool lower_bound_ok = false;  // min of last 3 F >= 0.85 * target (s >= 1/2)
  double l1_final = 0;          // s < 1/2: L1 distance to the limit indicator
  bool pass = false;
};

// Builds weights, minimizes with the scenario's exterior data at every eps,
// compares against the regime target. s >= 1/2 scenarios need the 1D profile
// (for c_star); pass profile = nullptr to have it loaded from
// cfg.profile_prefix (throws with an instruction when missing).
SweepReport run_gamma_sweep(const ExperimentConfig& cfg,
                            const ProfileResult* profile = nullptr);

struct DensityRow {
  double center = 0, r = 0, ratio = 0;
  bool in_regime = false;  // eps <= r
};
struct DensityReport {
  std::vector<DensityRow> interface_rows;  // ball centered on the interface
  std::vector<DensityRow> deep_rows;       // ball inside the +1 phase
  double min_interface_ratio = 1.0;
  bool pass = false;
};
DensityReport run_density_check(const ExperimentConfig& cfg);

struct EnergyBoundReport {
  std::vector<SweepRow> rows;  // F_eps(u_eps, B_1); target column unused
  double max_over_median = 0;
  bool monotone_growth_tail = false;  // growth across the last 3 points
  bool pass = false;
};
EnergyBoundReport run_energy_bound(const ExperimentConfig& cfg);

struct GlueDemoRow {
  double eps = 0;
  double f_blend = 0;            // F_eps(v, Omega)
  double bound_combination = 0;  // F(w,Om) - F(w,D_delta) + I(u,D)
  double excess = 0;             // f_blend - bound_combination
  double max_cutoff_slope = 0;
  bool regions_exact = false;
  bool slope_ok = false;  // <= (3/eps) * 1.1
};
struct GlueDemoReport {
  std::vector<GlueDemoRow> rows;
  bool excess_nonincreasing_tail = false;  // over the last 3 ladder points
  bool pass = false;
};
// 1D: u = minimizer, w = recovery sequence, D = (-halfwidth, halfwidth).
GlueDemoReport run_glue_demo(const ExperimentConfig& cfg, const ProfileResult* profile = nullptr);

void write_sweep_report(const std::string& out_dir, const SweepReport& report);
void write_density_report(const std::string& out_dir, const DensityReport& report);
void write_energy_bound_report(const std::string& out_dir, const EnergyBoundReport& report);
void write_glue_report(const std::string& out_dir, const GlueDemoReport& report);

// Shared scenario plumbing (also used by tests).
BoxDomain scenario_domain(Scenario sc, double eps, double h_rule, int collar_cells);
ExteriorSpec scenario_exterior(Scenario sc);
double scenario_perimeter_target(Scenario sc);  // Per(E, closure) of the limit set

}  // namespace fracphase
