#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fracphase/harness.hpp"
#include "fracphase/util.hpp"

namespace {

using namespace fracphase;

struct CommonFlags {
  std::string config;
  std::string out;
  int threads = 0;
  long long seed = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required = true) {
  auto* c = cmd->add_option("--config", flags.config, "experiment config file");
  if (config_required) c->required();
  cmd->add_option("--out", flags.out, "output directory (overrides config)");
  cmd->add_option("--threads", flags.threads, "worker threads (overrides config)");
  cmd->add_option("--seed", flags.seed, "RNG seed (overrides config)");
}

ExperimentConfig load_config(const CommonFlags& flags) {
  ExperimentConfig cfg = parse_config(flags.config);
  if (!flags.out.empty()) cfg.output_dir = flags.out;
  if (flags.threads > 0) cfg.threads = flags.threads;
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  return cfg;
}

int run_profile1d(const CommonFlags& flags) {
  auto cfg = load_config(flags);
  set_thread_count(cfg.threads);
  ProfileOptions opt;
  opt.ambient_dim = cfg.profile_dim > 0 ? cfg.profile_dim : 1;
  opt.refinement = cfg.refinement;
  auto pr = solve_profile(cfg.s, cfg.profile_L, cfg.profile_h, quartic_double_well(), opt);
  bool pass = pr.monotone && pr.converged;
  try {
    estimate_bstar(pr);
  } catch (const std::exception& e) {
    std::cerr << "ladder extrapolation failed: " << e.what() << "\n";
    pass = false;
  }
  std::filesystem::create_directories(cfg.output_dir);
  write_profile(cfg.profile_prefix_or_default(), pr);
  std::ofstream sum(cfg.output_dir + "/summary.txt");
  sum << "scenario: profile1d\ns: " << pr.s.s << "\nambient_dim: " << pr.ambient_dim
      << "\nb_star: " << pr.b_star << "\nc_star: " << pr.c_star
      << "\ndecay_fit: " << pr.decay_exponent_fit
      << "\nderivative_fit: " << pr.derivative_decay_fit
      << "\nmonotone: " << (pr.monotone ? "yes" : "no")
      << "\nantisymmetry_defect: " << pr.antisymmetry_defect
      << "\nresult: " << (pass ? "PASS" : "FAIL") << "\n";
  std::printf("profile1d s=%g dim=%d: b*=%.6g c*=%.6g decay_fit=%.4g %s\n", pr.s.s,
              pr.ambient_dim, pr.b_star, pr.c_star, pr.decay_exponent_fit,
              pass ? "PASS" : "FAIL");
  return pass ? 0 : 2;
}

int run_sweep(const CommonFlags& flags) {
  auto cfg = load_config(flags);
  const auto report = run_gamma_sweep(cfg);
  for (const auto& r : report.rows)
    std::printf("eps=%-8g F=%-12.6g I=%-12.6g target=%-12.6g gap=%-8.4g (%d iters)\n", r.eps,
                r.f_eps, r.i_eps, r.target, r.relative_gap, r.iterations);
  std::printf("sweep %s: extrapolated=%.6g %s\n", scenario_name(report.scenario).c_str(),
              report.extrapolated_limit, report.pass ? "PASS" : "FAIL");
  return report.pass ? 0 : 2;
}

int run_density(const CommonFlags& flags) {
  auto cfg = load_config(flags);
  const auto report = run_density_check(cfg);
  for (const auto& r : report.interface_rows)
    std::printf("interface ball r=%-8g ratio=%.4f%s\n", r.r, r.ratio,
                r.in_regime ? "" : " (out of regime)");
  for (const auto& r : report.deep_rows)
    std::printf("deep ball      r=%-8g ratio=%.4f%s\n", r.r, r.ratio,
                r.in_regime ? "" : " (out of regime)");
  std::printf("density-check min interface ratio %.4f: %s\n", report.min_interface_ratio,
              report.pass ? "PASS" : "FAIL");
  return report.pass ? 0 : 2;
}

int run_energy_bound_cmd(const CommonFlags& flags) {
  auto cfg = load_config(flags);
  const auto report = run_energy_bound(cfg);
  for (const auto& r : report.rows)
    std::printf("eps=%-8g F(B1)=%-12.6g (%d iters)\n", r.eps, r.f_eps, r.iterations);
  std::printf("energy-bound max/median=%.3f growth=%s: %s\n", report.max_over_median,
              report.monotone_growth_tail ? "yes" : "no", report.pass ? "PASS" : "FAIL");
  return report.pass ? 0 : 2;
}

int run_glue_cmd(const CommonFlags& flags) {
  auto cfg = load_config(flags);
  const auto report = run_glue_demo(cfg);
  for (const auto& r : report.rows)
    std::printf("eps=%-8g F(v)=%-12.6g bound=%-12.6g excess=%-10.4g slope<=3.3/eps:%s exact:%s\n",
                r.eps, r.f_blend, r.bound_combination, r.excess, r.slope_ok ? "yes" : "no",
                r.regions_exact ? "yes" : "no");
  std::printf("glue-demo: %s\n", report.pass ? "PASS" : "FAIL");
  return report.pass ? 0 : 2;
}

int run_perimeter(const std::string& mask_path, double s_value, int refinement,
                  double dilation) {
  const auto set = read_mask(mask_path);
  const auto interior = set.domain.interior_cells();
  const double per = pixel_perimeter(set, interior);
  // closure variant: dilate the region by `dilation`
  std::vector<int> dilated;
  for (int c = 0; c < set.domain.cell_count(); ++c) {
    const auto x = set.domain.center(c);
    bool in = true;
    for (int k = 0; k < set.domain.dim(); ++k)
      if (x[k] < set.domain.lower(k) - dilation || x[k] > set.domain.upper(k) + dilation)
        in = false;
    if (in) dilated.push_back(c);
  }
  const double per_closure = pixel_perimeter(set, dilated);
  WeightOptions wopt;
  wopt.refinement = refinement;
  const auto w = KernelWeights::build(set.domain, s_value, wopt);
  const auto nl = nonlocal_perimeter(set, w);
  std::printf("pixel perimeter Per(E,U):        %.10g\n", per);
  std::printf("pixel perimeter Per(E,U^delta):  %.10g (delta=%g)\n", per_closure, dilation);
  std::printf("nonlocal perimeter K(chi_E):     %.10g%s\n", nl.value,
              nl.divergent_warning ? "  [warning: s >= 1/2, h-divergent]" : "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional Allen-Cahn energies: profiles, Gamma-limit sweeps, checks"};
  app.require_subcommand(1);

  CommonFlags profile_flags, sweep_flags, density_flags, energy_flags, glue_flags;
  auto* cmd_profile = app.add_subcommand("profile1d", "solve the 1D optimal profile, estimate b*/c*");
  add_common(cmd_profile, profile_flags);
  auto* cmd_sweep = app.add_subcommand("sweep", "epsilon sweep of minimizers vs the Gamma-limit target");
  add_common(cmd_sweep, sweep_flags);
  auto* cmd_density = app.add_subcommand("density", "phase density ratios in balls around the interface");
  add_common(cmd_density, density_flags);
  auto* cmd_energy = app.add_subcommand("energy-bound", "F_eps(u_eps, B_1) boundedness along the ladder");
  add_common(cmd_energy, energy_flags);
  auto* cmd_glue = app.add_subcommand("glue-demo", "shell interpolation between minimizer and recovery field");
  add_common(cmd_glue, glue_flags);

  std::string mask_path;
  double peri_s = 0.25, peri_dilation = 0.0;
  int peri_refinement = 8;
  auto* cmd_peri = app.add_subcommand("perimeter", "pixel and nonlocal perimeter of a mask file");
  cmd_peri->add_option("--mask", mask_path, "mask file ({0,1} matrix)")->required();
  cmd_peri->add_option("--s", peri_s, "fractional order for the nonlocal perimeter");
  cmd_peri->add_option("--refinement", peri_refinement, "near-pair quadrature refinement");
  cmd_peri->add_option("--dilation", peri_dilation, "region dilation for the closure variant");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_profile->parsed()) return run_profile1d(profile_flags);
    if (cmd_sweep->parsed()) return run_sweep(sweep_flags);
    if (cmd_density->parsed()) return run_density(density_flags);
    if (cmd_energy->parsed()) return run_energy_bound_cmd(energy_flags);
    if (cmd_glue->parsed()) return run_glue_cmd(glue_flags);
    if (cmd_peri->parsed()) return run_perimeter(mask_path, peri_s, peri_refinement, peri_dilation);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
