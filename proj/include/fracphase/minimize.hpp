#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fracphase/energy.hpp"

namespace fracphase {

struct MinimizeConfig {
  // Cells allowed to move (Def. of minimality fixes everything else).
  // Empty means: every interior cell. Must be a subset of the interior.
  std::vector<int> free_region;
  int max_iters = 5000;
  double grad_tol = -1.0;  // < 0: default 1e-8 * h^dim
  enum class StepRule { Fixed, Backtracking };
  StepRule step_rule = StepRule::Backtracking;
  double fixed_step = 0.0;
  enum class Init { ExteriorExtension, SharpInterface, RandomSeeded };
  Init init = Init::SharpInterface;
  std::uint64_t seed = 0;
  // Early stop when J stalls for stall_window accepted steps (0 disables).
  double stall_rel_tol = 1e-12;
  int stall_window = 25;
};

struct MinimizeResult {
  ScalarField field;
  std::vector<double> energy_trace;  // F_eps per accepted iterate, [0] = init
  std::vector<double> grad_trace;    // projected-gradient sup norm
  int iterations = 0;
  bool converged = false;
  double final_grad_norm = 0.0;
  EnergyBreakdown final_energy;
  std::vector<int> free_region;
};

// Builds u0 from the exterior data per the configured rule; collar cells
// always carry the exterior values.
ScalarField initial_field(const BoxDomain& d, const ExteriorSpec& exterior,
                          MinimizeConfig::Init init, std::uint64_t seed);

// Projected gradient descent on the free cells: u <- clamp(u - eta grad, -1, 1),
// eta halved until J decreases. Stops at projected-gradient sup norm <= grad_tol
// or max_iters; also reports converged when no decreasing step exists at any
// scale or the energy plateaus at machine precision (descent cannot certify a
// smaller gradient than the FP resolution of J allows). Throws when the
// initial energy is not finite.
MinimizeResult minimize(const ScalarField& u0, const MinimizeConfig& cfg,
                        const KernelWeights& w, const PotentialSpec& p, double eps,
                        const FracOrder& s);

struct MinimalityReport {
  int trials = 0;
  int failures = 0;
  double worst_decrease = 0.0;  // largest observed F drop over the tolerance
};
// Random clamped perturbations of the free cells; a trial fails when the
// energy drops by more than 1e-9 * (1 + |F_eps|).
MinimalityReport local_minimality_check(const MinimizeResult& r, int trials,
                                        double amplitude, const KernelWeights& w,
                                        const PotentialSpec& p, double eps,
                                        const FracOrder& s, std::uint64_t seed = 7);

void write_trace_csv(const std::string& path, const MinimizeResult& r, double eps,
                     const FracOrder& s);

}  // namespace fracphase
