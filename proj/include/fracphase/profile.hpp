#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fracphase/energy.hpp"
#include "fracphase/geometry.hpp"
#include "fracphase/minimize.hpp"

namespace fracphase {

// Transverse kernel moment: the 1D reduction of the n-dimensional kernel
// |x-y|^-(n+2s) for a profile depending on one coordinate carries the factor
// int_{R^{n-1}} (1+|tau|^2)^{-(n+2s)/2} dtau (1 for n = 1).
double transverse_moment(int ambient_dim, double s);

// (n-1)-volume of the unit (n-1)-ball: omega_0 = 1, omega_1 = 2.
double omega_lower(int ambient_dim);

struct ProfileOptions {
  int ambient_dim = 1;
  int collar_cells = 8;
  int refinement = 8;
  int max_iters = 20000;
  double grad_tol_scale = 1e-10;  // grad_tol = this * h
  std::vector<double> ladder_fractions = {1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2};  // R = frac * L
};

struct ProfileResult {
  FracOrder s;
  int ambient_dim = 1;
  double L = 0, h = 0;
  std::vector<double> t;  // recentered sample abscissae
  std::vector<double> u;
  double b_star = 0, c_star = 0;
  double decay_exponent_fit = 0;      // slope of log(1-u) vs log t, ~ -2s
  double derivative_decay_fit = 0;    // slope of log|u'| vs log t, ~ -(1+2s)
  std::vector<std::pair<double, double>> r_ladder;        // (R, E(u0, B_R))
  std::vector<std::pair<double, double>> exterior_share;  // (R, u0(B_R,CB_R)/E)
  bool monotone = false;
  double antisymmetry_defect = 0.0;
  bool converged = false;

  std::shared_ptr<const ProfileTable> table() const;
};

// Minimizes the unscaled energy E = K + int W on (-L, L) with exterior
// sign(t), recenters the zero crossing to 0, fits the algebraic tails and
// fills the R-ladder. Requires L >= 20 and h <= 0.05.
ProfileResult solve_profile(const FracOrder& s, double L, double h,
                            const PotentialSpec& p, const ProfileOptions& opt = {});

// Extrapolates the ladder limit (slope of E vs log R at s = 1/2, Richardson
// power fit for s > 1/2), sets b_star and c_star and returns b_star. Throws
// when the ladder is not Cauchy.
double estimate_bstar(ProfileResult& pr);

// u0(d(x)/eps) with d the signed distance to the pixel boundary of A, clamped
// to +/-1 beyond the tabulated range. The exterior spec carries the layer
// profile when A's boundary is a single axis-aligned hyperplane; otherwise it
// is an evaluator-less profile tag.
ScalarField recovery_sequence(const IndicatorSet& A, const ProfileResult& pr, double eps);

struct NonlocalPerimeter {
  double value = 0;
  bool divergent_warning = false;  // s >= 1/2: the continuum value is infinite
};
// K(to_field(E), Omega); the Gamma-limit density for s < 1/2.
NonlocalPerimeter nonlocal_perimeter(const IndicatorSet& E, const KernelWeights& w);

void write_profile(const std::string& path_prefix, const ProfileResult& pr);
ProfileResult load_profile(const std::string& path_prefix);

}  // namespace fracphase
