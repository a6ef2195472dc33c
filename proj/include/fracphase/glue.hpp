#pragma once

#include <span>
#include <vector>

#include "fracphase/energy.hpp"

namespace fracphase {

struct GlueResult {
  ScalarField v;                // = u on D_delta, = w outside D, blended between
  int outer_shell = -1;         // selected j
  int inner_shell = -1;         // selected i
  std::vector<double> cutoff;   // phi per cell, in [0, 1]
  double max_cutoff_slope = 0;  // max |phi_a - phi_b| / h over adjacent cells
  EnergyBreakdown energy;       // energies of v over the interior
  double bound_combination = 0; // F(w,Omega) - F(w,D_delta) + I(u,D)
};

// Two-stage shell interpolation between u (inside D) and w (outside): pick the
// outer shell minimizing w(shell, CD_delta) + u(shell, D), then the inner
// eps-shell minimizing the selection integral, and blend with a piecewise
// linear cutoff of slope <= 1/eps. Throws when delta/M < 4 eps (no inner
// shells) or D_delta is empty.
GlueResult glue(const ScalarField& u, const ScalarField& wfld, std::span<const int> D,
                double delta, int M, double eps, const KernelWeights& kw,
                const PotentialSpec& p, const FracOrder& s);

}  // namespace fracphase
