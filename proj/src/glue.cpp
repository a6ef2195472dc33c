#include "fracphase/glue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracphase/geometry.hpp"

namespace fracphase {

namespace {

std::vector<int> cells_above(const std::vector<double>& dist, std::span<const int> within,
                             double t) {
  std::vector<int> out;
  for (int c : within)
    if (dist[c] > t) out.push_back(c);
  return out;
}

}  // namespace

GlueResult glue(const ScalarField& u, const ScalarField& wfld, std::span<const int> D,
                double delta, int M, double eps, const KernelWeights& kw,
                const PotentialSpec& p, const FracOrder& s) {
  const auto& dom = u.domain;
  if (!dom.same_grid(wfld.domain))
    throw std::invalid_argument("glue: u and w live on different grids");
  if (M < 1 || !(delta > 0)) throw std::invalid_argument("glue: need delta > 0 and M >= 1");
  for (int c : D)
    if (!dom.is_interior(c)) throw std::invalid_argument("glue: D must lie inside the interior");

  const double dtilde = delta / M;
  const int N = static_cast<int>(std::floor(dtilde / (2.0 * eps)));
  if (N < 2)
    throw std::invalid_argument("glue: delta/M < 4 eps leaves no inner shells");

  const auto dist_D = subset_boundary_distance(dom, D);
  const auto D_delta = cells_above(dist_D, D, delta);
  if (D_delta.empty()) throw std::invalid_argument("glue: D_delta is empty");

  const auto interior = dom.interior_cells();
  const auto all = dom.all_cells();

  // Outer selection: shells S_j = D_{j dtilde} \ D_{(j+1) dtilde}; minimize
  // w(S_j, CD_delta) + u(S_j, D).
  const auto compl_D_delta = set_difference(all, D_delta);
  int best_j = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int j = 0; j < M; ++j) {
    std::vector<int> shell;
    for (int c : D)
      if (dist_D[c] > j * dtilde && dist_D[c] <= (j + 1) * dtilde) shell.push_back(c);
    if (shell.empty()) continue;
    const double cost =
        interaction(wfld, shell, compl_D_delta, kw) + interaction(u, shell, D, kw);
    if (cost < best_cost) {
      best_cost = cost;
      best_j = j;
    }
  }
  if (best_j < 0) throw std::invalid_argument("glue: all outer shells are empty");

  const auto D_tilde = cells_above(dist_D, D, best_j * dtilde);
  const auto dist_Dt = subset_boundary_distance(dom, D_tilde);
  const auto Dt_dtilde = cells_above(dist_Dt, D_tilde, dtilde);

  // Inner selection over eps-shells A_i of D_tilde (Eq. selection integral).
  const double hn = dom.cell_measure();
  int best_i = -1;
  double best_lhs = std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i) {
    std::vector<int> Ai;
    for (int c : D_tilde)
      if (dist_Dt[c] > i * eps && dist_Dt[c] <= (i + 1) * eps) Ai.push_back(c);
    if (Ai.empty()) continue;
    const auto Dt_ie = cells_above(dist_Dt, D_tilde, i * eps);
    const auto dist_i = subset_boundary_distance(dom, Dt_ie);
    double lhs = 0.0;
    for (int c : Ai) lhs += std::abs(u.values[c] - wfld.values[c]) * hn;
    for (int c : D_tilde) {
      if (!(dist_Dt[c] > (i + 1) * eps) || dist_Dt[c] > dtilde) continue;
      const double di = std::max(dist_i[c], dom.h());
      lhs += std::pow(eps, 2.0 * s.s) * std::abs(u.values[c] - wfld.values[c]) *
             std::pow(di, -2.0 * s.s) * hn;
    }
    if (lhs < best_lhs) {
      best_lhs = lhs;
      best_i = i;
    }
  }
  if (best_i < 0) throw std::invalid_argument("glue: all inner shells are empty");

  // Regions: P u Q = { d > (i+1) eps } in D_tilde (cutoff 1), R = A_i (ramp),
  // S u T = the rest (cutoff 0). v = phi u + (1 - phi) w, assigned per region
  // so the boundary identities are cell-exact.
  GlueResult out;
  out.outer_shell = best_j;
  out.inner_shell = best_i;
  out.v = wfld;
  out.cutoff.assign(dom.cell_count(), 0.0);
  std::vector<std::uint8_t> in_Dt(dom.cell_count(), 0);
  for (int c : D_tilde) in_Dt[c] = 1;
  for (int c : D_tilde) {
    const double d = dist_Dt[c];
    if (d > (best_i + 1) * eps) {
      out.cutoff[c] = 1.0;
      out.v.values[c] = u.values[c];
    } else if (d > best_i * eps) {
      const double phi = std::clamp((d - best_i * eps) / eps, 0.0, 1.0);
      out.cutoff[c] = phi;
      out.v.values[c] = phi * u.values[c] + (1.0 - phi) * wfld.values[c];
    }
  }

  // Discrete cutoff slope; the distance to a fixed set is 1-Lipschitz so the
  // ramp cannot exceed 1/eps by more than quadrature wobble.
  double max_slope = 0.0;
  for (int iy = 0; iy < dom.ny(); ++iy)
    for (int ix = 0; ix < dom.nx(); ++ix) {
      const int c = dom.cell(ix, iy);
      if (ix + 1 < dom.nx())
        max_slope = std::max(max_slope,
                             std::abs(out.cutoff[c] - out.cutoff[dom.cell(ix + 1, iy)]));
      if (dom.dim() == 2 && iy + 1 < dom.ny())
        max_slope = std::max(max_slope,
                             std::abs(out.cutoff[c] - out.cutoff[dom.cell(ix, iy + 1)]));
    }
  out.max_cutoff_slope = max_slope / dom.h();

  out.energy = total_energy(out.v, kw, p, eps, s);
  const auto fw = total_energy(wfld, kw, p, eps, s);
  const auto fw_dd = total_energy(wfld, kw, p, eps, s, D_delta);
  const auto iu_d = total_energy(u, kw, p, eps, s, D);
  out.bound_combination = fw.f_eps - fw_dd.f_eps + iu_d.i_eps;
  return out;
}

}  // namespace fracphase
