#include "fracphase/energy.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "fracphase/util.hpp"

namespace fracphase {

PotentialSpec quartic_double_well() {
  PotentialSpec p;
  p.value = [](double u) {
    const double t = 1.0 - u * u;
    return 0.25 * t * t;
  };
  p.first_derivative = [](double u) { return u * u * u - u; };
  p.second_derivative = [](double u) { return 3.0 * u * u - 1.0; };
  p.name = "quartic";
  return p;
}

PotentialReport validate_potential(const PotentialSpec& p) {
  PotentialReport r;
  r.zero_at_plus_one = std::abs(p.value(1.0)) <= 1e-12;
  r.zero_at_minus_one = std::abs(p.value(-1.0)) <= 1e-12;
  r.positive_inside = true;
  const int n = 2001;
  for (int i = 1; i <= n; ++i) {
    const double u = -1.0 + 2.0 * i / (n + 1);
    if (!(p.value(u) > 0)) {
      r.positive_inside = false;
      break;
    }
  }
  r.flat_at_walls =
      std::abs(p.first_derivative(1.0)) <= 1e-12 && std::abs(p.first_derivative(-1.0)) <= 1e-12;
  r.convex_at_walls = p.second_derivative(1.0) > 0 && p.second_derivative(-1.0) > 0;
  return r;
}

FracOrder::FracOrder(double s_, SRegime r) : s(s_), regime(r) {
  if (!(s_ > 0 && s_ < 1)) throw std::invalid_argument("FracOrder: s must lie in (0,1)");
  const bool is_half = s_ == 0.5;
  if ((r == SRegime::Half) != is_half)
    throw std::invalid_argument("FracOrder: regime tag contradicts the value of s");
  if (r == SRegime::BelowHalf && !(s_ < 0.5))
    throw std::invalid_argument("FracOrder: regime tag contradicts the value of s");
  if (r == SRegime::AboveHalf && !(s_ > 0.5))
    throw std::invalid_argument("FracOrder: regime tag contradicts the value of s");
}

FracOrder frac_order(double s) {
  if (s == 0.5) return FracOrder(s, SRegime::Half);
  return FracOrder(s, s < 0.5 ? SRegime::BelowHalf : SRegime::AboveHalf);
}

double scaling_factor(double eps, const FracOrder& s) {
  if (!(eps > 0 && eps < 1))
    throw std::invalid_argument("scaling_factor: eps must lie in (0,1)");
  switch (s.regime) {
    case SRegime::BelowHalf:
      return std::pow(eps, 2.0 * s.s);
    case SRegime::Half:
      return eps * std::abs(std::log(eps));
    case SRegime::AboveHalf:
      return eps;
  }
  return eps;
}

namespace {

double potential_sum(const ScalarField& u, const PotentialSpec& p,
                     std::span<const int> region) {
  std::vector<double> vals(region.size());
  for (std::size_t k = 0; k < region.size(); ++k) vals[k] = p.value(u.values[region[k]]);
  return u.domain.cell_measure() * pairwise_sum(vals);
}

EnergyBreakdown assemble(const KineticParts& parts, double pot, double eps,
                         const FracOrder& s) {
  EnergyBreakdown b;
  b.interior_seminorm = parts.interior;
  b.exterior_interaction = parts.cross + parts.tail;
  b.potential = pot;
  b.eps = eps;
  b.s = s.s;
  b.regime = s.regime;
  const double eps2s = std::pow(eps, 2.0 * s.s);
  const double kin = b.interior_seminorm + b.exterior_interaction;
  b.j_eps = eps2s * kin + pot;
  if (eps == 1.0) {
    // Unscaled mode: J_1 is the energy E = K + int W itself.
    b.f_eps = b.j_eps;
    b.i_eps = b.interior_seminorm + pot;
    return b;
  }
  switch (s.regime) {
    case SRegime::BelowHalf:
      // Algebraically J/eps^{2s}; this form keeps F == K bit-for-bit when the
      // potential vanishes identically (sharp interfaces).
      b.f_eps = kin + pot / eps2s;
      b.i_eps = b.f_eps;
      b.i_is_f_convention = true;
      break;
    case SRegime::Half: {
      const double alog = std::abs(std::log(eps));
      b.f_eps = b.j_eps / (eps * alog);
      b.i_eps = (b.interior_seminorm + pot / eps) / alog;
      break;
    }
    case SRegime::AboveHalf:
      b.f_eps = b.j_eps / eps;
      b.i_eps = std::pow(eps, 2.0 * s.s - 1.0) * b.interior_seminorm + pot / eps;
      break;
  }
  return b;
}

}  // namespace

EnergyBreakdown total_energy(const ScalarField& u, const KernelWeights& w,
                             const PotentialSpec& p, double eps, const FracOrder& s,
                             std::span<const int> region) {
  if (w.s() != s.s)
    throw std::invalid_argument("total_energy: weights were built for a different s");
  const auto parts = kinetic_parts(u, w, region);
  return assemble(parts, potential_sum(u, p, region), eps, s);
}

EnergyBreakdown total_energy(const ScalarField& u, const KernelWeights& w,
                             const PotentialSpec& p, double eps, const FracOrder& s) {
  const auto region = u.domain.interior_cells();
  return total_energy(u, w, p, eps, s, region);
}

std::vector<double> energy_gradient(const ScalarField& u, const KernelWeights& w,
                                    const PotentialSpec& p, double eps, const FracOrder& s) {
  EnergyEvaluator ev(u, w, p, eps, s);
  std::vector<double> grad(u.values.size(), 0.0);
  ev.j_and_gradient(u.values, grad);
  return grad;
}

SubadditivityReport subadditivity_check(const ScalarField& u, const KernelWeights& w,
                                        const PotentialSpec& p, double eps,
                                        const FracOrder& s, std::span<const int> E,
                                        std::span<const int> F) {
  if (!sets_disjoint(E, F))
    throw std::invalid_argument("subadditivity_check: E and F must be disjoint");
  const auto un = set_union(E, F);
  const auto be = total_energy(u, w, p, eps, s, E);
  const auto bf = total_energy(u, w, p, eps, s, F);
  const auto bu = total_energy(u, w, p, eps, s, un);
  SubadditivityReport r;
  r.f_first = be.f_eps;
  r.f_second = bf.f_eps;
  r.f_union = bu.f_eps;
  r.i_first = be.i_eps;
  r.i_second = bf.i_eps;
  r.i_union = bu.i_eps;
  const double slack = 1e-12 * (1.0 + std::abs(r.f_union));
  r.f_subadditive = r.f_union <= r.f_first + r.f_second + slack;
  r.i_superadditive = r.i_union + slack >= r.i_first + r.i_second;
  return r;
}

void append_breakdown_csv(const std::string& path, double h, const EnergyBreakdown& b,
                          bool write_header) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("append_breakdown_csv: cannot open " + path);
  if (write_header) out << "s,eps,h,interior,exterior,potential,J,F,I\n";
  char line[320];
  std::snprintf(line, sizeof line,
                "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", b.s, b.eps, h,
                b.interior_seminorm, b.exterior_interaction, b.potential, b.j_eps, b.f_eps,
                b.i_eps);
  out << line;
}

EnergyEvaluator::EnergyEvaluator(const ScalarField& prototype, const KernelWeights& w,
                                 const PotentialSpec& p, double eps, const FracOrder& s)
    : w_(w), p_(p), domain_(prototype.domain), eps_(eps), s_(s) {
  if (!domain_.same_grid(w.domain()))
    throw std::invalid_argument("EnergyEvaluator: field and weights on different grids");
  if (w.s() != s.s)
    throw std::invalid_argument("EnergyEvaluator: weights were built for a different s");
  if (!prototype.exterior.has_evaluator())
    throw std::invalid_argument("EnergyEvaluator: profile exterior without a registered evaluator");
  eps2s_ = std::pow(eps, 2.0 * s.s);
  scaling_ = eps == 1.0 ? 1.0 : scaling_factor(eps, s);
  hn_ = domain_.cell_measure();
  interior_ = domain_.interior_cells();
  mult_.assign(domain_.cell_count(), 1.0);
  for (int c : interior_) mult_[c] = 0.5;
  tails_ = w.tail_moments(prototype.exterior);
}

double EnergyEvaluator::f_of_j(double j) const { return j / scaling_; }

double EnergyEvaluator::j_energy(std::span<const double> values) const {
  const int nx = domain_.nx(), ny = domain_.ny();
  const int nrows = static_cast<int>(interior_.size());
  std::vector<double> rows(nrows);
  const double* uv_all = values.data();
  parallel_for(nrows, [&](int ridx) {
    const int i = interior_[ridx];
    const auto ci = domain_.coord(i);
    const double ui = uv_all[i];
    double kin = 0.0;
    for (int jy = 0; jy < ny; ++jy) {
      const double* wrow = w_.offset_row(std::abs(ci[1] - jy)) + (nx - 1 - ci[0]);
      const double* uv = uv_all + static_cast<std::size_t>(jy) * nx;
      const double* mv = mult_.data() + static_cast<std::size_t>(jy) * nx;
      double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
      int jx = 0;
      for (; jx + 4 <= nx; jx += 4) {
        const double d0 = ui - uv[jx], d1 = ui - uv[jx + 1];
        const double d2 = ui - uv[jx + 2], d3 = ui - uv[jx + 3];
        a0 += mv[jx] * wrow[jx] * d0 * d0;
        a1 += mv[jx + 1] * wrow[jx + 1] * d1 * d1;
        a2 += mv[jx + 2] * wrow[jx + 2] * d2 * d2;
        a3 += mv[jx + 3] * wrow[jx + 3] * d3 * d3;
      }
      for (; jx < nx; ++jx) {
        const double d = ui - uv[jx];
        a0 += mv[jx] * wrow[jx] * d * d;
      }
      kin += ((a0 + a1) + (a2 + a3));
    }
    const double tail = w_.tail_total(i) * ui * ui - 2.0 * tails_->t1[i] * ui + tails_->t2[i];
    rows[ridx] = eps2s_ * (kin + tail) + hn_ * p_.value(ui);
  });
  return pairwise_sum(rows);
}

double EnergyEvaluator::j_and_gradient(std::span<const double> values,
                                       std::span<double> grad) const {
  const int nx = domain_.nx(), ny = domain_.ny();
  const int nrows = static_cast<int>(interior_.size());
  std::vector<double> rows(nrows);
  std::fill(grad.begin(), grad.end(), 0.0);
  const double* uv_all = values.data();
  parallel_for(nrows, [&](int ridx) {
    const int i = interior_[ridx];
    const auto ci = domain_.coord(i);
    const double ui = uv_all[i];
    double kin = 0.0, gsum = 0.0;
    for (int jy = 0; jy < ny; ++jy) {
      const double* wrow = w_.offset_row(std::abs(ci[1] - jy)) + (nx - 1 - ci[0]);
      const double* uv = uv_all + static_cast<std::size_t>(jy) * nx;
      const double* mv = mult_.data() + static_cast<std::size_t>(jy) * nx;
      double e0 = 0, e1 = 0, g0 = 0, g1 = 0;
      int jx = 0;
      for (; jx + 2 <= nx; jx += 2) {
        const double d0 = ui - uv[jx], d1 = ui - uv[jx + 1];
        const double w0 = wrow[jx], w1 = wrow[jx + 1];
        e0 += mv[jx] * w0 * d0 * d0;
        e1 += mv[jx + 1] * w1 * d1 * d1;
        g0 += w0 * d0;
        g1 += w1 * d1;
      }
      for (; jx < nx; ++jx) {
        const double d = ui - uv[jx];
        e0 += mv[jx] * wrow[jx] * d * d;
        g0 += wrow[jx] * d;
      }
      kin += e0 + e1;
      gsum += g0 + g1;
    }
    const double t0 = w_.tail_total(i), t1 = tails_->t1[i], t2 = tails_->t2[i];
    rows[ridx] = eps2s_ * (kin + t0 * ui * ui - 2.0 * t1 * ui + t2) + hn_ * p_.value(ui);
    grad[i] = eps2s_ * 2.0 * (gsum + t0 * ui - t1) + hn_ * p_.first_derivative(ui);
  });
  return pairwise_sum(rows);
}

}  // namespace fracphase
