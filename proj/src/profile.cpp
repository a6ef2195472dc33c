#include "fracphase/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fracphase/util.hpp"

namespace fracphase {

double transverse_moment(int ambient_dim, double s) {
  if (ambient_dim == 1) return 1.0;
  if (ambient_dim == 2)
    return std::sqrt(M_PI) * std::tgamma(s + 0.5) / std::tgamma(s + 1.0);
  throw std::invalid_argument("transverse_moment: ambient_dim must be 1 or 2");
}

double omega_lower(int ambient_dim) {
  if (ambient_dim == 1) return 1.0;
  if (ambient_dim == 2) return 2.0;
  throw std::invalid_argument("omega_lower: ambient_dim must be 1 or 2");
}

std::shared_ptr<const ProfileTable> ProfileResult::table() const {
  auto tab = std::make_shared<ProfileTable>();
  tab->t = t;
  tab->u = u;
  return tab;
}

ProfileResult solve_profile(const FracOrder& s, double L, double h,
                            const PotentialSpec& p, const ProfileOptions& opt) {
  if (!(L >= 20.0)) throw std::invalid_argument("solve_profile: L must be >= 20");
  if (!(h <= 0.05)) throw std::invalid_argument("solve_profile: h must be <= 0.05");

  const auto domain = BoxDomain::create(1, {-L}, {L}, h, opt.collar_cells * h);
  WeightOptions wopt;
  wopt.refinement = opt.refinement;
  wopt.kernel_scale = transverse_moment(opt.ambient_dim, s.s);
  const auto weights = KernelWeights::build(domain, s.s, wopt);

  const auto exterior = ExteriorSpec::sign_pattern(SignRegion::half_space(0, 0.0));
  ScalarField u0 = initial_field(domain, exterior, MinimizeConfig::Init::SharpInterface, 0);

  MinimizeConfig cfg;
  cfg.max_iters = opt.max_iters;
  cfg.grad_tol = opt.grad_tol_scale * h;
  cfg.stall_rel_tol = 1e-14;
  cfg.stall_window = 40;
  // eps = 1: the unscaled energy E = K + int W.
  const auto res = minimize(u0, cfg, weights, p, 1.0, s);

  ProfileResult pr;
  pr.s = s;
  pr.ambient_dim = opt.ambient_dim;
  pr.L = L;
  pr.h = h;
  pr.converged = res.converged;

  const auto interior = domain.interior_cells();
  std::vector<double> tt(interior.size()), uu(interior.size());
  for (std::size_t k = 0; k < interior.size(); ++k) {
    tt[k] = domain.center(interior[k])[0];
    uu[k] = res.field.values[interior[k]];
  }

  pr.monotone = true;
  for (std::size_t k = 0; k + 1 < uu.size(); ++k)
    if (uu[k + 1] < uu[k] - 1e-12) pr.monotone = false;

  // Recenter: zero crossing at t = 0 by linear interpolation.
  double t0 = 0.0;
  for (std::size_t k = 0; k + 1 < uu.size(); ++k) {
    if (uu[k] <= 0.0 && uu[k + 1] > 0.0) {
      const double w1 = uu[k + 1] - uu[k];
      t0 = w1 != 0.0 ? tt[k] - uu[k] * (tt[k + 1] - tt[k]) / w1 : tt[k];
      break;
    }
  }
  for (double& v : tt) v -= t0;
  pr.t = tt;
  pr.u = uu;

  // Antisymmetry defect via interpolation on the recentered samples.
  {
    ProfileTable tab;
    tab.t = tt;
    tab.u = uu;
    double worst = 0.0;
    for (double q = h; q <= L / 2; q += std::max(h, L / 2000.0))
      worst = std::max(worst, std::abs(tab.eval(q) + tab.eval(-q)));
    pr.antisymmetry_defect = worst;
  }

  // Tail fits on t in [L/4, L/2].
  {
    std::vector<double> lx, ly, dx, dy;
    for (std::size_t k = 1; k + 1 < uu.size(); ++k) {
      const double tk = tt[k];
      if (tk < L / 4 || tk > L / 2) continue;
      const double gap = 1.0 - uu[k];
      if (gap > 1e-14) {
        lx.push_back(std::log(tk));
        ly.push_back(std::log(gap));
      }
      const double du = (uu[k + 1] - uu[k - 1]) / (2.0 * h);
      if (du > 1e-16) {
        dx.push_back(std::log(tk));
        dy.push_back(std::log(du));
      }
    }
    if (lx.size() >= 4) pr.decay_exponent_fit = fit_line(lx, ly).slope;
    if (dx.size() >= 4) pr.derivative_decay_fit = fit_line(dx, dy).slope;
  }

  // R-ladder of localized unscaled energies and exterior shares.
  for (double frac : opt.ladder_fractions) {
    const double R = frac * L;
    std::vector<int> ball;
    for (int c : interior)
      if (std::abs(domain.center(c)[0] - t0) < R) ball.push_back(c);
    if (ball.empty()) continue;
    const auto parts = kinetic_parts(res.field, weights, ball);
    std::vector<double> pot(ball.size());
    for (std::size_t k = 0; k < ball.size(); ++k)
      pot[k] = p.value(res.field.values[ball[k]]);
    const double potential = domain.cell_measure() * pairwise_sum(pot);
    const double energy = parts.interior + parts.cross + parts.tail + potential;
    const double exterior_interaction = parts.cross + parts.tail;
    pr.r_ladder.emplace_back(R, energy);
    pr.exterior_share.emplace_back(R, energy > 0 ? exterior_interaction / energy : 0.0);
  }
  return pr;
}

double estimate_bstar(ProfileResult& pr) {
  const auto& lad = pr.r_ladder;
  if (lad.size() < 4)
    throw std::invalid_argument("estimate_bstar: need an R-ladder with >= 4 points");

  double limit = 0.0;
  if (pr.s.regime == SRegime::Half) {
    // E(R) ~ b log R + a: difference quotients vs log R converge to b.
    std::vector<double> slopes;
    for (std::size_t k = 1; k < lad.size(); ++k)
      slopes.push_back((lad[k].second - lad[k - 1].second) /
                       (std::log(lad[k].first) - std::log(lad[k - 1].first)));
    for (std::size_t k = 2; k < slopes.size(); ++k)
      if (!(std::abs(slopes[k] - slopes[k - 1]) <=
            std::abs(slopes[k - 1] - slopes[k - 2]) * 1.25 + 1e-12))
        throw std::invalid_argument("estimate_bstar: ladder slopes are not Cauchy");
    // Richardson on the last two slopes assuming a 1/log R correction.
    const std::size_t m = slopes.size();
    limit = slopes[m - 1] + (slopes[m - 1] - slopes[m - 2]);
  } else if (pr.s.regime == SRegime::AboveHalf) {
    std::vector<double> diffs;
    for (std::size_t k = 1; k < lad.size(); ++k)
      diffs.push_back(lad[k].second - lad[k - 1].second);
    for (std::size_t k = 1; k < diffs.size(); ++k)
      if (!(std::abs(diffs[k]) <= std::abs(diffs[k - 1]) * 1.25 + 1e-15))
        throw std::invalid_argument("estimate_bstar: ladder differences are not Cauchy");
    // Fit E(R) = b - a R^-q through the last three points (geometric ladder).
    const std::size_t m = lad.size();
    const double E1 = lad[m - 3].second, E2 = lad[m - 2].second, E3 = lad[m - 1].second;
    const double r = lad[m - 1].first / lad[m - 2].first;
    const double ratio = (E2 - E1) != 0.0 ? (E3 - E2) / (E2 - E1) : 0.0;
    if (ratio > 0 && ratio < 1) {
      const double q = -std::log(ratio) / std::log(r);
      limit = E3 + (E3 - E2) * ratio / (1.0 - ratio);
      (void)q;
    } else {
      limit = E3;
    }
  } else {
    // s < 1/2: no limit constant is claimed; report the last normalized
    // exterior interaction E-ladder ratio instead.
    const auto& last = lad.back();
    limit = last.second / std::pow(last.first, 1.0 - 2.0 * pr.s.s);
  }

  pr.c_star = limit;
  pr.b_star = limit * omega_lower(pr.ambient_dim);
  if (!(pr.b_star > 0)) throw std::invalid_argument("estimate_bstar: nonpositive limit");
  return pr.b_star;
}

ScalarField recovery_sequence(const IndicatorSet& A, const ProfileResult& pr, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("recovery_sequence: eps must be positive");
  const auto d = signed_distance(A);
  auto tab = pr.table();
  ScalarField u;
  u.domain = A.domain;
  u.values.resize(A.domain.cell_count());
  for (int c = 0; c < A.domain.cell_count(); ++c) u.values[c] = tab->eval(d[c] / eps);

  int axis = -1;
  if (A.ext_kind == IndicatorSet::ExteriorMask::Region &&
      A.ext_region.is_half_space(A.domain.dim(), &axis)) {
    const bool lo_side = std::isfinite(A.ext_region.lo[axis]);
    const double offset = lo_side ? A.ext_region.lo[axis] : A.ext_region.hi[axis];
    // orient: +1 when the set (u = +1 phase) lies toward +axis
    double orient = lo_side ? 1.0 : -1.0;
    if (!A.ext_region.inside_is_plus) orient = -orient;
    u.exterior = ExteriorSpec::layer_profile(axis, offset, orient, eps, tab);
  } else {
    u.exterior = ExteriorSpec::profile_tag();  // no evaluator: energies reject
  }
  return u;
}

NonlocalPerimeter nonlocal_perimeter(const IndicatorSet& E, const KernelWeights& w) {
  NonlocalPerimeter out;
  out.value = gagliardo(to_field(E), w);
  out.divergent_warning = w.s() >= 0.5;
  return out;
}

void write_profile(const std::string& path_prefix, const ProfileResult& pr) {
  {
    std::ofstream out(path_prefix + "_samples.csv");
    if (!out) throw std::runtime_error("write_profile: cannot open samples file");
    out << "t,u0\n";
    char line[96];
    for (std::size_t k = 0; k < pr.t.size(); ++k) {
      std::snprintf(line, sizeof line, "%.17g,%.17g\n", pr.t[k], pr.u[k]);
      out << line;
    }
  }
  std::ofstream out(path_prefix + "_summary.csv");
  if (!out) throw std::runtime_error("write_profile: cannot open summary file");
  out << "s,regime,ambient_dim,L,h,b_star,c_star,decay_fit,derivative_fit,monotone,"
         "antisymmetry,converged\n";
  char line[384];
  std::snprintf(line, sizeof line, "%.17g,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%d\n",
                pr.s.s, static_cast<int>(pr.s.regime), pr.ambient_dim, pr.L, pr.h, pr.b_star,
                pr.c_star, pr.decay_exponent_fit, pr.derivative_decay_fit, pr.monotone ? 1 : 0,
                pr.antisymmetry_defect, pr.converged ? 1 : 0);
  out << line;
  std::ofstream lad(path_prefix + "_ladder.csv");
  lad << "R,energy,exterior_share\n";
  for (std::size_t k = 0; k < pr.r_ladder.size(); ++k) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", pr.r_ladder[k].first,
                  pr.r_ladder[k].second, pr.exterior_share[k].second);
    lad << line;
  }
}

ProfileResult load_profile(const std::string& path_prefix) {
  ProfileResult pr;
  {
    std::ifstream in(path_prefix + "_summary.csv");
    if (!in) throw std::runtime_error("load_profile: cannot open " + path_prefix + "_summary.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    double s_val = 0;
    int regime = 0, dim = 0, mono = 0, conv = 0;
    ProfileResult tmp;
    if (std::sscanf(row.c_str(), "%lg,%d,%d,%lg,%lg,%lg,%lg,%lg,%lg,%d,%lg,%d", &s_val, &regime,
                    &dim, &tmp.L, &tmp.h, &tmp.b_star, &tmp.c_star, &tmp.decay_exponent_fit,
                    &tmp.derivative_decay_fit, &mono, &tmp.antisymmetry_defect, &conv) != 12)
      throw std::runtime_error("load_profile: malformed summary row");
    tmp.s = FracOrder(s_val, static_cast<SRegime>(regime));
    tmp.ambient_dim = dim;
    tmp.monotone = mono != 0;
    tmp.converged = conv != 0;
    pr = tmp;
  }
  {
    std::ifstream in(path_prefix + "_samples.csv");
    if (!in) throw std::runtime_error("load_profile: cannot open " + path_prefix + "_samples.csv");
    std::string row;
    std::getline(in, row);  // header
    while (std::getline(in, row)) {
      double t, u;
      if (std::sscanf(row.c_str(), "%lg,%lg", &t, &u) == 2) {
        pr.t.push_back(t);
        pr.u.push_back(u);
      }
    }
  }
  {
    std::ifstream in(path_prefix + "_ladder.csv");
    if (in) {
      std::string row;
      std::getline(in, row);
      while (std::getline(in, row)) {
        double R, E, share;
        if (std::sscanf(row.c_str(), "%lg,%lg,%lg", &R, &E, &share) == 3) {
          pr.r_ladder.emplace_back(R, E);
          pr.exterior_share.emplace_back(R, share);
        }
      }
    }
  }
  return pr;
}

}  // namespace fracphase
