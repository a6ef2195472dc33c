#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracphase/kernel.hpp"
#include "fracphase/util.hpp"

// Tail coefficients: integrals of the kernel from each cell against the
// region beyond the collar. 1D uses closed forms, 2D a polar decomposition
// with exact radial integrals. Sign patterns split the radial integral at the
// pattern's plane crossings; layer profiles add a numeric correction over the
// band where the profile has not yet clamped to +/-1.

namespace fracphase {
namespace {

// antiderivative of tau^-2s
double F_pow(double tau, double s) {
  if (std::abs(2.0 * s - 1.0) < 1e-14) return std::log(tau);
  return std::pow(tau, 1.0 - 2.0 * s) / (1.0 - 2.0 * s);
}

struct Cell1D {
  double a, b;  // [a, b], width h
};

// int_cell (c - x)^-2s dx / (2s) for a breakpoint c >= b, with a sub-point
// fallback when the cell touches c and the closed form diverges (s >= 1/2).
double H_right(const Cell1D& cell, double c, double s, int subpoints) {
  if (std::isinf(c)) return 0.0;
  const double gap = c - cell.b;
  if (gap <= 1e-12 * (cell.b - cell.a) && s >= 0.5 - 1e-14) {
    const int m = std::max(subpoints, 2);
    const double hs = (cell.b - cell.a) / m;
    double acc = 0.0;
    for (int p = 0; p < m; ++p) {
      const double x = cell.a + (p + 0.5) * hs;
      acc += hs * std::pow(c - x, -2.0 * s);
    }
    return acc / (2.0 * s);
  }
  return (F_pow(c - cell.a, s) - F_pow(c - cell.b, s)) / (2.0 * s);
}

double H_left(const Cell1D& cell, double c, double s, int subpoints) {
  if (std::isinf(c)) return 0.0;
  Cell1D mirror{-cell.b, -cell.a};
  return H_right(mirror, -c, s, subpoints);
}

// Sign of a SignRegion along the 1D axis at coordinate y.
double region_sign_1d(const SignRegion& r, double y) {
  double x[2] = {y, 0.0};
  return r.sign_at(x, 1);
}

// Breakpoints of a sign region on a right ray (start, +inf).
std::vector<double> ray_breaks_right(const SignRegion& r, double start) {
  std::vector<double> cs{start};
  for (double v : {r.lo[0], r.hi[0]})
    if (std::isfinite(v) && v > start) cs.push_back(v);
  std::sort(cs.begin(), cs.end());
  return cs;
}

std::vector<double> ray_breaks_left(const SignRegion& r, double start) {
  std::vector<double> cs{start};
  for (double v : {r.lo[0], r.hi[0]})
    if (std::isfinite(v) && v < start) cs.push_back(v);
  std::sort(cs.begin(), cs.end(), std::greater<>());
  return cs;
}

// ---------------------------------------------------------------- 2D polar

struct Ray {
  double dx, dy;
};

// Exit distance of x + t*dir from the extended box; x strictly inside.
double box_exit(const BoxDomain& d, const double* x, const Ray& r) {
  double t = std::numeric_limits<double>::infinity();
  const double dir[2] = {r.dx, r.dy};
  for (int k = 0; k < 2; ++k) {
    if (dir[k] > 1e-300)
      t = std::min(t, (d.ext_upper(k) - x[k]) / dir[k]);
    else if (dir[k] < -1e-300)
      t = std::min(t, (d.ext_lower(k) - x[k]) / dir[k]);
  }
  return t;
}

// Radial integral of t^-(1+2s) over [a, b] (b may be inf).
double radial_piece(double a, double b, double s) {
  const double fa = std::pow(a, -2.0 * s);
  const double fb = std::isinf(b) ? 0.0 : std::pow(b, -2.0 * s);
  return (fa - fb) / (2.0 * s);
}

// Signed radial integral against a sign region along the ray beyond rho.
double radial_signed(const BoxDomain& d, const double* x, const Ray& r, double rho,
                     double s, const SignRegion& region) {
  double ts[6];
  int nts = 0;
  const double dir[2] = {r.dx, r.dy};
  for (int k = 0; k < 2; ++k)
    for (double v : {region.lo[k], region.hi[k]}) {
      if (!std::isfinite(v) || std::abs(dir[k]) < 1e-300) continue;
      const double t = (v - x[k]) / dir[k];
      if (t > rho) ts[nts++] = t;
    }
  std::sort(ts, ts + nts);
  double acc = 0.0;
  double prev = rho;
  for (int i = 0; i <= nts; ++i) {
    const double next = i < nts ? ts[i] : std::numeric_limits<double>::infinity();
    if (next <= prev) continue;
    const double tm = std::isinf(next) ? prev + std::max(1.0, std::abs(prev)) : 0.5 * (prev + next);
    const double p[2] = {x[0] + tm * r.dx, x[1] + tm * r.dy};
    acc += region.sign_at(p, d.dim()) * radial_piece(prev, next, s);
    prev = next;
  }
  return acc;
}

// ------------------------------------------------- G_s table for layer tails

// G(rho) = int_rho^inf (1+tau^2)^-(1+s) dtau, tabulated on rho/(1+rho), rho>=0.
class TransverseTail {
 public:
  explicit TransverseTail(double s) : s_(s) {
    const int n = 2048;
    // cumulative int_0^rho on a graded grid
    grid_.resize(n + 1);
    cum_.resize(n + 1);
    std::vector<double> gn, gw;
    double acc = 0.0;
    grid_[0] = 0.0;
    cum_[0] = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double u = static_cast<double>(i) / n;
      grid_[i] = u >= 1.0 ? 1e30 : u / (1.0 - u);
      gauss_legendre(8, grid_[i - 1], std::min(grid_[i], 1e12), gn, gw);
      for (int q = 0; q < 8; ++q) acc += gw[q] * std::pow(1.0 + gn[q] * gn[q], -(1.0 + s_));
      cum_[i] = acc;
    }
    half_ = cum_[n];  // int_0^inf
  }
  double full() const { return 2.0 * half_; }
  double operator()(double rho) const {
    if (rho <= -1e12) return full();
    if (rho < 0) return full() - (*this)(-rho);
    if (rho >= 1e12) return 0.0;
    const double u = rho / (1.0 + rho);
    const double f = u * grid_.size() > 0 ? u * (grid_.size() - 1) : 0.0;
    std::size_t i = std::min(static_cast<std::size_t>(f), grid_.size() - 2);
    const double r0 = grid_[i], r1 = grid_[i + 1];
    const double w = r1 > r0 ? (rho - r0) / (r1 - r0) : 0.0;
    const double c = cum_[i] + w * (cum_[i + 1] - cum_[i]);
    return half_ - c;
  }

 private:
  double s_;
  double half_ = 0.0;
  std::vector<double> grid_, cum_;
};

// Panel breakpoints for the band integral in the layer-profile correction:
// geometric refinement around `center`, uniform resolution `res`, clipped to
// [lo, hi], plus explicit breakpoints.
std::vector<double> band_breaks(double lo, double hi, double center, double res,
                                const std::vector<double>& extra) {
  std::vector<double> b{lo, hi};
  for (double v : extra)
    if (v > lo && v < hi) b.push_back(v);
  const double span = hi - lo;
  for (int k = 0; k <= 20; ++k) {
    const double off = span * std::ldexp(1.0, -k);
    for (double v : {center - off, center + off})
      if (v > lo && v < hi) b.push_back(v);
  }
  const int max_uniform = 320;
  const int nu = std::min(max_uniform, static_cast<int>(span / std::max(res, 1e-12)));
  for (int i = 1; i < nu; ++i) b.push_back(lo + span * i / nu);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end(),
                      [&](double p, double q) { return q - p < 1e-15 * (1.0 + std::abs(p)); }),
          b.end());
  return b;
}

}  // namespace

std::vector<double> compute_tail_totals(const BoxDomain& d, double s,
                                        const WeightOptions& opt) {
  std::vector<double> t0(d.cell_count(), 0.0);
  const double scale = opt.kernel_scale;
  if (d.dim() == 1) {
    const double A = d.ext_lower(0), B = d.ext_upper(0);
    parallel_for(d.cell_count(), [&](int c) {
      const double xc = d.center(c)[0];
      Cell1D cell{xc - 0.5 * d.h(), xc + 0.5 * d.h()};
      t0[c] = scale * (H_right(cell, B, s, opt.refinement) + H_left(cell, A, s, opt.refinement));
    });
    return t0;
  }
  const int m = std::max(1, opt.tail_subpoints);
  const int nth = std::max(16, opt.theta_samples);
  const double dtheta = 2.0 * M_PI / nth;
  const double subw = (d.h() / m) * (d.h() / m);
  parallel_for(d.cell_count(), [&](int c) {
    const auto xc = d.center(c);
    CompensatedSum acc;
    for (int px = 0; px < m; ++px)
      for (int py = 0; py < m; ++py) {
        const double x[2] = {xc[0] + (px + 0.5) * d.h() / m - 0.5 * d.h(),
                             xc[1] + (py + 0.5) * d.h() / m - 0.5 * d.h()};
        for (int j = 0; j < nth; ++j) {
          const double th = (j + 0.5) * dtheta;
          const Ray r{std::cos(th), std::sin(th)};
          const double rho = box_exit(d, x, r);
          acc.add(radial_piece(rho, std::numeric_limits<double>::infinity(), s));
        }
      }
    t0[c] = scale * subw * dtheta * acc.value();
  });
  return t0;
}

namespace {

// Layer-profile band corrections: per-cell integrals over the beyond-collar
// region of (g - sign) and (g^2 - 1) against the kernel. Zero once the band
// where the profile is unclamped lies inside the grid.
void profile_corrections(const BoxDomain& d, double s, const WeightOptions& opt,
                         const ExteriorSpec& ext, std::vector<double>& corr1,
                         std::vector<double>& corr2) {
  const int n = d.cell_count();
  corr1.assign(n, 0.0);
  corr2.assign(n, 0.0);
  const auto& table = *ext.profile_table;
  const double W = table.clamp_range() * ext.profile_eps;
  const double off = ext.profile_offset;
  const double orient = ext.profile_orient;
  const int ax = ext.profile_axis;
  const double band_lo = off - W, band_hi = off + W;
  auto g_of = [&](double y) { return table.eval(orient * (y - off) / ext.profile_eps); };
  auto sgn_of = [&](double y) { return orient * (y - off) > 0 ? 1.0 : -1.0; };
  const double scale = opt.kernel_scale;

  if (d.dim() == 1) {
    const double A = d.ext_lower(0), B = d.ext_upper(0);
    // ray pieces beyond the grid intersected with the band
    struct Piece {
      double lo, hi;
    };
    std::vector<Piece> pieces;
    if (band_hi > B) pieces.push_back({std::max(B, band_lo), band_hi});
    if (band_lo < A) pieces.push_back({band_lo, std::min(A, band_hi)});
    if (pieces.empty()) return;
    const int m = std::max(2, opt.tail_subpoints);
    std::vector<double> gn, gw;
    parallel_for(n, [&](int c) {
      const double xc = d.center(c)[0];
      double acc1 = 0.0, acc2 = 0.0;
      for (int p = 0; p < m; ++p) {
        const double x = xc - 0.5 * d.h() + (p + 0.5) * d.h() / m;
        for (const auto& pc : pieces) {
          auto breaks = band_breaks(pc.lo, pc.hi, x, ext.profile_eps * 0.5, {off});
          for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
            gauss_legendre(4, breaks[k], breaks[k + 1], gn, gw);
            for (int q = 0; q < 4; ++q) {
              const double y = gn[q];
              const double kern = std::pow(std::abs(y - x), -(1.0 + 2.0 * s));
              const double g = g_of(y);
              const double r = g - sgn_of(y);
              acc1 += gw[q] * r * kern;
              acc2 += gw[q] * (g * g - 1.0) * kern;
            }
          }
        }
      }
      corr1[c] = scale * acc1 * d.h() / m;
      corr2[c] = scale * acc2 * d.h() / m;
    });
    return;
  }

  // 2D: separate the transverse direction. For y_ax fixed, the slice of the
  // beyond-region along the other axis integrates to closed form in terms of
  // G(rho) = int_rho^inf (1+tau^2)^-(1+s).
  const int ox = 1 - ax;
  const double boxlo_ax = d.ext_lower(ax), boxhi_ax = d.ext_upper(ax);
  const double boxlo_ox = d.ext_lower(ox), boxhi_ox = d.ext_upper(ox);
  TransverseTail G(s);
  const int m = 2;
  std::vector<double> gn, gw;
  std::vector<double> breaks;
  parallel_for(n, [&](int c) {
    const auto xc = d.center(c);
    double acc1 = 0.0, acc2 = 0.0;
    std::vector<double> gn_local, gw_local;
    for (int px = 0; px < m; ++px)
      for (int py = 0; py < m; ++py) {
        double x[2];
        x[0] = xc[0] - 0.5 * d.h() + ((ax == 0 ? px : py) + 0.5) * d.h() / m;
        x[1] = xc[1] - 0.5 * d.h() + ((ax == 0 ? py : px) + 0.5) * d.h() / m;
        const double x_ax = x[ax], x_ox = x[ox];
        auto local = band_breaks(band_lo, band_hi, x_ax, ext.profile_eps,
                                 {off, boxlo_ax, boxhi_ax});
        for (std::size_t k = 0; k + 1 < local.size(); ++k) {
          gauss_legendre(4, local[k], local[k + 1], gn_local, gw_local);
          for (int q = 0; q < 4; ++q) {
            const double y_ax = gn_local[q];
            const double dz = std::abs(y_ax - x_ax);
            if (dz < 1e-14) continue;
            double slice;
            const double pref = std::pow(dz, -(1.0 + 2.0 * s));
            if (y_ax > boxlo_ax && y_ax < boxhi_ax)
              slice = pref * (G((boxhi_ox - x_ox) / dz) + G((x_ox - boxlo_ox) / dz));
            else
              slice = pref * G.full();
            const double g = g_of(y_ax);
            acc1 += gw_local[q] * (g - sgn_of(y_ax)) * slice;
            acc2 += gw_local[q] * (g * g - 1.0) * slice;
          }
        }
      }
    const double men = (d.h() / m) * (d.h() / m);
    corr1[c] = scale * acc1 * men;
    corr2[c] = scale * acc2 * men;
  });
  (void)breaks;
  (void)gn;
  (void)gw;
}

}  // namespace

TailTable compute_tail_moments(const BoxDomain& d, double s, const WeightOptions& opt,
                               std::span<const double> tail0,
                               const ExteriorSpec& exterior) {
  TailTable t;
  const int n = d.cell_count();
  t.t1.assign(n, 0.0);
  t.t2.assign(n, 0.0);

  if (exterior.kind == ExteriorSpec::Kind::Constant) {
    const double c = exterior.constant;
    for (int i = 0; i < n; ++i) {
      t.t1[i] = c * tail0[i];
      t.t2[i] = c * c * tail0[i];
    }
    return t;
  }
  if (!exterior.has_evaluator())
    throw std::invalid_argument("tail moments: profile exterior without a registered evaluator");

  const SignRegion region =
      exterior.kind == ExteriorSpec::Kind::SignPattern
          ? exterior.pattern
          : SignRegion::half_space(exterior.profile_axis, exterior.profile_offset,
                                   exterior.profile_orient > 0);
  const double scale = opt.kernel_scale;

  if (d.dim() == 1) {
    const double A = d.ext_lower(0), B = d.ext_upper(0);
    const auto right = ray_breaks_right(region, B);
    const auto left = ray_breaks_left(region, A);
    parallel_for(n, [&](int c) {
      const double xc = d.center(c)[0];
      Cell1D cell{xc - 0.5 * d.h(), xc + 0.5 * d.h()};
      double acc = 0.0;
      for (std::size_t k = 0; k < right.size(); ++k) {
        const double c0 = right[k];
        const double c1 = k + 1 < right.size() ? right[k + 1]
                                               : std::numeric_limits<double>::infinity();
        const double sg = region_sign_1d(region, std::isinf(c1) ? c0 + 1.0 + std::abs(c0)
                                                                : 0.5 * (c0 + c1));
        acc += sg * (H_right(cell, c0, s, opt.refinement) - H_right(cell, c1, s, opt.refinement));
      }
      for (std::size_t k = 0; k < left.size(); ++k) {
        const double c0 = left[k];
        const double c1 = k + 1 < left.size() ? left[k + 1]
                                              : -std::numeric_limits<double>::infinity();
        const double sg = region_sign_1d(region, std::isinf(c1) ? c0 - 1.0 - std::abs(c0)
                                                                : 0.5 * (c0 + c1));
        acc += sg * (H_left(cell, c0, s, opt.refinement) - H_left(cell, c1, s, opt.refinement));
      }
      t.t1[c] = scale * acc;
      t.t2[c] = tail0[c];
    });
  } else {
    const int m = std::max(1, opt.tail_subpoints);
    const int nth = std::max(16, opt.theta_samples);
    const double dtheta = 2.0 * M_PI / nth;
    const double subw = (d.h() / m) * (d.h() / m);
    parallel_for(n, [&](int c) {
      const auto xc = d.center(c);
      CompensatedSum acc;
      for (int px = 0; px < m; ++px)
        for (int py = 0; py < m; ++py) {
          const double x[2] = {xc[0] + (px + 0.5) * d.h() / m - 0.5 * d.h(),
                               xc[1] + (py + 0.5) * d.h() / m - 0.5 * d.h()};
          for (int j = 0; j < nth; ++j) {
            const double th = (j + 0.5) * dtheta;
            const Ray r{std::cos(th), std::sin(th)};
            const double rho = box_exit(d, x, r);
            acc.add(radial_signed(d, x, r, rho, s, region));
          }
        }
      t.t1[c] = scale * subw * dtheta * acc.value();
      t.t2[c] = tail0[c];
    });
  }

  if (exterior.kind == ExteriorSpec::Kind::Profile) {
    std::vector<double> corr1, corr2;
    profile_corrections(d, s, opt, exterior, corr1, corr2);
    for (int i = 0; i < n; ++i) {
      t.t1[i] += corr1[i];
      t.t2[i] += corr2[i];
    }
  }
  return t;
}

}  // namespace fracphase
