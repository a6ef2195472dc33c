#include "fracphase/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "fracphase/util.hpp"

namespace fracphase {

namespace {

// Per-axis density of the difference D = y - x for x in [a0,a1], y in [b0,b1]:
// the overlap measure |A cap (B - D)|, a trapezoid.
double diff_density(double D, double a0, double a1, double b0, double b1) {
  const double lo = std::max(a0, b0 - D);
  const double hi = std::min(a1, b1 - D);
  return hi > lo ? hi - lo : 0.0;
}

// Geometric panels covering [0, len] graded toward 0 (finest ~ len * 2^-depth),
// emitted as consecutive breakpoints including both ends.
void graded_breaks(double len, int depth, std::vector<double>& out) {
  out.clear();
  out.push_back(0.0);
  for (int k = depth; k >= 1; --k) out.push_back(len * std::ldexp(1.0, -k));
  out.push_back(len);
}

// Panels for a difference-axis range [lo, hi] graded toward 0 when the range
// touches or straddles it; a few uniform panels otherwise.
void axis_panels(double lo, double hi, int depth, std::vector<double>& breaks) {
  breaks.clear();
  std::vector<double> tmp;
  if (lo < 0.0 && hi > 0.0) {
    graded_breaks(-lo, depth, tmp);
    for (auto it = tmp.rbegin(); it != tmp.rend(); ++it) breaks.push_back(-*it);
    graded_breaks(hi, depth, tmp);
    breaks.insert(breaks.end(), tmp.begin() + 1, tmp.end());
  } else if (lo >= 0.0) {
    if (lo == 0.0) {
      graded_breaks(hi, depth, tmp);
      breaks = tmp;
    } else {
      graded_breaks(hi - lo, std::min(depth, 8), tmp);
      for (double b : tmp) breaks.push_back(lo + b);
    }
  } else {  // hi <= 0
    axis_panels(-hi, -lo, depth, tmp);
    for (auto it = tmp.rbegin(); it != tmp.rend(); ++it) breaks.push_back(-*it);
  }
}

// Exact 1D integral int rho(D) |D|^-(1+2s) dD for the piecewise-linear density
// of one axis. Pieces touching D = 0 have rho ~ |D| there, so the integrand is
// integrable iff s < 1/2; callers guard the divergent case.
double pair_integral_1d(double a0, double a1, double b0, double b1, double s) {
  const double knots_raw[4] = {b0 - a1, std::min(b0 - a0, b1 - a1),
                               std::max(b0 - a0, b1 - a1), b1 - a0};
  std::vector<double> knots(knots_raw, knots_raw + 4);
  if (knots.front() < 0.0 && knots.back() > 0.0) knots.push_back(0.0);
  std::sort(knots.begin(), knots.end());
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < knots.size(); ++p) {
    const double lo = knots[p], hi = knots[p + 1];
    if (hi - lo <= 0.0) continue;
    // rho is linear on this piece: rho(D) = alpha*D + beta.
    const double mid = 0.5 * (lo + hi);
    const double rm = diff_density(mid, a0, a1, b0, b1);
    const double rl = diff_density(lo, a0, a1, b0, b1);
    const double alpha = (rm - rl) / (mid - lo);
    const double beta = rl - alpha * lo;
    // Work on |D|; flip sign for negative pieces.
    double A = std::min(std::abs(lo), std::abs(hi));
    double B = std::max(std::abs(lo), std::abs(hi));
    const double sgn = mid < 0 ? -1.0 : 1.0;
    const double al = alpha * sgn;  // rho(|D|) = al*|D| + beta on the piece
    // int (al*t + beta) t^-(1+2s) dt over [A, B]
    double term_lin, term_const;
    if (std::abs(1.0 - 2.0 * s) < 1e-14)
      term_lin = al * (std::log(B) - std::log(A));
    else
      term_lin = al * (std::pow(B, 1.0 - 2.0 * s) - std::pow(A, 1.0 - 2.0 * s)) / (1.0 - 2.0 * s);
    if (A == 0.0) {
      if (std::abs(beta) > 1e-300)
        throw std::domain_error("pair_integral_1d: divergent (touching, s >= 1/2)");
      term_const = 0.0;
      if (2.0 * s >= 1.0 && al != 0.0)
        throw std::domain_error("pair_integral_1d: divergent (touching, s >= 1/2)");
      term_lin = al * std::pow(B, 1.0 - 2.0 * s) / (1.0 - 2.0 * s);
    } else {
      term_const = beta * (std::pow(A, -2.0 * s) - std::pow(B, -2.0 * s)) / (2.0 * s);
    }
    total += term_lin + term_const;
  }
  return total;
}

}  // namespace

double box_pair_integral(int dim, const double* a_lo, const double* a_hi,
                         const double* b_lo, const double* b_hi, double s,
                         int grade_depth) {
  if (dim == 1) return pair_integral_1d(a_lo[0], a_hi[0], b_lo[0], b_hi[0], s);
  // 2D: reduce to the difference variable, graded Gauss panels per axis.
  std::vector<double> bx, by;
  axis_panels(b_lo[0] - a_hi[0], b_hi[0] - a_lo[0], grade_depth, bx);
  axis_panels(b_lo[1] - a_hi[1], b_hi[1] - a_lo[1], grade_depth, by);
  std::vector<double> gx, gwx, gy, gwy;
  const double expo = -(2.0 + 2.0 * s) / 2.0;  // applied to D1^2+D2^2
  double total = 0.0;
  for (std::size_t px = 0; px + 1 < bx.size(); ++px) {
    if (bx[px + 1] - bx[px] <= 0.0) continue;
    gauss_legendre(4, bx[px], bx[px + 1], gx, gwx);
    for (std::size_t py = 0; py + 1 < by.size(); ++py) {
      if (by[py + 1] - by[py] <= 0.0) continue;
      gauss_legendre(4, by[py], by[py + 1], gy, gwy);
      double acc = 0.0;
      for (int i = 0; i < 4; ++i) {
        const double r1 = diff_density(gx[i], a_lo[0], a_hi[0], b_lo[0], b_hi[0]);
        if (r1 == 0.0) continue;
        for (int j = 0; j < 4; ++j) {
          const double r2 = diff_density(gy[j], a_lo[1], a_hi[1], b_lo[1], b_hi[1]);
          if (r2 == 0.0) continue;
          const double q = gx[i] * gx[i] + gy[j] * gy[j];
          acc += gwx[i] * gwy[j] * r1 * r2 * std::pow(q, expo);
        }
      }
      total += acc;
    }
  }
  return total;
}

double tail_integral(double alpha, double s, int dim) {
  if (!(alpha > 0)) throw std::invalid_argument("tail_integral: alpha must be positive");
  if (!(s > 0 && s < 1)) throw std::invalid_argument("tail_integral: s must lie in (0,1)");
  if (dim != 1 && dim != 2) throw std::invalid_argument("tail_integral: dim must be 1 or 2");
  const double surface = dim == 1 ? 2.0 : 2.0 * M_PI;
  return surface * std::pow(alpha, -2.0 * s) / (2.0 * s);
}

namespace {

// Refined sub-cell product rule: midpoints of refinement^dim sub-cells of each
// cell, cells at offset (dxc, dyc) in units of h.
double product_rule_weight(int dim, double h, double s, int refinement, int dxc, int dyc,
                           double scale) {
  const int r = refinement;
  const double hs = h / r;
  const double expo = -(dim + 2.0 * s);
  double acc = 0.0;
  if (dim == 1) {
    for (int p = 0; p < r; ++p)
      for (int q = 0; q < r; ++q) {
        const double d = std::abs(dxc * h + (q - p) * hs);
        acc += std::pow(d, expo);
      }
    return scale * acc * hs * hs;
  }
  for (int px = 0; px < r; ++px)
    for (int py = 0; py < r; ++py)
      for (int qx = 0; qx < r; ++qx)
        for (int qy = 0; qy < r; ++qy) {
          const double ddx = dxc * h + (qx - px) * hs;
          const double ddy = dyc * h + (qy - py) * hs;
          acc += std::pow(ddx * ddx + ddy * ddy, expo / 2.0);
        }
  return scale * acc * hs * hs * hs * hs;
}

double offset_weight(int dim, double h, double s, const WeightOptions& opt, int adx, int ady) {
  if (adx == 0 && ady == 0) return 0.0;  // same-cell difference is 0
  const double dist = h * std::sqrt(double(adx) * adx + double(ady) * ady);
  if (dist > opt.near_radius_cells * h) {
    // Midpoint rule for well-separated pairs.
    const double expo = -(dim + 2.0 * s);
    const double meas = dim == 1 ? h * h : h * h * h * h;
    return opt.kernel_scale * meas * std::pow(dist, expo);
  }
  const bool touching = adx <= 1 && ady <= 1;
  if (touching && s < 0.5) {
    const double a_lo[2] = {0.0, 0.0}, a_hi[2] = {h, h};
    const double b_lo[2] = {adx * h, ady * h}, b_hi[2] = {adx * h + h, ady * h + h};
    return opt.kernel_scale * box_pair_integral(dim, a_lo, a_hi, b_lo, b_hi, s);
  }
  return product_rule_weight(dim, h, s, opt.refinement, adx, ady, opt.kernel_scale);
}

}  // namespace

KernelWeights KernelWeights::build(const BoxDomain& domain, double s, int refinement) {
  WeightOptions opt;
  opt.refinement = refinement;
  return build(domain, s, opt);
}

KernelWeights KernelWeights::build(const BoxDomain& domain, double s, const WeightOptions& opt) {
  if (!(s > 0 && s < 1)) throw std::invalid_argument("build_weights: s must lie in (0,1)");
  if (opt.refinement < 1) throw std::invalid_argument("build_weights: refinement must be >= 1");
  KernelWeights w;
  w.domain_ = domain;
  w.s_ = s;
  w.opt_ = opt;
  const int nx = domain.nx(), ny = domain.ny();
  w.row_width_ = 2 * nx - 1;
  w.table_.assign(static_cast<std::size_t>(ny) * w.row_width_, 0.0);
  const int dim = domain.dim();
  const double h = domain.h();
  parallel_for(ny, [&](int ady) {
    double* row = w.table_.data() + static_cast<std::size_t>(ady) * w.row_width_;
    for (int adx = 0; adx < nx; ++adx) {
      const double v = offset_weight(dim, h, s, opt, adx, ady);
      row[nx - 1 + adx] = v;
      row[nx - 1 - adx] = v;
    }
  });
  w.tail0_ = compute_tail_totals(domain, s, opt);
  return w;
}

double KernelWeights::pair_weight(int i, int j) const {
  const auto ci = domain_.coord(i), cj = domain_.coord(j);
  const int ady = std::abs(ci[1] - cj[1]);
  return offset_row(ady)[cj[0] - ci[0] + domain_.nx() - 1];
}

std::shared_ptr<const TailTable> KernelWeights::tail_moments(const ExteriorSpec& exterior) const {
  const std::string key = exterior.cache_key();
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = tail_cache_.find(key);
    if (it != tail_cache_.end()) return it->second;
  }
  auto table = std::make_shared<TailTable>(
      compute_tail_moments(domain_, s_, opt_, tail0_, exterior));
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto [it, inserted] = tail_cache_.emplace(key, std::move(table));
  return it->second;
}

KernelWeights::KernelWeights(const KernelWeights& o)
    : domain_(o.domain_), s_(o.s_), opt_(o.opt_), row_width_(o.row_width_),
      table_(o.table_), tail0_(o.tail0_) {}

KernelWeights& KernelWeights::operator=(const KernelWeights& o) {
  if (this != &o) {
    domain_ = o.domain_;
    s_ = o.s_;
    opt_ = o.opt_;
    row_width_ = o.row_width_;
    table_ = o.table_;
    tail0_ = o.tail0_;
    tail_cache_.clear();
  }
  return *this;
}

KernelWeights::KernelWeights(KernelWeights&& o) noexcept
    : domain_(o.domain_), s_(o.s_), opt_(o.opt_), row_width_(o.row_width_),
      table_(std::move(o.table_)), tail0_(std::move(o.tail0_)) {}

KernelWeights& KernelWeights::operator=(KernelWeights&& o) noexcept {
  domain_ = o.domain_;
  s_ = o.s_;
  opt_ = o.opt_;
  row_width_ = o.row_width_;
  table_ = std::move(o.table_);
  tail0_ = std::move(o.tail0_);
  tail_cache_.clear();
  return *this;
}

double interaction(const ScalarField& u, std::span<const int> E, std::span<const int> F,
                   const KernelWeights& w) {
  const auto& d = u.domain;
  if (!d.same_grid(w.domain()))
    throw std::invalid_argument("interaction: field and weights on different grids");
  const int nxm1 = d.nx() - 1;
  std::vector<double> rows(E.size());
  parallel_for(static_cast<int>(E.size()), [&](int eidx) {
    const int i = E[eidx];
    const auto ci = d.coord(i);
    const double ui = u.values[i];
    CompensatedSum acc;
    for (int j : F) {
      const auto cj = d.coord(j);
      const double* row = w.offset_row(std::abs(ci[1] - cj[1]));
      const double diff = ui - u.values[j];
      acc.add(row[cj[0] - ci[0] + nxm1] * diff * diff);
    }
    rows[eidx] = acc.value();
  });
  return pairwise_sum(rows);
}

double set_interaction(std::span<const int> A, std::span<const int> D,
                       const KernelWeights& w) {
  if (!sets_disjoint(A, D))
    throw std::invalid_argument("set_interaction: A and D must be disjoint");
  const auto& dom = w.domain();
  const int nxm1 = dom.nx() - 1;
  std::vector<double> rows(A.size());
  parallel_for(static_cast<int>(A.size()), [&](int aidx) {
    const int i = A[aidx];
    const auto ci = dom.coord(i);
    CompensatedSum acc;
    for (int j : D) {
      const auto cj = dom.coord(j);
      acc.add(w.offset_row(std::abs(ci[1] - cj[1]))[cj[0] - ci[0] + nxm1]);
    }
    rows[aidx] = acc.value();
  });
  return pairwise_sum(rows);
}

KineticParts kinetic_parts(const ScalarField& u, const KernelWeights& w,
                           std::span<const int> region) {
  const auto& d = u.domain;
  if (!d.same_grid(w.domain()))
    throw std::invalid_argument("gagliardo: field and weights on different grids");
  if (!u.exterior.has_evaluator())
    throw std::invalid_argument("gagliardo: profile exterior without a registered evaluator");
  const int n = d.cell_count();
  std::vector<std::uint8_t> in_region(n, 0);
  for (int c : region) in_region[c] = 1;
  auto tails = w.tail_moments(u.exterior);
  const int nxm1 = d.nx() - 1;
  const int nx = d.nx(), ny = d.ny();

  std::vector<double> row_int(region.size()), row_cross(region.size()), row_tail(region.size());
  parallel_for(static_cast<int>(region.size()), [&](int ridx) {
    const int i = region[ridx];
    const auto ci = d.coord(i);
    const double ui = u.values[i];
    CompensatedSum acc_int, acc_cross;
    for (int jy = 0; jy < ny; ++jy) {
      const double* wrow = w.offset_row(std::abs(ci[1] - jy)) + (nxm1 - ci[0]);
      const double* uv = u.values.data() + static_cast<std::size_t>(jy) * nx;
      const std::uint8_t* reg = in_region.data() + static_cast<std::size_t>(jy) * nx;
      for (int jx = 0; jx < nx; ++jx) {
        const double diff = ui - uv[jx];
        const double t = wrow[jx] * diff * diff;
        if (reg[jx])
          acc_int.add(t);
        else
          acc_cross.add(t);
      }
    }
    row_int[ridx] = 0.5 * acc_int.value();
    row_cross[ridx] = acc_cross.value();
    row_tail[ridx] = w.tail_total(i) * ui * ui - 2.0 * tails->t1[i] * ui + tails->t2[i];
  });
  KineticParts parts;
  parts.interior = pairwise_sum(row_int);
  parts.cross = pairwise_sum(row_cross);
  parts.tail = pairwise_sum(row_tail);
  return parts;
}

double gagliardo(const ScalarField& u, const KernelWeights& w, std::span<const int> region) {
  const auto parts = kinetic_parts(u, w, region);
  return parts.interior + parts.cross + parts.tail;
}

double gagliardo(const ScalarField& u, const KernelWeights& w) {
  const auto region = u.domain.interior_cells();
  return gagliardo(u, w, region);
}

namespace {
constexpr char kCacheMagic[8] = {'F', 'P', 'K', 'W', '0', '0', '0', '1'};

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <typename T>
void get(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof v);
}
}  // namespace

void KernelWeights::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("KernelWeights::save: cannot open " + path);
  out.write(kCacheMagic, sizeof kCacheMagic);
  const std::uint64_t dh = domain_.hash();
  put(out, dh);
  const std::int32_t dim = domain_.dim();
  put(out, dim);
  for (int k = 0; k < dim; ++k) {
    const double lo = domain_.lower(k), hi = domain_.upper(k);
    put(out, lo);
    put(out, hi);
  }
  const double h = domain_.h(), collar = domain_.collar_radius();
  put(out, h);
  put(out, collar);
  put(out, s_);
  const std::int32_t refinement = opt_.refinement, theta = opt_.theta_samples,
                     subp = opt_.tail_subpoints;
  put(out, refinement);
  put(out, opt_.near_radius_cells);
  put(out, theta);
  put(out, subp);
  put(out, opt_.kernel_scale);
  const std::uint64_t tn = table_.size(), t0n = tail0_.size();
  put(out, tn);
  out.write(reinterpret_cast<const char*>(table_.data()), table_.size() * sizeof(double));
  put(out, t0n);
  out.write(reinterpret_cast<const char*>(tail0_.data()), tail0_.size() * sizeof(double));
}

KernelWeights KernelWeights::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("KernelWeights::load: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (std::memcmp(magic, kCacheMagic, sizeof magic) != 0)
    throw std::runtime_error("KernelWeights::load: bad magic in " + path);
  std::uint64_t dh;
  get(in, dh);
  std::int32_t dim;
  get(in, dim);
  std::vector<double> lower(dim), upper(dim);
  for (int k = 0; k < dim; ++k) {
    get(in, lower[k]);
    get(in, upper[k]);
  }
  double h, collar;
  get(in, h);
  get(in, collar);
  KernelWeights w;
  w.domain_ = BoxDomain::create(dim, lower, upper, h, collar);
  if (w.domain_.hash() != dh)
    throw std::runtime_error("KernelWeights::load: domain hash mismatch in " + path);
  get(in, w.s_);
  std::int32_t refinement, theta, subp;
  get(in, refinement);
  get(in, w.opt_.near_radius_cells);
  get(in, theta);
  get(in, subp);
  get(in, w.opt_.kernel_scale);
  w.opt_.refinement = refinement;
  w.opt_.theta_samples = theta;
  w.opt_.tail_subpoints = subp;
  std::uint64_t tn, t0n;
  get(in, tn);
  w.table_.resize(tn);
  in.read(reinterpret_cast<char*>(w.table_.data()), tn * sizeof(double));
  get(in, t0n);
  w.tail0_.resize(t0n);
  in.read(reinterpret_cast<char*>(w.tail0_.data()), t0n * sizeof(double));
  if (!in) throw std::runtime_error("KernelWeights::load: truncated file " + path);
  w.row_width_ = 2 * w.domain_.nx() - 1;
  return w;
}

}  // namespace fracphase
