#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "fracphase/grid.hpp"

namespace fracphase {

struct WeightOptions {
  int refinement = 8;            // sub-cell points per axis for near pairs
  double near_radius_cells = 3;  // refine pairs with center distance <= this * h
  int theta_samples = 720;       // angular nodes for 2D tail integrals
  int tail_subpoints = 3;        // sub-cell points per axis for tail quadrature
  double kernel_scale = 1.0;     // multiplies the kernel (transverse moment for
                                 // reduced-dimension profiles)
};

// Per-cell tail integrals against an exterior rule g beyond the collar:
//   t0 = sum_cell int |x-y|^-(n+2s) dy dx          (g-independent)
//   t1 = ... g(y) ...        t2 = ... g(y)^2 ...
// so the tail energy of cell i is t0*u_i^2 - 2*t1*u_i + t2.
struct TailTable {
  std::vector<double> t1, t2;
};

// Pairwise quadrature weights of |x-y|^-(n+2s) over cell pairs plus per-cell
// far-field tail coefficients. On a uniform grid the pair weight depends only
// on the cell offset, so the table is stored per offset (full width in x,
// absolute value in y), which also makes symmetry exact.
class KernelWeights {
 public:
  static KernelWeights build(const BoxDomain& domain, double s, int refinement);
  static KernelWeights build(const BoxDomain& domain, double s, const WeightOptions& opt);

  const BoxDomain& domain() const { return domain_; }
  double s() const { return s_; }
  const WeightOptions& options() const { return opt_; }

  double pair_weight(int i, int j) const;
  double tail_total(int cell) const { return tail0_[cell]; }
  std::span<const double> tail_totals() const { return tail0_; }

  // Row slice of the offset table for |dy| = ady: entry [dx + nx - 1] is the
  // weight at x-offset dx. Hot loops index it directly.
  const double* offset_row(int ady) const { return table_.data() + ady * row_width_; }
  int row_center() const { return domain_.nx() - 1; }

  // Cached per-exterior tail moments; deterministic, safe to share.
  std::shared_ptr<const TailTable> tail_moments(const ExteriorSpec& exterior) const;

  void save(const std::string& path) const;
  static KernelWeights load(const std::string& path);

 private:
  BoxDomain domain_;
  double s_ = 0.5;
  WeightOptions opt_;
  int row_width_ = 0;
  std::vector<double> table_;  // ny rows of row_width_ entries
  std::vector<double> tail0_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::string, std::shared_ptr<const TailTable>> tail_cache_;

  friend KernelWeights clone_for_load(BoxDomain, double, WeightOptions, std::vector<double>,
                                      std::vector<double>);

 public:
  KernelWeights() = default;
  KernelWeights(const KernelWeights& o);
  KernelWeights& operator=(const KernelWeights& o);
  KernelWeights(KernelWeights&& o) noexcept;
  KernelWeights& operator=(KernelWeights&& o) noexcept;
};

// Exact radial integral over { |z| >= alpha } of |z|^-(n+2s):
// surface(n) * alpha^(-2s) / (2s), surface(1) = 2, surface(2) = 2*pi.
double tail_integral(double alpha, double s, int dim);

// u(E,F) = sum over (i in E, j in F) of w_ij (u_i - u_j)^2; symmetric and
// additive over disjoint unions.
double interaction(const ScalarField& u, std::span<const int> E, std::span<const int> F,
                   const KernelWeights& w);

// L(A,D) = sum of pair weights over A x D; requires A, D disjoint.
double set_interaction(std::span<const int> A, std::span<const int> D,
                       const KernelWeights& w);

// K(u, region) = 1/2 u(region,region) + u(region, grid \ region) + tail part.
// Defaults to region = interior cells. Rejects profile exteriors without a
// registered evaluator.
double gagliardo(const ScalarField& u, const KernelWeights& w);
double gagliardo(const ScalarField& u, const KernelWeights& w, std::span<const int> region);

// Internals shared with the energy module: one fused pass per row.
struct KineticParts {
  double interior = 0;  // 1/2 u(R,R)
  double cross = 0;     // u(R, grid \ R)
  double tail = 0;      // against the exterior rule
};
KineticParts kinetic_parts(const ScalarField& u, const KernelWeights& w,
                           std::span<const int> region);

// High-accuracy quadrature of int_A int_B |x-y|^-(n+2s) over two axis-aligned
// boxes (exact in 1D, graded Gauss panels in 2D). Used for touching pairs
// when s < 1/2 and by verification code.
double box_pair_integral(int dim, const double* a_lo, const double* a_hi,
                         const double* b_lo, const double* b_hi, double s,
                         int grade_depth = 30);

// Tail machinery (implemented in tails.cpp).
std::vector<double> compute_tail_totals(const BoxDomain& d, double s,
                                        const WeightOptions& opt);
TailTable compute_tail_moments(const BoxDomain& d, double s, const WeightOptions& opt,
                               std::span<const double> tail0,
                               const ExteriorSpec& exterior);

}  // namespace fracphase
