#pragma once

#include <memory>
#include <span>
#include <vector>

#include "fracphase/grid.hpp"
#include "fracphase/kernel.hpp"
#include "fracphase/potential.hpp"

namespace fracphase {

// s is carried together with its regime tag so that the s = 1/2 normalization
// is never decided by floating-point comparison alone.
enum class SRegime { BelowHalf, Half, AboveHalf };

struct FracOrder {
  double s = 0.5;
  SRegime regime = SRegime::Half;
  FracOrder() = default;
  FracOrder(double s_, SRegime r);  // throws if the tag contradicts the value
};
// Infers the tag from exact comparison with 0.5.
FracOrder frac_order(double s);

// eps^{2s} for s < 1/2, eps*|log eps| for s = 1/2, eps for s > 1/2;
// F_eps = J_eps / scaling_factor. Requires 0 < eps < 1.
double scaling_factor(double eps, const FracOrder& s);

struct EnergyBreakdown {
  double interior_seminorm = 0;     // 1/2 u(R,R)
  double exterior_interaction = 0;  // u(R, CR) including the analytic tail
  double potential = 0;             // int_R W(u)
  double eps = 0;
  double s = 0;
  SRegime regime = SRegime::Half;
  double j_eps = 0;
  double f_eps = 0;
  double i_eps = 0;
  bool i_is_f_convention = false;  // s < 1/2: I_eps is defined as F_eps
};

// J_eps = eps^{2s} K(u, region) + int_region W(u); F and I per regime.
// Region defaults to the interior. Throws on grid mismatch or a profile
// exterior without evaluator.
EnergyBreakdown total_energy(const ScalarField& u, const KernelWeights& w,
                             const PotentialSpec& p, double eps, const FracOrder& s);
EnergyBreakdown total_energy(const ScalarField& u, const KernelWeights& w,
                             const PotentialSpec& p, double eps, const FracOrder& s,
                             std::span<const int> region);

// dJ_eps/du_i over interior cells (zero on the collar); matches central
// differences of total_energy.
std::vector<double> energy_gradient(const ScalarField& u, const KernelWeights& w,
                                    const PotentialSpec& p, double eps, const FracOrder& s);

struct SubadditivityReport {
  double f_first = 0, f_second = 0, f_union = 0;
  double i_first = 0, i_second = 0, i_union = 0;
  bool f_subadditive = false;   // F(u, E u F) <= F(u,E) + F(u,F)
  bool i_superadditive = false; // I(u, E u F) >= I(u,E) + I(u,F)
  bool pass() const { return f_subadditive && i_superadditive; }
};
SubadditivityReport subadditivity_check(const ScalarField& u, const KernelWeights& w,
                                        const PotentialSpec& p, double eps,
                                        const FracOrder& s, std::span<const int> E,
                                        std::span<const int> F);

void append_breakdown_csv(const std::string& path, double h, const EnergyBreakdown& b,
                          bool write_header);

// Fused evaluator for the optimizer: one pass per row for energy (and
// gradient), fixed-order accumulation, reusable tail moments.
class EnergyEvaluator {
 public:
  EnergyEvaluator(const ScalarField& prototype, const KernelWeights& w,
                  const PotentialSpec& p, double eps, const FracOrder& s);
  double j_energy(std::span<const double> values) const;
  // Returns J and fills grad (indexed like values; zero outside the interior).
  double j_and_gradient(std::span<const double> values, std::span<double> grad) const;
  double f_of_j(double j) const;
  const std::vector<int>& interior() const { return interior_; }

 private:
  const KernelWeights& w_;
  const PotentialSpec& p_;
  BoxDomain domain_;
  double eps_;
  FracOrder s_;
  double eps2s_;
  double scaling_;
  double hn_;
  std::vector<int> interior_;
  std::vector<double> mult_;  // 0.5 interior, 1.0 collar
  std::shared_ptr<const TailTable> tails_;
};

}  // namespace fracphase
