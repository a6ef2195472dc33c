#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fracphase {

// Fixed-order block reduction. The result depends only on the order of the
// input values, never on thread count, so energies are reproducible.
double pairwise_sum(std::span<const double> values);

// Neumaier-compensated accumulator for sequential inner sums.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x);
  double value() const { return sum + comp; }
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Nodes/weights for n-point Gauss-Legendre on [a, b].
void gauss_legendre(int n, double a, double b,
                    std::vector<double>& nodes, std::vector<double>& weights);

// Runs fn(i) for i in [0, n). Parallelized when OpenMP is enabled; each index
// is handled exactly once so results are independent of the thread count.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < n; ++i) fn(i);
}

void set_thread_count(int threads);
int thread_count();

}  // namespace fracphase
