#include "fracphase/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "fracphase/util.hpp"

namespace fracphase {

namespace {

double clamp1(double v) { return v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v); }

// Sup norm of the projected gradient over the free cells: components pushing
// outside the box at an active bound do not count.
double projected_grad_norm(std::span<const double> u, std::span<const double> g,
                           std::span<const int> free) {
  double worst = 0.0;
  for (int c : free) {
    double r = g[c];
    if (u[c] >= 1.0 && r < 0.0) r = 0.0;
    if (u[c] <= -1.0 && r > 0.0) r = 0.0;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

// Conservative Lipschitz estimate of the gradient: 2 eps^2s (max kernel row
// sum + max tail) + h^n max W'' on [-1,1].
double lipschitz_estimate(const KernelWeights& w, const PotentialSpec& p, double eps,
                          const FracOrder& s, std::span<const int> free) {
  const auto& d = w.domain();
  const int nx = d.nx(), ny = d.ny();
  double max_row = 0.0;
  std::vector<double> rows(free.size());
  parallel_for(static_cast<int>(free.size()), [&](int ridx) {
    const auto ci = d.coord(free[ridx]);
    double acc = 0.0;
    for (int jy = 0; jy < ny; ++jy) {
      const double* wrow = w.offset_row(std::abs(ci[1] - jy)) + (nx - 1 - ci[0]);
      for (int jx = 0; jx < nx; ++jx) acc += wrow[jx];
    }
    rows[ridx] = acc + w.tail_total(free[ridx]);
  });
  for (double r : rows) max_row = std::max(max_row, r);
  double max_wpp = 0.0;
  for (int i = 0; i <= 200; ++i)
    max_wpp = std::max(max_wpp, std::abs(p.second_derivative(-1.0 + i / 100.0)));
  return 2.0 * std::pow(eps, 2.0 * s.s) * max_row + d.cell_measure() * max_wpp;
}

}  // namespace

ScalarField initial_field(const BoxDomain& d, const ExteriorSpec& exterior,
                          MinimizeConfig::Init init, std::uint64_t seed) {
  ScalarField u;
  u.domain = d;
  u.values.resize(d.cell_count());
  u.exterior = exterior;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int c = 0; c < d.cell_count(); ++c) {
    const auto x = d.center(c);
    const double ext = exterior.value_at(x.data(), d.dim());
    if (!d.is_interior(c)) {
      u.values[c] = ext;
      continue;
    }
    switch (init) {
      case MinimizeConfig::Init::ExteriorExtension:
        u.values[c] = ext;
        break;
      case MinimizeConfig::Init::SharpInterface:
        u.values[c] = ext >= 0.0 ? 1.0 : -1.0;
        break;
      case MinimizeConfig::Init::RandomSeeded:
        u.values[c] = dist(rng);
        break;
    }
  }
  return u;
}

MinimizeResult minimize(const ScalarField& u0, const MinimizeConfig& cfg,
                        const KernelWeights& w, const PotentialSpec& p, double eps,
                        const FracOrder& s) {
  u0.validate();
  const auto& d = u0.domain;
  std::vector<int> free = cfg.free_region.empty() ? d.interior_cells() : cfg.free_region;
  for (int c : free)
    if (!d.is_interior(c))
      throw std::invalid_argument("minimize: free_region must lie inside the interior");
  const double grad_tol = cfg.grad_tol > 0 ? cfg.grad_tol : 1e-8 * d.cell_measure();

  EnergyEvaluator ev(u0, w, p, eps, s);
  MinimizeResult res;
  res.field = u0;
  res.free_region = free;

  std::vector<double> u = u0.values;
  std::vector<double> grad(u.size(), 0.0);
  double J = ev.j_and_gradient(u, grad);
  if (!std::isfinite(J))
    throw std::invalid_argument("minimize: non-finite energy at the initial field");
  res.energy_trace.push_back(ev.f_of_j(J));
  double gnorm = projected_grad_norm(u, grad, free);
  res.grad_trace.push_back(gnorm);

  const double lip = lipschitz_estimate(w, p, eps, s, free);
  const double eta0 = lip > 0 ? 1.0 / lip : 1.0;
  double eta_next = cfg.step_rule == MinimizeConfig::StepRule::Fixed && cfg.fixed_step > 0
                        ? cfg.fixed_step
                        : eta0;

  std::vector<double> trial(u.size());
  std::vector<double> u_prev, g_prev;
  int stall = 0;
  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    if (gnorm <= grad_tol) {
      res.converged = true;
      break;
    }
    double eta = eta_next;
    bool accepted = false;
    double Jc = J;
    for (int bt = 0; bt < 60; ++bt) {
      trial = u;
      for (int c : free) trial[c] = clamp1(u[c] - eta * grad[c]);
      Jc = ev.j_energy(trial);
      if (Jc < J) {
        accepted = true;
        break;
      }
      if (cfg.step_rule == MinimizeConfig::StepRule::Fixed) break;
      eta *= 0.5;
    }
    if (!accepted) {
      // No decreasing step exists at any scale: numerically stationary.
      res.converged = true;
      break;
    }

    u_prev = u;
    g_prev = grad;
    u.swap(trial);
    J = ev.j_and_gradient(u, grad);
    gnorm = projected_grad_norm(u, grad, free);
    res.energy_trace.push_back(ev.f_of_j(J));
    res.grad_trace.push_back(gnorm);

    if (cfg.step_rule == MinimizeConfig::StepRule::Backtracking) {
      // Barzilai-Borwein proposal for the next step, backtracking-safeguarded.
      double sy = 0.0, ss = 0.0;
      for (int c : free) {
        const double du = u[c] - u_prev[c];
        ss += du * du;
        sy += du * (grad[c] - g_prev[c]);
      }
      eta_next = sy > 0 ? std::min(std::max(ss / sy, 1e-4 * eta0), 1e6 * eta0) : 2.0 * eta;
    }

    const double drop = res.energy_trace[res.energy_trace.size() - 2] - res.energy_trace.back();
    if (cfg.stall_rel_tol > 0 &&
        drop <= cfg.stall_rel_tol * (1.0 + std::abs(res.energy_trace.back())))
      ++stall;
    else
      stall = 0;
    if (cfg.stall_window > 0 && stall >= cfg.stall_window) {
      // Energy plateau at machine scale: practically stationary.
      res.converged = true;
      ++iter;
      break;
    }
  }
  if (gnorm <= grad_tol) res.converged = true;

  res.iterations = iter;
  res.final_grad_norm = gnorm;
  res.field.values = std::move(u);
  res.final_energy = total_energy(res.field, w, p, eps, s);
  return res;
}

MinimalityReport local_minimality_check(const MinimizeResult& r, int trials,
                                        double amplitude, const KernelWeights& w,
                                        const PotentialSpec& p, double eps,
                                        const FracOrder& s, std::uint64_t seed) {
  EnergyEvaluator ev(r.field, w, p, eps, s);
  const double J0 = ev.j_energy(r.field.values);
  const double F0 = ev.f_of_j(J0);
  const double tol = 1e-9 * (1.0 + std::abs(F0));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  MinimalityReport rep;
  rep.trials = trials;
  std::vector<double> v;
  for (int t = 0; t < trials; ++t) {
    v = r.field.values;
    for (int c : r.free_region) {
      const double noise = amplitude * dist(rng);
      v[c] = std::clamp(v[c] + noise, -1.0, 1.0);
    }
    const double F = ev.f_of_j(ev.j_energy(v));
    if (F < F0 - tol) {
      ++rep.failures;
      rep.worst_decrease = std::max(rep.worst_decrease, F0 - F);
    }
  }
  return rep;
}

void write_trace_csv(const std::string& path, const MinimizeResult& r, double eps,
                     const FracOrder& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  out << "iter,J,F,grad_norm\n";
  const double scale = scaling_factor(eps, s);
  char line[160];
  for (std::size_t i = 0; i < r.energy_trace.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", i,
                  r.energy_trace[i] * scale, r.energy_trace[i], r.grad_trace[i]);
    out << line;
  }
}

}  // namespace fracphase
