#pragma once

#include <functional>
#include <string>

namespace fracphase {

// Double-well potential with evaluators for W, W', W''.
struct PotentialSpec {
  std::function<double(double)> value;
  std::function<double(double)> first_derivative;
  std::function<double(double)> second_derivative;
  std::string name;
};

// W(u) = 1/4 (1 - u^2)^2. Vanishes exactly (in floating point too) at +/-1.
PotentialSpec quartic_double_well();

struct PotentialReport {
  bool zero_at_plus_one = false;
  bool zero_at_minus_one = false;
  bool positive_inside = false;   // sampled on 2001 interior points
  bool flat_at_walls = false;     // W'(+/-1) = 0
  bool convex_at_walls = false;   // W''(+/-1) > 0
  bool pass() const {
    return zero_at_plus_one && zero_at_minus_one && positive_inside && flat_at_walls &&
           convex_at_walls;
  }
};
PotentialReport validate_potential(const PotentialSpec& p);

}  // namespace fracphase
