#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fracphase/harness.hpp"

namespace fracphase {

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Profile1D: return "profile1d";
    case Scenario::Gamma1D: return "gamma1d";
    case Scenario::Gamma2DHalfplane: return "gamma2d-halfplane";
    case Scenario::Gamma2DSquare: return "gamma2d-square";
    case Scenario::NonlocalBelowHalf: return "nonlocal-s-below-half";
    case Scenario::DensityCheck: return "density-check";
    case Scenario::EnergyBound: return "energy-bound";
  }
  return "?";
}

namespace {

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
  std::ostringstream os;
  os << path << ":" << line << ": " << msg;
  throw std::invalid_argument(os.str());
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& v, const std::string& path, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(path, line, "not a number: '" + item + "'");
    }
  }
  if (out.empty()) fail(path, line, "empty list");
  return out;
}

double parse_num(const std::string& v, const std::string& path, int line) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(path, line, "not a number: '" + v + "'");
  }
}

Scenario parse_scenario(const std::string& v, const std::string& path, int line) {
  for (Scenario sc : {Scenario::Profile1D, Scenario::Gamma1D, Scenario::Gamma2DHalfplane,
                      Scenario::Gamma2DSquare, Scenario::NonlocalBelowHalf,
                      Scenario::DensityCheck, Scenario::EnergyBound})
    if (scenario_name(sc) == v) return sc;
  fail(path, line, "unknown scenario '" + v + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("parse_config: cannot open " + path);
  ExperimentConfig cfg;
  bool have_scenario = false, have_s = false, have_regime = false;
  std::string regime_str;
  int s_line = 0;
  double s_value = 0.75;

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string text = raw;
    const auto hash = text.find('#');
    if (hash != std::string::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) fail(path, line, "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (value.empty()) fail(path, line, "missing value for '" + key + "'");

    if (key == "scenario") {
      cfg.scenario = parse_scenario(value, path, line);
      have_scenario = true;
    } else if (key == "s") {
      s_value = parse_num(value, path, line);
      s_line = line;
      have_s = true;
    } else if (key == "regime") {
      regime_str = value;
      have_regime = true;
      s_line = line;
    } else if (key == "eps_ladder") {
      cfg.eps_ladder = parse_list(value, path, line);
      for (std::size_t k = 1; k < cfg.eps_ladder.size(); ++k)
        if (!(cfg.eps_ladder[k] < cfg.eps_ladder[k - 1]))
          fail(path, line, "eps_ladder must be strictly decreasing");
      for (double e : cfg.eps_ladder)
        if (!(e > 0 && e < 1)) fail(path, line, "eps values must lie in (0,1)");
    } else if (key == "h_rule") {
      cfg.h_rule = parse_num(value, path, line);
      if (!(cfg.h_rule > 0 && cfg.h_rule <= 0.2))
        fail(path, line, "h_rule = " + value + ": layer under-resolved (need 0 < h_rule <= 0.2)");
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_num(value, path, line));
    } else if (key == "out") {
      cfg.output_dir = value;
    } else if (key == "refinement") {
      cfg.refinement = static_cast<int>(parse_num(value, path, line));
      if (cfg.refinement < 1) fail(path, line, "refinement must be >= 1");
    } else if (key == "collar_cells") {
      cfg.collar_cells = static_cast<int>(parse_num(value, path, line));
      if (cfg.collar_cells < 0) fail(path, line, "collar_cells must be >= 0");
    } else if (key == "max_iters") {
      cfg.max_iters = static_cast<int>(parse_num(value, path, line));
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(parse_num(value, path, line));
    } else if (key == "profile_prefix") {
      cfg.profile_prefix = value;
    } else if (key == "profile_L") {
      cfg.profile_L = parse_num(value, path, line);
    } else if (key == "profile_h") {
      cfg.profile_h = parse_num(value, path, line);
    } else if (key == "profile_dim") {
      cfg.profile_dim = static_cast<int>(parse_num(value, path, line));
      if (cfg.profile_dim != 0 && cfg.profile_dim != 1 && cfg.profile_dim != 2)
        fail(path, line, "profile_dim must be 1 or 2");
    } else if (key == "theta1") {
      cfg.theta1 = parse_num(value, path, line);
    } else if (key == "theta2") {
      cfg.theta2 = parse_num(value, path, line);
    } else if (key == "r_ladder") {
      cfg.r_ladder = parse_list(value, path, line);
    } else if (key == "density_eps") {
      cfg.density_eps = parse_num(value, path, line);
    } else if (key == "glue_delta") {
      cfg.glue_delta = parse_num(value, path, line);
    } else if (key == "glue_M") {
      cfg.glue_M = static_cast<int>(parse_num(value, path, line));
    } else if (key == "glue_D_halfwidth") {
      cfg.glue_D_halfwidth = parse_num(value, path, line);
    } else {
      fail(path, line, "unknown key '" + key + "'");
    }
  }

  if (!have_scenario) fail(path, 0, "missing required key 'scenario'");
  if (!have_s) fail(path, 0, "missing required key 's'");
  if (!(s_value > 0 && s_value < 1)) fail(path, s_line, "s must lie in (0,1)");
  if (have_regime) {
    SRegime r;
    if (regime_str == "below")
      r = SRegime::BelowHalf;
    else if (regime_str == "half")
      r = SRegime::Half;
    else if (regime_str == "above")
      r = SRegime::AboveHalf;
    else
      fail(path, s_line, "regime must be below, half or above");
    try {
      cfg.s = FracOrder(s_value, r);
    } catch (const std::exception& e) {
      fail(path, s_line, e.what());
    }
  } else {
    cfg.s = frac_order(s_value);
  }

  const bool needs_ladder = cfg.scenario == Scenario::Gamma1D ||
                            cfg.scenario == Scenario::Gamma2DHalfplane ||
                            cfg.scenario == Scenario::Gamma2DSquare ||
                            cfg.scenario == Scenario::NonlocalBelowHalf ||
                            cfg.scenario == Scenario::EnergyBound;
  if (needs_ladder && cfg.eps_ladder.empty())
    fail(path, 0, "scenario '" + scenario_name(cfg.scenario) + "' requires eps_ladder");
  if (cfg.scenario == Scenario::NonlocalBelowHalf && cfg.s.regime != SRegime::BelowHalf)
    fail(path, s_line, "nonlocal-s-below-half requires s < 1/2");
  return cfg;
}

}  // namespace fracphase
