// Acceptance suite: one line per criterion, exit 0 when every selected
// criterion passes, 2 otherwise. --only N runs a single criterion.

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "acceptance_criteria.hpp"

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  const auto& criteria = fracphase::acceptance::all_criteria();
  bool all_pass = true;
  for (const auto& crit : criteria) {
    if (only != 0 && crit.number != only) continue;
    fracphase::acceptance::Outcome out;
    try {
      out = crit.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] C%-2d %-34s %s\n", out.pass ? "PASS" : "FAIL", crit.number,
                crit.name.c_str(), out.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && out.pass;
  }
  return all_pass ? 0 : 2;
}
