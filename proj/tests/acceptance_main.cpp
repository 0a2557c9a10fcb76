// Reproduction gate: runs every acceptance criterion at the default
// resolution and prints one pass/fail line per criterion.

#include <cstdio>

#include "aaw/verify.hpp"

int main() {
  aaw::IntegratorConfig cfg;  // 4000 steps per period
  const auto rows = aaw::run_acceptance_suite(cfg);

  int failed = 0;
  for (const auto& r : rows) {
    std::printf("%s  %2d  %-36s expected %s | got %s | tol %s\n",
                r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.expected.c_str(), r.got.c_str(), r.tolerance.c_str());
    if (!r.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(rows.size()) - failed,
              rows.size());
  return failed == 0 ? 0 : 1;
}
