// One line per acceptance criterion; exit status is nonzero if any fails.
#include <cstdio>

#include "chemostokes/acceptance.hpp"

int main() {
  const auto results = chemostokes::run_acceptance();
  int failed = 0;
  for (const auto& r : results) {
    std::printf("criterion %d %-26s %s  %8.2fs  %s\n", r.id, r.name.c_str(), r.pass ? "PASS" : "FAIL",
                r.seconds, r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
  return failed == 0 ? 0 : 1;
}
