// Acceptance gate: runs every verification check at its pinned tolerance and
// prints one line per criterion. Exits nonzero if any check fails.
#include <cstdio>
#include <exception>

#include "credence/verify.hpp"

int main() {
  credence::VerifyConfig cfg;
  cfg.seed = 1;
  int failures = 0;
  try {
    const auto results = credence::verify_suite(cfg);
    int idx = 0;
    for (const auto& res : results) {
      ++idx;
      std::printf("%s criterion %d %s (checks=%lld, max_violation=%.6g, %.2fs)%s%s\n",
                  res.pass ? "PASS" : "FAIL", idx, res.name.c_str(),
                  static_cast<long long>(res.checks_run), res.max_violation,
                  res.seconds, res.detail.empty() ? "" : " ",
                  res.detail.c_str());
      if (!res.pass) ++failures;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance run aborted: %s\n", e.what());
    return 2;
  }
  if (failures > 0) {
    std::printf("ACCEPTANCE: %d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("ACCEPTANCE: all criteria passed\n");
  return 0;
}
