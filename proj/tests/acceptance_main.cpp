// Runs the acceptance suite; exits nonzero if any criterion fails.
#include <cstdio>
#include <cstring>

#include "spectral_cantor/acceptance.hpp"

int main(int argc, char** argv) {
  spectral_cantor::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) options.quick = true;
  }
  int failed = 0;
  for (int id = 1; id <= 13; ++id) {
    const auto r = spectral_cantor::run_criterion(id, options);
    std::printf("[%s] %2d %-42s %8.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
    failed += r.pass ? 0 : 1;
  }
  std::printf("%d/13 criteria passed\n", 13 - failed);
  return failed == 0 ? 0 : 1;
}
