// Acceptance suite runner: one pass/fail line per criterion.
// Usage: acceptance_tests [--criterion N] [--threads N]

#include <cstdio>
#include <cstring>
#include <thread>

#include "gpelab/acceptance.hpp"

int main(int argc, char** argv) {
  int only = 0;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency() / 2));
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) only = std::atoi(argv[++i]);
    if (!std::strcmp(argv[i], "--threads") && i + 1 < argc) threads = std::atoi(argv[++i]);
  }

  bool all = true;
  for (const auto& r : gpelab::run_acceptance(only, threads)) {
    std::printf("%s criterion %2d: %s (%.1fs) %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.runtime_s, r.detail.c_str());
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
