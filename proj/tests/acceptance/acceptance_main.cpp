// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "rdae/acceptance.hpp"

int main(int argc, char** argv) {
  rdae::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) options.only.push_back(std::atoi(argv[i]));
  int failed = 0;
  rdae::run_acceptance(options, [&](const rdae::CriterionResult& r) {
    std::printf("%s\n", rdae::format_result(r).c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  });
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
