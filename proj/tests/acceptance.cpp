// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run all criteria
//   acceptance 3 7        run criteria 3 and 7 (numbers or names)

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "hardy/scenarios.hpp"

int main(int argc, char** argv) {
  using namespace hardy::scenarios;
  std::vector<std::string> keys(argv + 1, argv + argc);
  if (keys.empty())
    for (const auto& e : registry()) keys.push_back(std::to_string(e.id));
  int failed = 0;
  for (const auto& k : keys) {
    try {
      const Outcome o = run(k);
      std::printf("[%s] %2d %-22s %7.1fs  %s\n", o.passed() ? "PASS" : "FAIL", o.id, o.name.c_str(),
                  o.seconds, o.summary().c_str());
      failed += !o.passed();
    } catch (const std::exception& e) {
      std::printf("[FAIL] %s  error: %s\n", k.c_str(), e.what());
      ++failed;
    }
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
