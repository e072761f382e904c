#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace usdlo::validation {

struct CheckResult {
  std::string id;
  std::string description;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

enum class Profile {
  Quick, ///< analytics oracles, spot values and soundness at 10⁴ trials
  Full,  ///< every acceptance check at full scale
};

/// Run the oracle/invariant suite. Deterministic for a fixed seed.
std::vector<CheckResult> run_checks(Profile profile, std::uint64_t seed, int threads = 0);

bool all_passed(const std::vector<CheckResult> &results);

} // namespace usdlo::validation
