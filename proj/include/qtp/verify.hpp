#pragma once

// Self-check suite shared by the CLI's verify command and the test binary.
// Every check reports a measured deviation against its threshold; the suite
// is fully deterministic for a fixed seed, so reports are byte-stable.

#include <cstdint>
#include <string>
#include <vector>

#include "qtp/types.hpp"

namespace qtp::verify {

struct CheckResult {
  std::string name;
  int n = 0;
  double deviation = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct Options {
  int n_min = 2;
  int n_max = 4;
  std::uint64_t seed = 0;
  long twirl_samples = 20000;
  long mc_samples = 20000;
  int trials = 5;  // random instances per randomized check
  // Negative-control hook: flips the sign of the commutation phase, which
  // must break the commutation check for n >= 3.
  bool flip_omega_sign = false;
  ExecPolicy policy = ExecPolicy::Parallel;
};

std::vector<CheckResult> run_suite(const Options& opt);

bool all_pass(const std::vector<CheckResult>& results);

}  // namespace qtp::verify
