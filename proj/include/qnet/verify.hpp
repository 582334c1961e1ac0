#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qnet {

struct SuiteResult {
  std::string name;
  int trials = 0;
  int passed = 0;
  /// Worst case of the checked quantity: the largest excess over the bound
  /// (negative when every trial stays inside it), or for odd-dim the
  /// smallest anticommutator norm.
  double worst_residual = 0.0;
  double tolerance = 0.0;
  std::string bound;
  bool pass = false;
};

struct VerifyReport {
  std::string suite;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<SuiteResult> suites;
  bool pass = false;
};

/// Random chain(3), chain(5) and 3-leaf star scenarios with random product
/// sources and random dichotomic observables: S <= 2 sqrt(2).
SuiteResult verify_tsirelson(int trials, std::uint64_t seed);
/// Commuting pairs at every independent party, arbitrary sources: S <= 2.
SuiteResult verify_abelian(int trials, std::uint64_t seed);
/// Separable-mixture sources, random observables: S <= 2.
SuiteResult verify_separable(int trials, std::uint64_t seed);
/// Two random network states at fixed observables:
/// |S_rho - S_sigma| <= 4 ||rho - sigma||_1^(1/h).
SuiteResult verify_continuity(int trials, std::uint64_t seed);
/// (prod sin theta_i)^(1/h) <= sin(mean theta) for h in {2, 3, 4}.
SuiteResult verify_trig(int trials, std::uint64_t seed);
/// Random d = 3 dichotomic pairs never anticommute.
SuiteResult verify_odd_dim(int trials, std::uint64_t seed);

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"tsirelson", "abelian", "separable",
                                              "continuity", "trig", "odd-dim"};
  return names;
}

/// Runs one suite by name, or every suite for "all". Throws ValidationError
/// for unknown names or trials < 1.
VerifyReport run_verify(const std::string& suite, int trials, std::uint64_t seed);

}  // namespace qnet
