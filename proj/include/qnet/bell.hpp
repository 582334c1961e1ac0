#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "qnet/algebra.hpp"
#include "qnet/network.hpp"
#include "qnet/state.hpp"

namespace qnet {

inline constexpr double kTsirelson = 2.8284271247461903;  // 2 sqrt(2)
inline constexpr double kViolationSlack = 1e-9;
inline constexpr double kMaximalSlack = 1e-8;

struct Tolerances {
  double algebraic = kDefaultAlgebraicTol;
  double classification = kDefaultAlgebraicTol;
  double faithfulness = kDefaultFaithfulThreshold;
  double bell = 1e-9;
};

/// Per-party observable pair: index 0 is input x = 0, index 1 is x = 1.
using ObservablePair = std::array<Matrix, 2>;

struct Scenario {
  NetworkTopology topology;
  std::shared_ptr<const SubsystemLayout> layout;
  NetworkState state;
  std::vector<ObservablePair> observables;  // one pair per party
  std::optional<PartySet> independent_set;
  ObservableClass observable_class = ObservableClass::Dichotomic;
  Tolerances tol;
};

/// Checks the scenario invariants: an observable pair for every party with
/// the party's local dimension, each passing classification at the
/// configured class, and (when present) a valid independent set of size >= 2.
void validate_scenario(const Scenario& scenario);

/// Assembles topology, layout and product state, then validates.
Scenario make_scenario(const NetworkTopology& topology, std::vector<SourceState> sources,
                       std::vector<ObservablePair> observables,
                       std::optional<PartySet> independent_set = std::nullopt,
                       Tolerances tol = {});

/// Identity observables for every party of the layout.
std::vector<ObservablePair> identity_observables(const SubsystemLayout& layout);

struct BellReport {
  double I = 0.0;
  double J = 0.0;
  double S = 0.0;
  int h = 0;
  PartySet independent_set;
  bool classical_bound_satisfied = true;
  bool tsirelson_satisfied = true;
  bool violation = false;
  bool maximal = false;
};

/// |x|^(1/h), with the root at 0 defined as 0.
double root_abs(double x, int h);
BellReport make_bell_report(double I, double J, const PartySet& set, double tol = 1e-9);

struct BellTerms {
  double I = 0.0;
  double J = 0.0;
};

/// I and J for explicit observables, applying each party's factor in turn to
/// the ensemble vectors.
BellTerms bell_terms(const NetworkState& state, const std::vector<ObservablePair>& observables,
                     const PartySet& independent_set);

/// S for the scenario's independent set, or, when none is fixed, the maximum
/// over every set of the largest independence size (ties go to the
/// lexicographically first set).
BellReport evaluate_S(const Scenario& scenario);
BellReport evaluate_S(const Scenario& scenario, const PartySet& independent_set);

/// The independent sets evaluate_S ranges over when none is fixed; throws
/// NoIndependentSet when h_max < 2.
std::vector<PartySet> default_independent_sets(const NetworkTopology& topology);

/// Probabilities p(a|x) indexed by a = sum_i a_i 2^(m-1-i) (party 0 is the
/// most significant bit).
std::vector<double> correlation(const Scenario& scenario, const std::vector<int>& inputs);

/// Linear environments of one party: with every other party fixed,
/// I = Re Tr(F_I k_i) and J = Re Tr(F_J k_j), where F_I = A0 + A1 and
/// F_J = A0 - A1 for an independent party and F_I = A0, F_J = A1 otherwise.
struct PartyEnvironment {
  Matrix k_i;
  Matrix k_j;
  bool independent = false;
};

PartyEnvironment party_environment(const NetworkState& state,
                                   const std::vector<ObservablePair>& observables,
                                   const PartySet& independent_set, int party);

BellTerms terms_from_environment(const PartyEnvironment& env, const Matrix& a0, const Matrix& a1);

struct PartyCertificate {
  int party = 0;
  double r_sq0 = 0.0;
  double r_sq1 = 0.0;
  double r_anti = 0.0;
  int algebra_dim = 0;
  bool m2_structure = false;
  // Operator-level residuals, reported only for faithful states.
  std::optional<double> op_sq0;
  std::optional<double> op_sq1;
  std::optional<double> op_anti;
};

struct CertificateReport {
  PartySet independent_set;
  std::vector<PartyCertificate> parties;
  double r_comp0 = 0.0;
  double r_comp1 = 0.0;
  double min_eigenvalue = 0.0;
  bool faithful = false;
  int probes = 0;
  double tol = 0.0;
  bool pass = false;

  double max_residual() const;
};

inline constexpr int kDefaultProbes = 64;

/// Maximal-violation conditions evaluated against a probe set of the
/// identity plus `probes` seeded random local observables.
CertificateReport max_violation_certificate(const Scenario& scenario, int probes,
                                            std::uint64_t seed, double tol);
CertificateReport max_violation_certificate(const Scenario& scenario, const PartySet& set,
                                            int probes, std::uint64_t seed, double tol);

struct AbelianEffects {
  Matrix pp, pm, mp, mm;  // a_{eps0 eps1}, eps in {+, -}

  /// max of: PSD violation, ||a0 + a1 - 2(pp - mm)||, ||a0 - a1 - 2(pm - mp)||,
  /// ||sum - I||.
  double identity_residual(const Matrix& a0, const Matrix& a1) const;
};

/// Four positive effects a_{e0 e1} = (1 + e0 a0)(1 + e1 a1) / 4 of a
/// commuting pair of contractions. Throws NotCommuting.
AbelianEffects abelian_effects(const Matrix& a0, const Matrix& a1, double tol);

struct SineCheck {
  double lhs = 0.0;  // (prod sin theta_i)^(1/h)
  double rhs = 0.0;  // sin(mean theta)
};

/// Geometric mean of sines against the sine of the mean. Throws
/// ThetaOutOfRange for angles outside (0, pi) or fewer than two angles.
SineCheck geo_mean_sine_check(const std::vector<double>& thetas);

}  // namespace qnet
