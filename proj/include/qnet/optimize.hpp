#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "qnet/bell.hpp"

namespace qnet {

enum class Constraint { None, AbelianPairs, FixedState };

const char* to_string(Constraint c);

struct OptimizeConfig {
  int restarts = 32;
  int max_iterations = 500;  // see-saw sweeps per restart
  double tolerance = 1e-8;   // stop when a sweep gains less than this
  std::uint64_t seed = 0;
  ObservableClass observable_class = ObservableClass::Dichotomic;
  Constraint constraint = Constraint::None;
  double fd_step = 1e-5;
  /// party index -> (n_plus, n_minus); parties not listed use a balanced split.
  std::map<int, std::pair<int, int>> signatures;
};

using ParamsPair = std::array<ObservableParams, 2>;

struct RestartSummary {
  double S = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct OptimizationResult {
  double S = 0.0;
  double I = 0.0;
  double J = 0.0;
  PartySet independent_set;
  std::vector<ParamsPair> params;  // per party, per input
  /// -1 when the identity strategy (S = 2 for every state) is the best.
  int best_restart = -1;
  std::vector<RestartSummary> restarts;
  bool converged = false;
  int total_iterations = 0;
  /// Largest S seen at any evaluation, including finite-difference probes.
  double max_observed_S = 0.0;
  /// Largest drop of S across a single coordinate step (0 when monotone).
  double worst_step_decrease = 0.0;
  /// Best S over the random restarts alone.
  double best_search_S = 0.0;
  /// Over restart endpoints: min over independent parties of ||{A0, A1}||.
  double min_independent_anticommutator = 0.0;

  std::vector<ObservablePair> observables() const;
};

/// Multi-start see-saw maximisation of S over the observables of every party
/// with the state held fixed. Uses the scenario's independent set, or every
/// set of the largest independence size when none is fixed.
OptimizationResult optimize_S(const Scenario& scenario, const OptimizeConfig& config);

std::vector<ObservablePair> observables_from_params(const std::vector<ParamsPair>& params);

/// Singlet sources with observables reaching S = 2 sqrt(2): independent
/// parties measure (Z_i +/- X_i)/sqrt2 with Z_i = Z on all their sites and
/// X_i = X on their first site and Z elsewhere; every other party measures, on
/// each site, what its source partner needs (Z/X toward a first site of an
/// independent party or toward another dependent party, Z/Z otherwise).
Scenario canonical_optimal_scenario(const NetworkTopology& topology, const PartySet& set);

struct SweepPoint {
  double delta = 0.0;
  double S = 0.0;
  double max_residual = 0.0;
  double r_anti = 0.0;
};

/// Rotates A_{i,1} of independent party `party` (the first independent party
/// when negative) by delta inside the plane spanned with A_{i,0}, recording S
/// and certificate residuals.
std::vector<SweepPoint> perturbation_sweep(const Scenario& canonical,
                                           const std::vector<double>& deltas, int party = -1,
                                           int probes = kDefaultProbes, std::uint64_t seed = 0);

struct OddDimensionGap {
  int dim = 0;
  double best_S = 0.0;
  double gap = 0.0;  // 2 sqrt(2) - best_S
  double residual_floor = 0.0;
  double min_eigenvalue = 0.0;
  OptimizationResult result;
};

/// optimize_S on a scenario whose sites all have the same odd dimension and
/// whose state is faithful. Throws EvenDimension / ValidationError.
OddDimensionGap odd_dimension_gap(const Scenario& scenario, const OptimizeConfig& config);

struct AnticommutatorFloor {
  double min_norm = 0.0;
  int samples = 0;
};

/// min ||{A, B}|| over random dichotomic pairs in dimension d, each with a
/// uniformly drawn signature.
AnticommutatorFloor anticommutator_floor(int dim, int samples, std::uint64_t seed);

}  // namespace qnet
