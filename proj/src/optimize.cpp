#include "qnet/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "qnet/error.hpp"
#include "qnet/random.hpp"

namespace qnet {

const char* to_string(Constraint c) {
  switch (c) {
    case Constraint::None: return "none";
    case Constraint::AbelianPairs: return "abelian_pairs";
    case Constraint::FixedState: return "fixed_state";
  }
  return "none";
}

std::vector<ObservablePair> observables_from_params(const std::vector<ParamsPair>& params) {
  std::vector<ObservablePair> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back({observable_from_params(p[0]), observable_from_params(p[1])});
  return out;
}

std::vector<ObservablePair> OptimizationResult::observables() const {
  return observables_from_params(params);
}

namespace {

constexpr int kInnerSteps = 25;
constexpr double kInitialStep = 0.1;
constexpr double kMinStep = 1e-10;
// Patterns are enumerated exhaustively up to this local dimension.
constexpr int kMaxEnumeratedDim = 8;

/// Search state of one observable: A = U diag(spectrum) U^dagger.
struct ObsState {
  Matrix u;
  RealVector spectrum;      // +/-1 entries or cos(angles)
  RealVector angles;        // contraction only
  bool contraction = false;

  Matrix op() const {
    Matrix a = u * spectrum.cast<Complex>().asDiagonal() * u.adjoint();
    return 0.5 * (a + a.adjoint());
  }
};

struct Tracker {
  double max_observed = -std::numeric_limits<double>::infinity();
  double worst_decrease = 0.0;
  void observe(double s) { max_observed = std::max(max_observed, s); }
};

/// Local objective of one party with everybody else frozen.
class LocalProblem {
 public:
  LocalProblem(PartyEnvironment env, int h, Tracker& tracker)
      : env_(std::move(env)), h_(h), tracker_(tracker) {}

  double value(const Matrix& a0, const Matrix& a1) const {
    const auto t = terms_from_environment(env_, a0, a1);
    const double s = root_abs(t.I, h_) + root_abs(t.J, h_);
    tracker_.observe(s);
    return s;
  }

 private:
  PartyEnvironment env_;
  int h_;
  Tracker& tracker_;
};

Matrix rotation(const std::vector<Matrix>& basis, const RealVector& coeffs, double scale) {
  Matrix h = Matrix::Zero(basis[0].rows(), basis[0].cols());
  for (std::size_t k = 0; k < basis.size(); ++k)
    if (coeffs[k] != 0.0) h += (scale * coeffs[k]) * basis[k];
  return unitary_exp(h);
}

class SeeSaw {
 public:
  SeeSaw(const Scenario& scenario, const PartySet& set, const OptimizeConfig& config,
         Tracker& tracker)
      : scenario_(scenario), set_(set), config_(config), tracker_(tracker) {
    const auto& layout = *scenario.layout;
    for (int p = 0; p < layout.party_count(); ++p) {
      const int d = static_cast<int>(layout.local_dim(p));
      dims_.push_back(d);
      if (bases_.count(d) == 0) bases_[d] = hermitian_basis(d);
    }
  }

  /// One random restart: returns the final S.
  RestartSummary run(Rng& rng, std::vector<std::array<ObsState, 2>>& states) {
    states = random_start(rng);
    double current = full_value(states);
    RestartSummary summary;
    for (int it = 0; it < config_.max_iterations; ++it) {
      const double before = current;
      for (int p = 0; p < static_cast<int>(dims_.size()); ++p) {
        LocalProblem local(party_environment(scenario_.state, observables(states), set_, p),
                           static_cast<int>(set_.size()), tracker_);
        for (int x = 0; x < 2; ++x) {
          const double start = local.value(states[p][0].op(), states[p][1].op());
          const double end = config_.constraint == Constraint::AbelianPairs
                                 ? abelian_step(local, states[p], x)
                                 : free_step(local, states[p], x);
          tracker_.worst_decrease = std::max(tracker_.worst_decrease, start - end);
          current = end;
        }
      }
      summary.iterations = it + 1;
      if (current - before < config_.tolerance) {
        summary.converged = true;
        break;
      }
    }
    summary.S = full_value(states);
    return summary;
  }

  std::vector<ObservablePair> observables(const std::vector<std::array<ObsState, 2>>& states) const {
    std::vector<ObservablePair> out;
    for (const auto& s : states) out.push_back({s[0].op(), s[1].op()});
    return out;
  }

 private:
  double full_value(const std::vector<std::array<ObsState, 2>>& states) const {
    const auto t = bell_terms(scenario_.state, observables(states), set_);
    const double s = root_abs(t.I, static_cast<int>(set_.size())) +
                     root_abs(t.J, static_cast<int>(set_.size()));
    tracker_.observe(s);
    return s;
  }

  std::pair<int, int> signature(int party) const {
    auto it = config_.signatures.find(party);
    if (it != config_.signatures.end()) return it->second;
    const int d = dims_[party];
    return {(d + 1) / 2, d / 2};
  }

  std::vector<std::array<ObsState, 2>> random_start(Rng& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, M_PI);
    std::bernoulli_distribution coin(0.5);
    std::vector<std::array<ObsState, 2>> states;
    const bool contraction = config_.observable_class == ObservableClass::Contraction;
    for (int p = 0; p < static_cast<int>(dims_.size()); ++p) {
      const int d = dims_[p];
      std::array<ObsState, 2> pair;
      Matrix shared;
      if (config_.constraint == Constraint::AbelianPairs)
        shared = unitary_exp(generator_from_theta(d, random_theta(d, rng)));
      for (int x = 0; x < 2; ++x) {
        ObsState& s = pair[x];
        s.contraction = contraction;
        s.u = config_.constraint == Constraint::AbelianPairs
                  ? shared
                  : unitary_exp(generator_from_theta(d, random_theta(d, rng)));
        s.spectrum.resize(d);
        if (contraction) {
          s.angles.resize(d);
          for (int k = 0; k < d; ++k) s.angles[k] = angle(rng);
          s.spectrum = s.angles.array().cos();
        } else if (config_.constraint == Constraint::AbelianPairs) {
          for (int k = 0; k < d; ++k) s.spectrum[k] = coin(rng) ? 1.0 : -1.0;
        } else {
          const auto [plus, minus] = signature(p);
          if (plus + minus != d)
            throw Error(ErrorCode::ValidationError, "signature does not sum to party dimension");
          for (int k = 0; k < d; ++k) s.spectrum[k] = k < plus ? 1.0 : -1.0;
        }
      }
      states.push_back(std::move(pair));
    }
    return states;
  }

  static std::vector<double> random_theta(int d, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> theta(static_cast<std::size_t>(d) * d);
    for (auto& t : theta) t = normal(rng);
    return theta;
  }

  /// Gradient ascent on one observable in local rotation coordinates
  /// (plus eigenvalue angles for contractions).
  double free_step(const LocalProblem& local, std::array<ObsState, 2>& pair, int x) {
    ObsState& target = pair[x];
    const Matrix other = pair[1 - x].op();
    const auto& basis = bases_.at(static_cast<int>(target.u.rows()));
    const int n_rot = static_cast<int>(basis.size());
    const int n_ang = target.contraction ? static_cast<int>(target.angles.size()) : 0;
    const double eps = config_.fd_step;

    auto evaluate = [&](const ObsState& s) {
      const Matrix a = s.op();
      return x == 0 ? local.value(a, other) : local.value(other, a);
    };
    auto moved = [&](const ObsState& s, const RealVector& dir, double t) {
      ObsState out = s;
      out.u = rotation(basis, dir.head(n_rot), t) * s.u;
      if (n_ang > 0) {
        out.angles = s.angles + t * dir.tail(n_ang);
        out.spectrum = out.angles.array().cos();
      }
      return out;
    };

    double value = evaluate(target);
    double step = kInitialStep;
    for (int it = 0; it < kInnerSteps; ++it) {
      RealVector grad(n_rot + n_ang);
      RealVector unit = RealVector::Zero(n_rot + n_ang);
      for (int k = 0; k < n_rot + n_ang; ++k) {
        unit.setZero();
        unit[k] = 1.0;
        grad[k] = (evaluate(moved(target, unit, eps)) - evaluate(moved(target, unit, -eps))) /
                  (2.0 * eps);
      }
      const double norm = grad.norm();
      if (!(norm > 1e-12)) break;
      const RealVector dir = grad / norm;
      bool accepted = false;
      while (step >= kMinStep) {
        ObsState candidate = moved(target, dir, step);
        const double v = evaluate(candidate);
        if (v > value) {
          target = std::move(candidate);
          value = v;
          accepted = true;
          step = std::min(1.0, 2.0 * step);
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    return value;
  }

  /// Shared-eigenbasis step: best +/-1 pattern (or angles) for input x, then
  /// gradient ascent on the common unitary.
  double abelian_step(const LocalProblem& local, std::array<ObsState, 2>& pair, int x) {
    const int d = static_cast<int>(pair[0].u.rows());
    auto evaluate = [&](const std::array<ObsState, 2>& s) { return local.value(s[0].op(), s[1].op()); };
    double value = evaluate(pair);

    if (!pair[x].contraction) {
      if (d <= kMaxEnumeratedDim) {
        std::array<ObsState, 2> trial = pair;
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
          for (int k = 0; k < d; ++k) trial[x].spectrum[k] = (mask >> k) & 1u ? -1.0 : 1.0;
          const double v = evaluate(trial);
          if (v > value) {
            value = v;
            pair[x].spectrum = trial[x].spectrum;
          }
        }
      } else {
        bool improved = true;
        while (improved) {
          improved = false;
          for (int k = 0; k < d; ++k) {
            std::array<ObsState, 2> trial = pair;
            trial[x].spectrum[k] = -trial[x].spectrum[k];
            const double v = evaluate(trial);
            if (v > value) {
              value = v;
              pair = trial;
              improved = true;
            }
          }
        }
      }
    }

    const auto& basis = bases_.at(d);
    const int n_rot = static_cast<int>(basis.size());
    const int n_ang = pair[x].contraction ? d : 0;
    const double eps = config_.fd_step;
    auto moved = [&](const std::array<ObsState, 2>& s, const RealVector& dir, double t) {
      std::array<ObsState, 2> out = s;
      const Matrix r = rotation(basis, dir.head(n_rot), t);
      out[0].u = r * s[0].u;
      out[1].u = r * s[1].u;
      if (n_ang > 0) {
        out[x].angles = s[x].angles + t * dir.tail(n_ang);
        out[x].spectrum = out[x].angles.array().cos();
      }
      return out;
    };
    double step = kInitialStep;
    for (int it = 0; it < kInnerSteps; ++it) {
      RealVector grad(n_rot + n_ang);
      RealVector unit = RealVector::Zero(n_rot + n_ang);
      for (int k = 0; k < n_rot + n_ang; ++k) {
        unit.setZero();
        unit[k] = 1.0;
        grad[k] = (evaluate(moved(pair, unit, eps)) - evaluate(moved(pair, unit, -eps))) / (2.0 * eps);
      }
      const double norm = grad.norm();
      if (!(norm > 1e-12)) break;
      const RealVector dir = grad / norm;
      bool accepted = false;
      while (step >= kMinStep) {
        auto candidate = moved(pair, dir, step);
        const double v = evaluate(candidate);
        if (v > value) {
          pair = std::move(candidate);
          value = v;
          accepted = true;
          step = std::min(1.0, 2.0 * step);
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    return value;
  }

  const Scenario& scenario_;
  const PartySet& set_;
  const OptimizeConfig& config_;
  Tracker& tracker_;
  std::vector<int> dims_;
  std::map<int, std::vector<Matrix>> bases_;
};

/// Exact parameters of an observable state: the spectrum is sorted into the
/// signature (or angle) layout and the permutation folded into the unitary.
ObservableParams to_params(const ObsState& s) {
  const auto d = static_cast<int>(s.u.rows());
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  if (!s.contraction)
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return s.spectrum[a] > s.spectrum[b]; });
  Matrix u(d, d);
  for (int k = 0; k < d; ++k) u.col(k) = s.u.col(order[k]);
  ObservableParams p;
  p.dim = d;
  p.theta = theta_from_generator(unitary_log(u));
  if (s.contraction) {
    p.n_plus = d;
    p.n_minus = 0;
    p.eigen_angles.assign(s.angles.data(), s.angles.data() + d);
  } else {
    p.n_plus = static_cast<int>(std::count_if(order.begin(), order.end(),
                                              [&](int k) { return s.spectrum[k] > 0; }));
    p.n_minus = d - p.n_plus;
  }
  return p;
}

ParamsPair identity_params(int d) {
  ObservableParams p;
  p.dim = d;
  p.n_plus = d;
  p.n_minus = 0;
  p.theta.assign(static_cast<std::size_t>(d) * d, 0.0);
  return {p, p};
}

}  // namespace

OptimizationResult optimize_S(const Scenario& scenario, const OptimizeConfig& config) {
  if (config.restarts < 1) throw Error(ErrorCode::ValidationError, "restarts must be >= 1");
  if (!(config.tolerance > 0.0) || !(config.fd_step > 0.0))
    throw Error(ErrorCode::ValidationError, "tolerances must be positive");
  const auto sets = scenario.independent_set
                        ? std::vector<PartySet>{*scenario.independent_set}
                        : default_independent_sets(scenario.topology);
  const auto& layout = *scenario.layout;

  OptimizationResult result;
  Tracker tracker;

  // Identity observables give I = 2^h, J = 0 and hence S = 2 for every state.
  std::vector<ParamsPair> baseline;
  for (int p = 0; p < layout.party_count(); ++p)
    baseline.push_back(identity_params(static_cast<int>(layout.local_dim(p))));
  {
    const auto t = bell_terms(scenario.state, observables_from_params(baseline), sets.front());
    const auto r = make_bell_report(t.I, t.J, sets.front(), scenario.tol.bell);
    result.S = r.S;
    result.I = r.I;
    result.J = r.J;
    result.independent_set = sets.front();
    result.params = baseline;
    result.best_restart = -1;
    tracker.observe(r.S);
  }

  result.best_search_S = -std::numeric_limits<double>::infinity();
  result.min_independent_anticommutator = std::numeric_limits<double>::infinity();
  result.converged = true;
  for (const auto& set : sets) {
    SeeSaw seesaw(scenario, set, config, tracker);
    for (int r = 0; r < config.restarts; ++r) {
      Rng rng(config.seed + static_cast<std::uint64_t>(r));
      std::vector<std::array<ObsState, 2>> states;
      auto summary = seesaw.run(rng, states);

      std::vector<ParamsPair> params;
      for (const auto& s : states) params.push_back({to_params(s[0]), to_params(s[1])});
      const auto obs = observables_from_params(params);
      const auto t = bell_terms(scenario.state, obs, set);
      const auto report = make_bell_report(t.I, t.J, set, scenario.tol.bell);
      tracker.observe(report.S);
      summary.S = report.S;
      result.restarts.push_back(summary);
      result.total_iterations += summary.iterations;
      result.converged = result.converged && summary.converged;
      result.best_search_S = std::max(result.best_search_S, report.S);
      for (int i : set)
        result.min_independent_anticommutator = std::min(
            result.min_independent_anticommutator, operator_norm(anticommutator(obs[i][0], obs[i][1])));

      if (report.S > result.S) {
        result.S = report.S;
        result.I = report.I;
        result.J = report.J;
        result.independent_set = set;
        result.params = std::move(params);
        result.best_restart = static_cast<int>(result.restarts.size()) - 1;
      }
    }
  }
  result.max_observed_S = tracker.max_observed;
  result.worst_step_decrease = tracker.worst_decrease;
  return result;
}

Scenario canonical_optimal_scenario(const NetworkTopology& topology, const PartySet& set) {
  for (const auto& src : topology.sources()) {
    if (src.members.size() != 2)
      throw Error(ErrorCode::UnsupportedTopology,
                  "canonical construction needs bipartite sources; '" + src.name + "' is not");
    for (const auto& m : src.members)
      if (m.dim != 2)
        throw Error(ErrorCode::UnsupportedTopology,
                    "canonical construction needs qubit sources; '" + src.name + "' is not");
  }
  if (set.size() < 2 || !std::is_sorted(set.begin(), set.end()) ||
      !is_independent_set(topology, set))
    throw Error(ErrorCode::InvalidIndependentSet, "canonical construction needs an independent set");

  const SubsystemLayout layout(topology);
  std::vector<bool> indep(topology.party_count(), false);
  for (int p : set) indep[p] = true;
  auto is_first_site = [&](int site) {
    const int p = layout.sites()[site].party;
    return layout.party_sites(p).front() == site;
  };
  auto partner_of = [&](int site) {
    const auto& ss = layout.source_sites(layout.sites()[site].source);
    return ss[0] == site ? ss[1] : ss[0];
  };

  const Matrix z = pauli::z(), x = pauli::x();
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<ObservablePair> observables;
  for (int p = 0; p < topology.party_count(); ++p) {
    std::vector<Matrix> zs, xs;
    for (int site : layout.party_sites(p)) {
      if (indep[p]) {
        zs.push_back(z);
        xs.push_back(is_first_site(site) ? x : z);
      } else {
        const int partner = partner_of(site);
        const int q = layout.sites()[partner].party;
        const bool flips = !indep[q] || is_first_site(partner);
        zs.push_back(z);
        xs.push_back(flips ? x : z);
      }
    }
    const Matrix zp = kron_all(zs), xp = kron_all(xs);
    if (indep[p])
      observables.push_back({r * (zp + xp), r * (zp - xp)});
    else
      observables.push_back({zp, xp});
  }

  std::vector<SourceState> sources;
  for (const auto& src : topology.sources())
    sources.push_back(make_source_state(src.name, SourceKind::Singlet, {}, {2, 2}));
  return make_scenario(topology, std::move(sources), std::move(observables), set);
}

std::vector<SweepPoint> perturbation_sweep(const Scenario& canonical,
                                           const std::vector<double>& deltas, int party,
                                           int probes, std::uint64_t seed) {
  const PartySet set = canonical.independent_set ? *canonical.independent_set
                                                 : evaluate_S(canonical).independent_set;
  if (party < 0) party = set.front();
  if (std::find(set.begin(), set.end(), party) == set.end())
    throw Error(ErrorCode::InvalidIndependentSet, "perturbed party must be independent");
  const auto& [a0, a1] = canonical.observables[party];
  // Y = -(i/2)[A0, A1] generates rotations in the plane of an anticommuting pair.
  const Matrix generator = Complex(0, -0.5) * commutator(a0, a1);

  std::vector<SweepPoint> out;
  for (double delta : deltas) {
    Scenario s = canonical;
    s.independent_set = set;
    const Matrix rot = unitary_exp(-0.5 * delta * generator);
    Matrix rotated = rot * a1 * rot.adjoint();
    s.observables[party][1] = 0.5 * (rotated + rotated.adjoint());
    const auto bell = evaluate_S(s, set);
    const auto cert = max_violation_certificate(s, set, probes, seed, s.tol.algebraic);
    double r_anti = 0.0;
    for (const auto& pc : cert.parties)
      if (pc.party == party) r_anti = pc.r_anti;
    out.push_back({delta, bell.S, cert.max_residual(), r_anti});
  }
  return out;
}

OddDimensionGap odd_dimension_gap(const Scenario& scenario, const OptimizeConfig& config) {
  const auto& sites = scenario.layout->sites();
  const int d = sites.front().dim;
  for (const auto& s : sites) {
    if (s.dim % 2 == 0)
      throw Error(ErrorCode::EvenDimension, "odd-dimension experiment needs odd local dimensions");
    if (s.dim != d)
      throw Error(ErrorCode::ValidationError, "odd-dimension experiment needs equal site dimensions");
  }
  const auto faith = faithfulness(scenario.state, scenario.tol.faithfulness);
  if (!faith.faithful)
    throw Error(ErrorCode::ValidationError, "odd-dimension experiment needs a faithful state");

  OddDimensionGap out;
  out.dim = d;
  out.min_eigenvalue = faith.min_eigenvalue;
  out.result = optimize_S(scenario, config);
  out.best_S = out.result.S;
  out.gap = kTsirelson - out.best_S;
  out.residual_floor = out.result.min_independent_anticommutator;
  return out;
}

AnticommutatorFloor anticommutator_floor(int dim, int samples, std::uint64_t seed) {
  if (dim % 2 == 0) throw Error(ErrorCode::EvenDimension, "floor is defined for odd dimensions");
  Rng rng(seed);
  AnticommutatorFloor out;
  out.samples = samples;
  out.min_norm = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const Matrix a = random_dichotomic_any_signature(dim, rng);
    const Matrix b = random_dichotomic_any_signature(dim, rng);
    out.min_norm = std::min(out.min_norm, operator_norm(anticommutator(a, b)));
  }
  return out;
}

}  // namespace qnet
