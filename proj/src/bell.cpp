#include "qnet/bell.hpp"

#include <algorithm>
#include <cmath>

#include "qnet/error.hpp"
#include "qnet/random.hpp"

namespace qnet {

namespace {

std::vector<bool> membership(const PartySet& set, int parties) {
  std::vector<bool> in(parties, false);
  for (int p : set) in[p] = true;
  return in;
}

std::string describe(const PartySet& set) {
  std::string s = "{";
  for (std::size_t k = 0; k < set.size(); ++k) s += (k ? "," : "") + std::to_string(set[k] + 1);
  return s + "}";
}

void check_set(const NetworkTopology& topology, const PartySet& set) {
  if (set.size() < 2)
    throw Error(ErrorCode::InvalidIndependentSet, "independent set needs at least 2 parties");
  if (!std::is_sorted(set.begin(), set.end()) || !is_independent_set(topology, set))
    throw Error(ErrorCode::InvalidIndependentSet,
                describe(set) + " is not a sorted independent set of the network");
}

}  // namespace

std::vector<ObservablePair> identity_observables(const SubsystemLayout& layout) {
  std::vector<ObservablePair> out;
  for (int p = 0; p < layout.party_count(); ++p) {
    const auto d = static_cast<Eigen::Index>(layout.local_dim(p));
    out.push_back({Matrix::Identity(d, d), Matrix::Identity(d, d)});
  }
  return out;
}

void validate_scenario(const Scenario& scenario) {
  const auto& layout = *scenario.layout;
  if (static_cast<int>(scenario.observables.size()) != layout.party_count())
    throw Error(ErrorCode::ValidationError, "observables missing for some parties");
  for (int p = 0; p < layout.party_count(); ++p) {
    const auto d = static_cast<Eigen::Index>(layout.local_dim(p));
    for (int x = 0; x < 2; ++x) {
      const Matrix& op = scenario.observables[p][x];
      const std::string where =
          "party " + scenario.topology.parties()[p] + " input " + std::to_string(x);
      if (op.rows() != d || op.cols() != d)
        throw Error(ErrorCode::DimensionMismatch,
                    where + ": observable must be " + std::to_string(d) + "x" + std::to_string(d));
      const auto c = classify_observable(op, scenario.tol.classification);
      const bool ok = scenario.observable_class == ObservableClass::Dichotomic
                          ? c.tag == ObservableClass::Dichotomic
                          : c.tag != ObservableClass::Unbounded;
      if (!ok)
        throw Error(ErrorCode::ValidationError,
                    where + ": observable is not " + to_string(scenario.observable_class));
    }
  }
  if (scenario.independent_set) check_set(scenario.topology, *scenario.independent_set);
}

Scenario make_scenario(const NetworkTopology& topology, std::vector<SourceState> sources,
                       std::vector<ObservablePair> observables,
                       std::optional<PartySet> independent_set, Tolerances tol) {
  auto layout = std::make_shared<const SubsystemLayout>(topology);
  auto state = assemble_network_state(std::move(sources), layout);
  Scenario s{topology, layout, std::move(state), std::move(observables),
             std::move(independent_set), ObservableClass::Dichotomic, tol};
  validate_scenario(s);
  return s;
}

double root_abs(double x, int h) {
  if (x == 0.0) return 0.0;
  return std::pow(std::abs(x), 1.0 / h);
}

BellReport make_bell_report(double I, double J, const PartySet& set, double tol) {
  BellReport r;
  r.I = I;
  r.J = J;
  r.h = static_cast<int>(set.size());
  r.independent_set = set;
  r.S = root_abs(I, r.h) + root_abs(J, r.h);
  r.classical_bound_satisfied = r.S <= 2.0 + tol;
  r.tsirelson_satisfied = r.S <= kTsirelson + tol;
  r.violation = r.S > 2.0 + kViolationSlack;
  r.maximal = r.S >= kTsirelson - kMaximalSlack;
  return r;
}

BellTerms bell_terms(const NetworkState& state, const std::vector<ObservablePair>& observables,
                     const PartySet& independent_set) {
  const auto& layout = state.layout();
  const auto indep = membership(independent_set, layout.party_count());
  std::vector<Matrix> f_i, f_j;
  for (int p = 0; p < layout.party_count(); ++p) {
    const auto& [a0, a1] = observables[p];
    f_i.push_back(indep[p] ? Matrix(a0 + a1) : a0);
    f_j.push_back(indep[p] ? Matrix(a0 - a1) : a1);
  }
  Complex I = 0.0, J = 0.0;
  Vector work, tmp;
  for (const auto& m : state.ensemble()) {
    for (int which = 0; which < 2; ++which) {
      const auto& factors = which == 0 ? f_i : f_j;
      work = m.psi;
      for (int p = 0; p < layout.party_count(); ++p) {
        layout.apply(p, factors[p], work, tmp);
        work.swap(tmp);
      }
      (which == 0 ? I : J) += m.weight * m.psi.dot(work);
    }
  }
  return {I.real(), J.real()};
}

std::vector<PartySet> default_independent_sets(const NetworkTopology& topology) {
  const auto report = independence_report(topology);
  if (report.no_independent_pair)
    throw Error(ErrorCode::NoIndependentSet, "network has no pair of independent parties");
  return report.levels.back().sets;
}

BellReport evaluate_S(const Scenario& scenario, const PartySet& independent_set) {
  check_set(scenario.topology, independent_set);
  const auto t = bell_terms(scenario.state, scenario.observables, independent_set);
  return make_bell_report(t.I, t.J, independent_set, scenario.tol.bell);
}

BellReport evaluate_S(const Scenario& scenario) {
  if (scenario.independent_set) return evaluate_S(scenario, *scenario.independent_set);
  std::optional<BellReport> best;
  for (const auto& set : default_independent_sets(scenario.topology)) {
    auto r = evaluate_S(scenario, set);
    if (!best || r.S > best->S) best = std::move(r);
  }
  return *best;
}

std::vector<double> correlation(const Scenario& scenario, const std::vector<int>& inputs) {
  const auto& layout = *scenario.layout;
  const int m = layout.party_count();
  if (static_cast<int>(inputs.size()) != m)
    throw Error(ErrorCode::ValidationError, "need one input per party");
  std::vector<std::array<Matrix, 2>> projectors;
  for (int p = 0; p < m; ++p) {
    const int x = inputs[p];
    if (x != 0 && x != 1) throw Error(ErrorCode::ValidationError, "inputs must be 0 or 1");
    const auto d = static_cast<Eigen::Index>(layout.local_dim(p));
    const Matrix id = Matrix::Identity(d, d);
    const Matrix& a = scenario.observables[p][x];
    projectors.push_back({0.5 * (id + a), 0.5 * (id - a)});
  }

  std::vector<double> table(std::size_t{1} << m, 0.0);
  for (const auto& member : scenario.state.ensemble()) {
    // Depth-first over outcomes: 2^(m+1) party applications per vector.
    std::vector<Vector> stack(m + 1);
    stack[0] = member.psi;
    auto visit = [&](auto&& self, int p, std::size_t index) -> void {
      if (p == m) {
        table[index] += member.weight * member.psi.dot(stack[m]).real();
        return;
      }
      for (int a = 0; a < 2; ++a) {
        layout.apply(p, projectors[p][a], stack[p], stack[p + 1]);
        self(self, p + 1, (index << 1) | static_cast<std::size_t>(a));
      }
    };
    visit(visit, 0, 0);
  }
  return table;
}

PartyEnvironment party_environment(const NetworkState& state,
                                   const std::vector<ObservablePair>& observables,
                                   const PartySet& independent_set, int party) {
  const auto& layout = state.layout();
  const auto indep = membership(independent_set, layout.party_count());
  const auto d = static_cast<Eigen::Index>(layout.local_dim(party));
  const std::size_t rest = layout.rest_dim(party);

  PartyEnvironment env;
  env.independent = indep[party];
  env.k_i = Matrix::Zero(d, d);
  env.k_j = Matrix::Zero(d, d);
  std::array<std::vector<Matrix>, 2> factors;
  for (int p = 0; p < layout.party_count(); ++p) {
    const auto& [a0, a1] = observables[p];
    factors[0].push_back(indep[p] ? Matrix(a0 + a1) : a0);
    factors[1].push_back(indep[p] ? Matrix(a0 - a1) : a1);
  }
  Vector work, tmp;
  for (const auto& member : state.ensemble()) {
    for (int which = 0; which < 2; ++which) {
      work = member.psi;
      for (int p = 0; p < layout.party_count(); ++p) {
        if (p == party) continue;
        layout.apply(p, factors[which][p], work, tmp);
        work.swap(tmp);
      }
      Matrix& k = which == 0 ? env.k_i : env.k_j;
      for (std::size_t r = 0; r < rest; ++r)
        for (Eigen::Index j = 0; j < d; ++j) {
          const Complex wj = member.weight * work[layout.global_index(party, r, j)];
          for (Eigen::Index i = 0; i < d; ++i)
            k(j, i) += wj * std::conj(member.psi[layout.global_index(party, r, i)]);
        }
    }
  }
  return env;
}

BellTerms terms_from_environment(const PartyEnvironment& env, const Matrix& a0, const Matrix& a1) {
  auto trace_with = [](const Matrix& f, const Matrix& k) {
    return f.cwiseProduct(k.transpose()).sum().real();
  };
  if (env.independent)
    return {trace_with(a0 + a1, env.k_i), trace_with(a0 - a1, env.k_j)};
  return {trace_with(a0, env.k_i), trace_with(a1, env.k_j)};
}

double CertificateReport::max_residual() const {
  double r = std::max(r_comp0, r_comp1);
  for (const auto& p : parties) r = std::max({r, p.r_sq0, p.r_sq1, p.r_anti});
  return r;
}

CertificateReport max_violation_certificate(const Scenario& scenario, int probes,
                                            std::uint64_t seed, double tol) {
  const PartySet set = scenario.independent_set ? *scenario.independent_set
                                                : evaluate_S(scenario).independent_set;
  return max_violation_certificate(scenario, set, probes, seed, tol);
}

CertificateReport max_violation_certificate(const Scenario& scenario, const PartySet& set,
                                            int probes, std::uint64_t seed, double tol) {
  check_set(scenario.topology, set);
  const auto& layout = *scenario.layout;
  const auto& state = scenario.state;
  const auto indep = membership(set, layout.party_count());
  Rng rng(seed);

  CertificateReport report;
  report.independent_set = set;
  report.probes = probes;
  report.tol = tol;
  const auto faith = faithfulness(state, scenario.tol.faithfulness);
  report.min_eigenvalue = faith.min_eigenvalue;
  report.faithful = faith.faithful;

  for (int i : set) {
    const auto d = static_cast<Eigen::Index>(layout.local_dim(i));
    const Matrix id = Matrix::Identity(d, d);
    const auto& [a0, a1] = scenario.observables[i];
    const Matrix sq0 = a0 * a0, sq1 = a1 * a1, anti = anticommutator(a0, a1);
    PartyCertificate pc;
    pc.party = i;
    for (int k = 0; k <= probes; ++k) {
      const Matrix probe = k == 0 ? id : random_dichotomic(static_cast<int>(d), rng);
      const Complex base = expectation_complex(state, {{i, probe}});
      pc.r_sq0 = std::max(pc.r_sq0, std::abs(expectation_complex(state, {{i, sq0 * probe}}) - base));
      pc.r_sq1 = std::max(pc.r_sq1, std::abs(expectation_complex(state, {{i, sq1 * probe}}) - base));
      pc.r_anti = std::max(pc.r_anti, std::abs(expectation_complex(state, {{i, anti * probe}})));
    }
    const auto alg = generated_algebra_dim(a0, a1, std::max(tol, scenario.tol.algebraic));
    pc.algebra_dim = alg.dim;
    pc.m2_structure = alg.m2_structure;
    if (report.faithful) {
      pc.op_sq0 = operator_norm(sq0 - id);
      pc.op_sq1 = operator_norm(sq1 - id);
      pc.op_anti = operator_norm(anti);
    }
    report.parties.push_back(std::move(pc));
  }

  std::vector<int> complement;
  for (int p = 0; p < layout.party_count(); ++p)
    if (!indep[p]) complement.push_back(p);
  if (!complement.empty()) {
    for (int k = 0; k <= probes; ++k) {
      std::vector<LocalFactor> probe, with0, with1;
      for (int j : complement) {
        const auto d = static_cast<Eigen::Index>(layout.local_dim(j));
        const Matrix pj = k == 0 ? Matrix(Matrix::Identity(d, d))
                                 : random_dichotomic(static_cast<int>(d), rng);
        const auto& [a0, a1] = scenario.observables[j];
        probe.push_back({j, pj});
        with0.push_back({j, a0 * a0 * pj});
        with1.push_back({j, a1 * a1 * pj});
      }
      const Complex base = expectation_complex(state, probe);
      report.r_comp0 = std::max(report.r_comp0, std::abs(expectation_complex(state, with0) - base));
      report.r_comp1 = std::max(report.r_comp1, std::abs(expectation_complex(state, with1) - base));
    }
  }

  report.pass = report.max_residual() <= tol &&
                std::all_of(report.parties.begin(), report.parties.end(),
                            [](const PartyCertificate& p) { return p.m2_structure; });
  return report;
}

double AbelianEffects::identity_residual(const Matrix& a0, const Matrix& a1) const {
  const auto d = a0.rows();
  double r = 0.0;
  for (const Matrix* e : {&pp, &pm, &mp, &mm}) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (*e + e->adjoint()), Eigen::EigenvaluesOnly);
    r = std::max(r, std::max(0.0, -es.eigenvalues().minCoeff()));
  }
  r = std::max(r, operator_norm(a0 + a1 - 2.0 * (pp - mm)));
  r = std::max(r, operator_norm(a0 - a1 - 2.0 * (pm - mp)));
  r = std::max(r, operator_norm(pp + pm + mp + mm - Matrix::Identity(d, d)));
  return r;
}

AbelianEffects abelian_effects(const Matrix& a0, const Matrix& a1, double tol) {
  if (operator_norm(commutator(a0, a1)) > tol)
    throw Error(ErrorCode::NotCommuting, "abelian decomposition needs [a0, a1] = 0");
  for (const Matrix* a : {&a0, &a1}) {
    const auto c = classify_observable(*a, tol);
    if (c.tag == ObservableClass::Unbounded)
      throw Error(ErrorCode::ValidationError, "abelian decomposition needs contractions");
  }
  const Matrix id = Matrix::Identity(a0.rows(), a0.cols());
  auto effect = [&](double e0, double e1) {
    Matrix m = 0.25 * (id + e0 * a0) * (id + e1 * a1);
    return Matrix(0.5 * (m + m.adjoint()));
  };
  return {effect(1, 1), effect(1, -1), effect(-1, 1), effect(-1, -1)};
}

SineCheck geo_mean_sine_check(const std::vector<double>& thetas) {
  if (thetas.size() < 2)
    throw Error(ErrorCode::ThetaOutOfRange, "need at least two angles");
  double log_sum = 0.0, sum = 0.0;
  for (double t : thetas) {
    if (!(t > 0.0 && t < M_PI))
      throw Error(ErrorCode::ThetaOutOfRange, "angle " + std::to_string(t) + " outside (0, pi)");
    log_sum += std::log(std::sin(t));
    sum += t;
  }
  const double h = static_cast<double>(thetas.size());
  return {std::exp(log_sum / h), std::sin(sum / h)};
}

}  // namespace qnet
