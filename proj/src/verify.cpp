#include "qnet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "qnet/bell.hpp"
#include "qnet/error.hpp"
#include "qnet/optimize.hpp"
#include "qnet/random.hpp"

namespace qnet {

namespace {

struct Net {
  NetworkTopology topology;
  std::shared_ptr<const SubsystemLayout> layout;
  std::vector<PartySet> sets;  // every independent set of every size
};

Net make_net(const TopologySpec& spec) {
  Net n{validate_topology(spec), nullptr, {}};
  n.layout = std::make_shared<const SubsystemLayout>(n.topology);
  for (int h = 2; h <= n.topology.party_count(); ++h) {
    auto level = independent_sets(n.topology, h);
    if (level.empty()) break;
    n.sets.insert(n.sets.end(), level.begin(), level.end());
  }
  return n;
}

const std::vector<Net>& nets() {
  static const std::vector<Net> all{make_net(topologies::chain(3)), make_net(topologies::chain(5)),
                                    make_net(topologies::star(3))};
  return all;
}

std::vector<int> source_dims(const Source& s) {
  std::vector<int> dims;
  for (const auto& m : s.members) dims.push_back(m.dim);
  return dims;
}

int source_dim(const Source& s) {
  int d = 1;
  for (const auto& m : s.members) d *= m.dim;
  return d;
}

std::vector<SourceState> random_sources(const NetworkTopology& topo, Rng& rng) {
  std::vector<SourceState> out;
  for (const auto& src : topo.sources()) {
    const int d = source_dim(src);
    std::uniform_int_distribution<int> rank(1, d);
    SourceParams params;
    params.matrix = random_density(d, rank(rng), rng);
    out.push_back(make_source_state(src.name, SourceKind::Explicit, params, source_dims(src)));
  }
  return out;
}

std::vector<SourceState> separable_sources(const NetworkTopology& topo, Rng& rng) {
  std::vector<SourceState> out;
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  for (const auto& src : topo.sources()) {
    SourceParams params;
    const int c = count(rng);
    double total = 0.0;
    for (int k = 0; k < c; ++k) {
      SourceParams::Component comp;
      comp.weight = unif(rng);
      total += comp.weight;
      for (const auto& m : src.members) {
        std::uniform_int_distribution<int> rank(1, m.dim);
        comp.locals.push_back(random_density(m.dim, rank(rng), rng));
      }
      params.components.push_back(std::move(comp));
    }
    for (auto& comp : params.components) comp.weight /= total;
    out.push_back(make_source_state(src.name, SourceKind::SeparableMixture, params, source_dims(src)));
  }
  return out;
}

std::vector<ObservablePair> random_observables(const SubsystemLayout& layout, Rng& rng) {
  std::vector<ObservablePair> out;
  for (int p = 0; p < layout.party_count(); ++p) {
    const int d = static_cast<int>(layout.local_dim(p));
    out.push_back({random_dichotomic_any_signature(d, rng), random_dichotomic_any_signature(d, rng)});
  }
  return out;
}

ObservablePair commuting_pair(int d, Rng& rng) {
  const Matrix u = random_unitary(d, rng);
  std::bernoulli_distribution coin(0.5);
  ObservablePair pair;
  for (auto& a : pair) {
    RealVector s(d);
    for (int k = 0; k < d; ++k) s[k] = coin(rng) ? 1.0 : -1.0;
    a = u * s.cast<Complex>().asDiagonal() * u.adjoint();
    a = 0.5 * (a + a.adjoint()).eval();
  }
  return pair;
}

double s_value(const NetworkState& state, const std::vector<ObservablePair>& obs, const PartySet& set) {
  const auto t = bell_terms(state, obs, set);
  const int h = static_cast<int>(set.size());
  return root_abs(t.I, h) + root_abs(t.J, h);
}

SuiteResult start(const std::string& name, int trials, double tol, const std::string& bound) {
  SuiteResult r;
  r.name = name;
  r.trials = trials;
  r.tolerance = tol;
  r.bound = bound;
  r.worst_residual = -std::numeric_limits<double>::infinity();
  return r;
}

void record(SuiteResult& r, double excess) {
  r.worst_residual = std::max(r.worst_residual, excess);
  if (excess <= r.tolerance) ++r.passed;
}

void finish(SuiteResult& r) { r.pass = r.passed == r.trials; }

}  // namespace

SuiteResult verify_tsirelson(int trials, std::uint64_t seed) {
  auto r = start("tsirelson", trials, 1e-9, "S <= 2 sqrt(2)");
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed + static_cast<std::uint64_t>(t));
    const Net& net = nets()[t % nets().size()];
    const auto state = assemble_network_state(random_sources(net.topology, rng), net.layout);
    const auto obs = random_observables(*net.layout, rng);
    double best = 0.0;
    for (const auto& set : net.sets) best = std::max(best, s_value(state, obs, set));
    record(r, best - kTsirelson);
  }
  finish(r);
  return r;
}

SuiteResult verify_abelian(int trials, std::uint64_t seed) {
  auto r = start("abelian", trials, 1e-9, "S <= 2 with commuting pairs at independent parties");
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed + static_cast<std::uint64_t>(t));
    const Net& net = nets()[t % nets().size()];
    std::uniform_int_distribution<std::size_t> pick(0, net.sets.size() - 1);
    const PartySet& set = net.sets[pick(rng)];
    const auto state = assemble_network_state(random_sources(net.topology, rng), net.layout);
    auto obs = random_observables(*net.layout, rng);
    for (int p : set) obs[p] = commuting_pair(static_cast<int>(net.layout->local_dim(p)), rng);
    record(r, s_value(state, obs, set) - 2.0);
  }
  finish(r);
  return r;
}

SuiteResult verify_separable(int trials, std::uint64_t seed) {
  auto r = start("separable", trials, 1e-9, "S <= 2 with separable sources");
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed + static_cast<std::uint64_t>(t));
    const Net& net = nets()[t % nets().size()];
    const auto state = assemble_network_state(separable_sources(net.topology, rng), net.layout);
    const auto obs = random_observables(*net.layout, rng);
    double best = 0.0;
    for (const auto& set : net.sets) best = std::max(best, s_value(state, obs, set));
    record(r, best - 2.0);
  }
  finish(r);
  return r;
}

SuiteResult verify_continuity(int trials, std::uint64_t seed) {
  auto r = start("continuity", trials, 1e-9, "|S_rho - S_sigma| <= 4 ||rho - sigma||_1^(1/h)");
  static const std::vector<Net> small{make_net(topologies::chain(3)), make_net(topologies::chain(4)),
                                      make_net(topologies::star(3))};
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed + static_cast<std::uint64_t>(t));
    const Net& net = small[t % small.size()];
    std::uniform_int_distribution<std::size_t> pick(0, net.sets.size() - 1);
    const PartySet& set = net.sets[pick(rng)];
    const auto obs = random_observables(*net.layout, rng);
    auto a = random_sources(net.topology, rng);
    auto b = random_sources(net.topology, rng);
    // Half of the pairs are close: sigma mixes rho with a small admixture.
    if (t % 2 == 1) {
      std::uniform_real_distribution<double> eps(0.0, 0.05);
      for (std::size_t s = 0; s < a.size(); ++s) {
        const double e = eps(rng);
        SourceParams params;
        params.matrix = (1.0 - e) * a[s].rho + e * b[s].rho;
        b[s] = make_source_state(a[s].name, SourceKind::Explicit, params, a[s].dims);
      }
    }
    const auto rho = assemble_network_state(std::move(a), net.layout);
    const auto sigma = assemble_network_state(std::move(b), net.layout);
    const double dist = trace_norm_hermitian(rho.density() - sigma.density());
    const double lhs = std::abs(s_value(rho, obs, set) - s_value(sigma, obs, set));
    const double rhs = 4.0 * std::pow(dist, 1.0 / static_cast<double>(set.size()));
    record(r, lhs - rhs);
  }
  finish(r);
  return r;
}

SuiteResult verify_trig(int trials, std::uint64_t seed) {
  auto r = start("trig", trials, 1e-12, "(prod sin theta_i)^(1/h) <= sin(mean theta)");
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed + static_cast<std::uint64_t>(t));
    const int h = 2 + t % 3;
    std::uniform_real_distribution<double> angle(0.0, M_PI);
    std::vector<double> thetas;
    while (static_cast<int>(thetas.size()) < h) {
      const double a = angle(rng);
      if (a > 0.0) thetas.push_back(a);
    }
    const auto c = geo_mean_sine_check(thetas);
    record(r, c.lhs - c.rhs);
  }
  finish(r);
  return r;
}

SuiteResult verify_odd_dim(int trials, std::uint64_t seed) {
  auto r = start("odd-dim", trials, 0.0, "||{A0, A1}|| > 0 for d = 3");
  r.worst_residual = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed + static_cast<std::uint64_t>(t));
    const Matrix a = random_dichotomic_any_signature(3, rng);
    const Matrix b = random_dichotomic_any_signature(3, rng);
    const double n = operator_norm(anticommutator(a, b));
    r.worst_residual = std::min(r.worst_residual, n);
    if (n > 1e-9) ++r.passed;
  }
  finish(r);
  return r;
}

VerifyReport run_verify(const std::string& suite, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::ValidationError, "trials must be >= 1");
  VerifyReport report;
  report.suite = suite;
  report.trials = trials;
  report.seed = seed;
  auto run = [&](const std::string& name) {
    if (name == "tsirelson") return verify_tsirelson(trials, seed);
    if (name == "abelian") return verify_abelian(trials, seed);
    if (name == "separable") return verify_separable(trials, seed);
    if (name == "continuity") return verify_continuity(trials, seed);
    if (name == "trig") return verify_trig(trials, seed);
    if (name == "odd-dim") return verify_odd_dim(trials, seed);
    throw Error(ErrorCode::ValidationError, "unknown suite '" + name + "'");
  };
  if (suite == "all") {
    for (const auto& name : suite_names()) report.suites.push_back(run(name));
  } else {
    report.suites.push_back(run(suite));
  }
  report.pass = std::all_of(report.suites.begin(), report.suites.end(),
                            [](const SuiteResult& s) { return s.pass; });
  return report;
}

}  // namespace qnet
