#include <gtest/gtest.h>

#include <cmath>

#include "oracle.hpp"
#include "qnet/optimize.hpp"
#include "qnet/random.hpp"
#include "test_util.hpp"

using namespace qnet;

namespace {

NetworkTopology topo(const TopologySpec& s) { return validate_topology(s); }

Scenario with_sources(const NetworkTopology& t, std::vector<SourceState> src) {
  return make_scenario(t, std::move(src), identity_observables(SubsystemLayout(t)));
}

std::vector<SourceState> kind_sources(const NetworkTopology& t, SourceKind kind, double v = 1.0, int dim = 2) {
  std::vector<SourceState> out;
  SourceParams p;
  p.visibility = v;
  for (const auto& s : t.sources()) out.push_back(make_source_state(s.name, kind, p, {dim, dim}));
  return out;
}

std::vector<SourceState> separable(const NetworkTopology& t, Rng& rng) {
  std::vector<SourceState> out;
  for (const auto& s : t.sources()) {
    SourceParams p;
    for (int c = 0; c < 3; ++c)
      p.components.push_back({1.0 / 3, {random_density(2, 1, rng), random_density(2, 1, rng)}});
    out.push_back(make_source_state(s.name, SourceKind::SeparableMixture, p, {2, 2}));
  }
  return out;
}

OptimizeConfig quick(int restarts = 8) {
  OptimizeConfig c;
  c.restarts = restarts;
  c.max_iterations = 200;
  return c;
}

void expect_reproducible(const Scenario& sc, const OptimizationResult& r) {
  Scenario copy = sc;
  copy.observables = r.observables();
  EXPECT_NEAR(evaluate_S(copy, r.independent_set).S, r.S, 1e-10);
}

}  // namespace

TEST(Canonical, BilocalMatchesDenseOracle) {
  const auto t = topo(topologies::chain(3));
  const auto sc = canonical_optimal_scenario(t, {0, 2});
  EXPECT_NEAR(evaluate_S(sc).S, kTsirelson, 1e-10);
  std::vector<Matrix> rhos(2, singlet_density());
  EXPECT_NEAR(oracle::bell(t, oracle::global_state(rhos), sc.observables, {0, 2}).S, kTsirelson, 1e-10);
  EXPECT_LT((sc.observables[0][0] - pauli::z_plus_x()).norm(), 1e-15);
  EXPECT_LT((sc.observables[1][0] - kron(pauli::z(), pauli::z())).norm(), 1e-15);
  EXPECT_LT((sc.observables[1][1] - kron(pauli::x(), pauli::x())).norm(), 1e-15);
}

TEST(Canonical, ThreeLeafStar) {
  const auto t = topo(topologies::star(3));
  const auto sc = canonical_optimal_scenario(t, {1, 2, 3});
  const auto r = evaluate_S(sc);
  EXPECT_NEAR(r.S, kTsirelson, 1e-10);
  EXPECT_NEAR(std::abs(r.I), std::pow(2.0, 1.5), 1e-10);
  EXPECT_LT((sc.observables[0][0] - pauli::tensor_power(pauli::z(), 3)).norm(), 1e-15);
  EXPECT_LT((sc.observables[0][1] - pauli::tensor_power(pauli::x(), 3)).norm(), 1e-15);
  std::vector<Matrix> rhos(3, singlet_density());
  EXPECT_NEAR(oracle::bell(t, oracle::global_state(rhos), sc.observables, {1, 2, 3}).S, kTsirelson, 1e-10);
}

TEST(Canonical, EveryIndependentSetOfSeveralTopologies) {
  for (const auto& spec : {topologies::chain(4), topologies::chain(5), topologies::chain(6), topologies::star(4)}) {
    const auto t = topo(spec);
    for (int h = 2; h <= t.party_count(); ++h)
      for (const auto& set : independent_sets(t, h)) {
        const auto sc = canonical_optimal_scenario(t, set);
        EXPECT_NEAR(evaluate_S(sc, set).S, kTsirelson, 1e-10);
        for (int p : set) EXPECT_TRUE(generated_algebra_dim(sc.observables[p][0], sc.observables[p][1], 1e-9).m2_structure);
      }
  }
}

TEST(Canonical, Errors) {
  const auto tri = topo({{"A", "B", "C", "D"}, {{"T", {{"A", 2}, {"B", 2}, {"C", 2}}}, {"U", {{"C", 2}, {"D", 2}}}}});
  EXPECT_EQ(code_of([&] { canonical_optimal_scenario(tri, {0, 3}); }), ErrorCode::UnsupportedTopology);
  const auto qutrit = topo(topologies::chain(3, 3));
  EXPECT_EQ(code_of([&] { canonical_optimal_scenario(qutrit, {0, 2}); }), ErrorCode::UnsupportedTopology);
  EXPECT_EQ(code_of([&] { canonical_optimal_scenario(topo(topologies::chain(3)), {0, 1}); }),
            ErrorCode::InvalidIndependentSet);
}

TEST(Optimize, BilocalSingletsReachTsirelson) {
  const auto t = topo(topologies::chain(3));
  const auto sc = with_sources(t, kind_sources(t, SourceKind::Singlet));
  const auto r = optimize_S(sc, quick());
  EXPECT_GE(r.S, kTsirelson - 1e-6);
  EXPECT_LE(r.max_observed_S, kTsirelson + 1e-9);
  EXPECT_LE(r.worst_step_decrease, 1e-7);
  EXPECT_GE(r.best_restart, 0);
  EXPECT_EQ(r.restarts.size(), 8u);
  expect_reproducible(sc, r);
  double best = 0.0;
  for (const auto& s : r.restarts) best = std::max(best, s.S);
  EXPECT_EQ(best, r.best_search_S);
}

TEST(Optimize, SeparableSourcesStayClassical) {
  const auto t = topo(topologies::chain(3));
  Rng rng(4);
  const auto sc = with_sources(t, separable(t, rng));
  const auto r = optimize_S(sc, quick());
  EXPECT_GE(r.S, 2.0 - 1e-4);
  EXPECT_LE(r.S, 2.0 + 1e-9);
  EXPECT_LE(r.max_observed_S, 2.0 + 1e-9);
  expect_reproducible(sc, r);
}

TEST(Optimize, AbelianConstraintGivesTwo) {
  const auto t = topo(topologies::chain(3));
  const auto sc = with_sources(t, kind_sources(t, SourceKind::Singlet));
  auto c = quick();
  c.constraint = Constraint::AbelianPairs;
  const auto r = optimize_S(sc, c);
  EXPECT_NEAR(r.S, 2.0, 1e-4);
  EXPECT_LE(r.max_observed_S, 2.0 + 1e-9);
  for (const auto& pair : r.observables()) EXPECT_LE(operator_norm(commutator(pair[0], pair[1])), 1e-9);
  expect_reproducible(sc, r);
}

TEST(Optimize, ContractionClass) {
  const auto t = topo(topologies::chain(3));
  auto sc = with_sources(t, kind_sources(t, SourceKind::Singlet));
  sc.observable_class = ObservableClass::Contraction;
  auto c = quick(4);
  c.observable_class = ObservableClass::Contraction;
  const auto r = optimize_S(sc, c);
  EXPECT_GE(r.S, kTsirelson - 1e-4);
  EXPECT_LE(r.max_observed_S, kTsirelson + 1e-9);
  for (const auto& pair : r.params) EXPECT_TRUE(pair[0].is_contraction());
  expect_reproducible(sc, r);
}

TEST(Optimize, Deterministic) {
  const auto t = topo(topologies::chain(3));
  SourceParams p;
  const auto sc = with_sources(t, kind_sources(t, SourceKind::Werner, 0.8));
  const auto a = optimize_S(sc, quick(3));
  const auto b = optimize_S(sc, quick(3));
  EXPECT_EQ(a.S, b.S);
  EXPECT_EQ(a.total_iterations, b.total_iterations);
  ASSERT_EQ(a.params.size(), b.params.size());
  for (std::size_t k = 0; k < a.params.size(); ++k) EXPECT_EQ(a.params[k][1].theta, b.params[k][1].theta);
}

TEST(Optimize, WernerReachesVisibilityTimesTsirelson) {
  const auto t = topo(topologies::chain(3));
  const auto sc = with_sources(t, kind_sources(t, SourceKind::Werner, 0.9));
  const auto r = optimize_S(sc, quick());
  EXPECT_NEAR(r.S, 0.9 * kTsirelson, 1e-6);
}

TEST(Optimize, MaximallyMixedFallsBackToIdentity) {
  const auto t = topo(topologies::chain(3));
  const auto sc = with_sources(t, kind_sources(t, SourceKind::Werner, 0.0));
  const auto r = optimize_S(sc, quick(2));
  EXPECT_NEAR(r.S, 2.0, 1e-12);
  EXPECT_EQ(r.best_restart, -1);
  expect_reproducible(sc, r);
}

TEST(Optimize, Errors) {
  const auto tri = topo(topologies::triangle());
  const auto sc = with_sources(tri, kind_sources(tri, SourceKind::Singlet));
  EXPECT_EQ(code_of([&] { optimize_S(sc, quick(1)); }), ErrorCode::NoIndependentSet);
  const auto t = topo(topologies::chain(3));
  const auto ok = with_sources(t, kind_sources(t, SourceKind::Singlet));
  auto bad = quick();
  bad.restarts = 0;
  EXPECT_EQ(code_of([&] { optimize_S(ok, bad); }), ErrorCode::ValidationError);
  bad = quick();
  bad.fd_step = 0.0;
  EXPECT_EQ(code_of([&] { optimize_S(ok, bad); }), ErrorCode::ValidationError);
}

TEST(Perturbation, SweepShape) {
  const auto sc = canonical_optimal_scenario(topo(topologies::chain(3)), {0, 2});
  const std::vector<double> deltas{0.0, 0.05, 0.1, 0.2, 0.3};
  const auto sweep = perturbation_sweep(sc, deltas);
  ASSERT_EQ(sweep.size(), deltas.size());
  EXPECT_NEAR(sweep[0].S, kTsirelson, 1e-12);
  EXPECT_LE(sweep[0].max_residual, 1e-12);
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    const double d = deltas[k];
    const double closed = std::sqrt(1 + std::sqrt(2.0) * std::cos(M_PI / 4 - d)) +
                          std::sqrt(1 + std::sqrt(2.0) * std::sin(M_PI / 4 - d));
    EXPECT_NEAR(sweep[k].S, closed, 1e-12);
    EXPECT_NEAR(sweep[k].r_anti, 2 * std::sin(d), 1e-12);
    if (k > 0) {
      EXPECT_LT(sweep[k].S, sweep[k - 1].S);
      EXPECT_GT(sweep[k].max_residual, sweep[k - 1].max_residual);
    }
  }
}

TEST(Perturbation, QuarterTurn) {
  const auto sc = canonical_optimal_scenario(topo(topologies::chain(3)), {0, 2});
  const auto sweep = perturbation_sweep(sc, {M_PI / 4});
  EXPECT_LT(sweep[0].S, kTsirelson);
  EXPECT_GT(sweep[0].r_anti, 0.0);
  EXPECT_EQ(code_of([&] { perturbation_sweep(sc, {0.1}, 1); }), ErrorCode::InvalidIndependentSet);
}

TEST(OddDimension, Errors) {
  const auto t = topo(topologies::chain(3));
  auto c = quick(1);
  EXPECT_EQ(code_of([&] { odd_dimension_gap(with_sources(t, kind_sources(t, SourceKind::Werner, 0.9)), c); }),
            ErrorCode::EvenDimension);
  const auto t3 = topo(topologies::chain(3, 3));
  EXPECT_EQ(code_of([&] {
              odd_dimension_gap(with_sources(t3, kind_sources(t3, SourceKind::MaximallyEntangled, 1.0, 3)), c);
            }),
            ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] { anticommutator_floor(2, 10, 0); }), ErrorCode::EvenDimension);
}

TEST(OddDimension, FloorPositive) {
  const auto f = anticommutator_floor(3, 10000, 1);
  EXPECT_EQ(f.samples, 10000);
  EXPECT_GT(f.min_norm, 1e-6);
  EXPECT_GT(anticommutator_floor(5, 2000, 2).min_norm, 1e-6);
}
