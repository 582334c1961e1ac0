#include <gtest/gtest.h>

#include <cmath>

#include "oracle.hpp"
#include "qnet/bell.hpp"
#include "qnet/optimize.hpp"
#include "qnet/random.hpp"
#include "test_util.hpp"

using namespace qnet;

namespace {

NetworkTopology chain(int k) { return validate_topology(topologies::chain(k)); }

std::vector<SourceState> singlets(const NetworkTopology& t) {
  std::vector<SourceState> out;
  for (const auto& s : t.sources()) out.push_back(make_source_state(s.name, SourceKind::Singlet, {}, {2, 2}));
  return out;
}

std::vector<SourceState> random_sources(const NetworkTopology& t, Rng& rng) {
  std::vector<SourceState> out;
  for (const auto& s : t.sources()) {
    std::vector<int> dims;
    int d = 1;
    for (const auto& m : s.members) {
      dims.push_back(m.dim);
      d *= m.dim;
    }
    SourceParams p;
    std::uniform_int_distribution<int> rank(1, d);
    p.matrix = random_density(d, rank(rng), rng);
    out.push_back(make_source_state(s.name, SourceKind::Explicit, p, dims));
  }
  return out;
}

std::vector<ObservablePair> random_obs(const SubsystemLayout& l, Rng& rng) {
  std::vector<ObservablePair> out;
  for (int p = 0; p < l.party_count(); ++p) {
    const int d = static_cast<int>(l.local_dim(p));
    out.push_back({random_dichotomic_any_signature(d, rng), random_dichotomic_any_signature(d, rng)});
  }
  return out;
}

std::vector<Matrix> rhos_of(const std::vector<SourceState>& s) {
  std::vector<Matrix> out;
  for (const auto& x : s) out.push_back(x.rho);
  return out;
}

std::vector<ObservablePair> bilocal_observables() {
  const Matrix zz = kron(pauli::z(), pauli::z()), xx = kron(pauli::x(), pauli::x());
  return {{pauli::z_plus_x(), pauli::z_minus_x()}, {zz, xx}, {pauli::z_plus_x(), pauli::z_minus_x()}};
}

}  // namespace

TEST(EvaluateS, BilocalCanonical) {
  const auto t = chain(3);
  const auto sc = make_scenario(t, singlets(t), bilocal_observables(), PartySet{0, 2});
  const auto r = evaluate_S(sc);
  EXPECT_NEAR(r.I, 2.0, 1e-12);
  EXPECT_NEAR(r.J, 2.0, 1e-12);
  EXPECT_NEAR(r.S, kTsirelson, 1e-12);
  EXPECT_EQ(r.h, 2);
  EXPECT_TRUE(r.violation);
  EXPECT_TRUE(r.maximal);
  EXPECT_TRUE(r.tsirelson_satisfied);
  EXPECT_FALSE(r.classical_bound_satisfied);
  const auto o = oracle::bell(t, oracle::global_state(rhos_of(sc.state.sources())), sc.observables, {0, 2});
  EXPECT_NEAR(o.S, r.S, 1e-12);
}

TEST(EvaluateS, IdentityObservablesGiveTwo) {
  Rng rng(1);
  for (const auto& spec : {topologies::chain(3), topologies::chain(5), topologies::star(3)}) {
    const auto t = validate_topology(spec);
    const auto sc = make_scenario(t, random_sources(t, rng), identity_observables(SubsystemLayout(t)));
    const auto r = evaluate_S(sc);
    EXPECT_NEAR(r.I, std::pow(2.0, r.h), 1e-12);
    EXPECT_NEAR(r.J, 0.0, 1e-14);
    EXPECT_NEAR(r.S, 2.0, 1e-12);
  }
}

TEST(EvaluateS, DeterministicDiagonalStrategiesAreClassical) {
  const auto t = chain(3);
  Rng rng(5);
  auto sc = make_scenario(t, random_sources(t, rng), bilocal_observables(), PartySet{0, 2});
  auto diag = [](int d, unsigned mask) {
    Matrix m = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) m(k, k) = (mask >> k) & 1u ? -1.0 : 1.0;
    return m;
  };
  double best = 0.0;
  for (unsigned a = 0; a < 16; ++a)
    for (unsigned b = 0; b < 256; ++b)
      for (unsigned c = 0; c < 16; ++c) {
        sc.observables = {{diag(2, a & 3), diag(2, a >> 2)}, {diag(4, b & 15), diag(4, b >> 4)},
                          {diag(2, c & 3), diag(2, c >> 2)}};
        best = std::max(best, evaluate_S(sc, {0, 2}).S);
      }
  EXPECT_LE(best, 2.0 + 1e-9);
  EXPECT_NEAR(best, 2.0, 1e-9);
}

TEST(EvaluateS, DefaultSetIsMaxOverLargestLevel) {
  const auto t = chain(5);
  Rng rng(8);
  const auto sc = make_scenario(t, random_sources(t, rng), random_obs(SubsystemLayout(t), rng));
  const auto r = evaluate_S(sc);
  EXPECT_EQ(r.independent_set, (PartySet{0, 2, 4}));
  EXPECT_EQ(default_independent_sets(t), (std::vector<PartySet>{{0, 2, 4}}));
  const auto star = validate_topology(topologies::star(2));
  const auto s2 = make_scenario(star, random_sources(star, rng), random_obs(SubsystemLayout(star), rng));
  EXPECT_EQ(evaluate_S(s2).independent_set, (PartySet{1, 2}));
}

TEST(EvaluateS, Errors) {
  const auto t = chain(3);
  auto sc = make_scenario(t, singlets(t), bilocal_observables());
  EXPECT_EQ(code_of([&] { evaluate_S(sc, {0, 1}); }), ErrorCode::InvalidIndependentSet);
  EXPECT_EQ(code_of([&] { evaluate_S(sc, {0}); }), ErrorCode::InvalidIndependentSet);
  EXPECT_EQ(code_of([&] { make_scenario(t, singlets(t), bilocal_observables(), PartySet{1, 2}); }),
            ErrorCode::InvalidIndependentSet);
  auto half = bilocal_observables();
  half[0][0] = 0.5 * pauli::z();
  EXPECT_EQ(code_of([&] { make_scenario(t, singlets(t), half); }), ErrorCode::ValidationError);
  auto wrong = bilocal_observables();
  wrong[1][0] = pauli::z();
  EXPECT_EQ(code_of([&] { make_scenario(t, singlets(t), wrong); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] { make_scenario(t, singlets(t), {}); }), ErrorCode::ValidationError);
  const auto tri = validate_topology(topologies::triangle());
  std::vector<ObservablePair> obs(3, ObservablePair{kron(pauli::z(), pauli::z()), kron(pauli::x(), pauli::x())});
  const auto ts = make_scenario(tri, singlets(tri), obs);
  EXPECT_EQ(code_of([&] { evaluate_S(ts); }), ErrorCode::NoIndependentSet);
}

TEST(EvaluateS, LazyMatchesDenseOracle) {
  Rng rng(19);
  const std::vector<TopologySpec> specs{topologies::chain(3), topologies::chain(4), topologies::chain(5),
                                        topologies::star(3)};
  for (int trial = 0; trial < 40; ++trial) {
    const auto t = validate_topology(specs[trial % specs.size()]);
    const auto src = random_sources(t, rng);
    const auto rho = oracle::global_state(rhos_of(src));
    const auto sc = make_scenario(t, src, random_obs(SubsystemLayout(t), rng));
    for (const auto& set : independent_sets(t, 2)) {
      const auto r = evaluate_S(sc, set);
      const auto o = oracle::bell(t, rho, sc.observables, set);
      EXPECT_NEAR(r.I, o.I, 1e-10);
      EXPECT_NEAR(r.J, o.J, 1e-10);
    }
  }
}

TEST(Correlation, SingletZZ) {
  const auto t = chain(2);
  auto sc = make_scenario(t, singlets(t), {{pauli::z(), pauli::x()}, {pauli::z(), pauli::x()}});
  const auto p = correlation(sc, {0, 0});
  ASSERT_EQ(p.size(), 4u);
  EXPECT_NEAR(p[0], 0.0, 1e-14);
  EXPECT_NEAR(p[1], 0.5, 1e-14);
  EXPECT_NEAR(p[2], 0.5, 1e-14);
  EXPECT_NEAR(p[3], 0.0, 1e-14);
}

TEST(Correlation, NormalizedPositiveParityAndOracle) {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto t = chain(trial % 2 ? 3 : 4);
    const auto src = random_sources(t, rng);
    const auto rho = oracle::global_state(rhos_of(src));
    const auto sc = make_scenario(t, src, random_obs(SubsystemLayout(t), rng));
    const int m = t.party_count();
    for (unsigned x = 0; x < (1u << m); ++x) {
      std::vector<int> in(m);
      for (int i = 0; i < m; ++i) in[i] = (x >> i) & 1u;
      const auto p = correlation(sc, in);
      const auto q = oracle::correlation(t, rho, sc.observables, in);
      double sum = 0.0, parity = 0.0;
      for (std::size_t a = 0; a < p.size(); ++a) {
        EXPECT_GE(p[a], -1e-10);
        EXPECT_NEAR(p[a], q[a], 1e-10);
        sum += p[a];
        parity += (__builtin_popcount(static_cast<unsigned>(a)) % 2 ? -1.0 : 1.0) * p[a];
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
      std::vector<LocalFactor> f;
      for (int i = 0; i < m; ++i) f.push_back({i, sc.observables[i][in[i]]});
      EXPECT_NEAR(parity, expectation(sc.state, f), 1e-9);
    }
  }
}

TEST(Environment, ReproducesTerms) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = validate_topology(trial % 2 ? topologies::chain(4) : topologies::star(3));
    const auto sc = make_scenario(t, random_sources(t, rng), random_obs(SubsystemLayout(t), rng));
    const auto set = default_independent_sets(t).front();
    const auto direct = bell_terms(sc.state, sc.observables, set);
    for (int p = 0; p < t.party_count(); ++p) {
      const auto env = party_environment(sc.state, sc.observables, set, p);
      const auto via = terms_from_environment(env, sc.observables[p][0], sc.observables[p][1]);
      EXPECT_NEAR(via.I, direct.I, 1e-11);
      EXPECT_NEAR(via.J, direct.J, 1e-11);
      const int d = static_cast<int>(sc.layout->local_dim(p));
      const Matrix a0 = random_dichotomic(d, rng), a1 = random_dichotomic(d, rng);
      auto obs = sc.observables;
      obs[p] = {a0, a1};
      const auto fresh = bell_terms(sc.state, obs, set);
      const auto moved = terms_from_environment(env, a0, a1);
      EXPECT_NEAR(moved.I, fresh.I, 1e-11);
      EXPECT_NEAR(moved.J, fresh.J, 1e-11);
    }
  }
}

TEST(Certificate, CanonicalPasses) {
  const auto t = chain(3);
  const auto sc = make_scenario(t, singlets(t), bilocal_observables(), PartySet{0, 2});
  const auto c = max_violation_certificate(sc, 64, 0, 1e-10);
  EXPECT_TRUE(c.pass);
  EXPECT_LE(c.max_residual(), 1e-12);
  ASSERT_EQ(c.parties.size(), 2u);
  for (const auto& pc : c.parties) {
    EXPECT_TRUE(pc.m2_structure);
    EXPECT_EQ(pc.algebra_dim, 4);
    EXPECT_FALSE(pc.op_anti.has_value());
  }
  EXPECT_FALSE(c.faithful);
  EXPECT_EQ(c.probes, 64);
}

TEST(Certificate, BrokenPairFails) {
  const auto t = chain(3);
  auto obs = bilocal_observables();
  obs[0][1] = pauli::z();
  const auto sc = make_scenario(t, singlets(t), obs, PartySet{0, 2});
  const auto c = max_violation_certificate(sc, 64, 0, 1e-10);
  EXPECT_FALSE(c.pass);
  EXPECT_GT(c.parties[0].r_anti, 0.1);
  EXPECT_FALSE(c.parties[0].m2_structure);
}

TEST(Certificate, IdentityFailsWithAntiTwo) {
  const auto t = chain(3);
  auto sc = make_scenario(t, singlets(t), bilocal_observables(), PartySet{0, 2});
  sc.observables = identity_observables(*sc.layout);
  const auto c = max_violation_certificate(sc, 16, 0, 1e-10);
  EXPECT_FALSE(c.pass);
  for (const auto& pc : c.parties) EXPECT_NEAR(pc.r_anti, 2.0, 1e-12);
}

TEST(Certificate, FaithfulStateReportsOperatorResiduals) {
  const auto t = chain(3);
  SourceParams p;
  p.visibility = 0.9;
  std::vector<SourceState> w{make_source_state("S1", SourceKind::Werner, p, {2, 2}),
                             make_source_state("S2", SourceKind::Werner, p, {2, 2})};
  const auto sc = make_scenario(t, w, bilocal_observables(), PartySet{0, 2});
  const auto c = max_violation_certificate(sc, 16, 0, 1e-10);
  EXPECT_TRUE(c.faithful);
  for (const auto& pc : c.parties) {
    ASSERT_TRUE(pc.op_anti.has_value());
    EXPECT_LE(*pc.op_anti, 1e-12);
  }
  EXPECT_TRUE(c.pass);
  EXPECT_NEAR(evaluate_S(sc).S, 0.9 * kTsirelson, 1e-12);
}

TEST(Certificate, SoundOnCanonicalScenarios) {
  for (const auto& spec : {topologies::chain(3), topologies::chain(5), topologies::star(3), topologies::star(4)}) {
    const auto t = validate_topology(spec);
    for (const auto& set : default_independent_sets(t)) {
      const auto sc = canonical_optimal_scenario(t, set);
      const auto c = max_violation_certificate(sc, 32, 4, 1e-10);
      EXPECT_TRUE(c.pass);
      EXPECT_NEAR(evaluate_S(sc).S, kTsirelson, 1e-8);
    }
  }
}

TEST(AbelianEffects, Examples) {
  const Matrix a0 = pauli::z(), a1 = pauli::identity();
  const auto e = abelian_effects(a0, a1, 1e-12);
  EXPECT_LT((e.pp - Matrix(Eigen::Vector2cd(1, 0).asDiagonal())).norm(), 1e-15);
  EXPECT_LT(e.mm.norm(), 1e-15);
  EXPECT_LE(e.identity_residual(a0, a1), 1e-15);
  const auto zz = abelian_effects(pauli::z(), pauli::z(), 1e-12);
  EXPECT_LT(zz.pm.norm(), 1e-15);
  EXPECT_LT(zz.mp.norm(), 1e-15);
  EXPECT_LT((zz.pp + zz.mm - pauli::identity()).norm(), 1e-15);
  EXPECT_EQ(code_of([] { abelian_effects(pauli::x(), pauli::z(), 1e-9); }), ErrorCode::NotCommuting);
}

TEST(AbelianEffects, RandomCommutingContractions) {
  Rng rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 4;
    const Matrix v = random_unitary(d, rng);
    RealVector s0(d), s1(d);
    for (int k = 0; k < d; ++k) {
      s0[k] = u(rng);
      s1[k] = u(rng);
    }
    const Matrix a0 = v * s0.cast<Complex>().asDiagonal() * v.adjoint();
    const Matrix a1 = v * s1.cast<Complex>().asDiagonal() * v.adjoint();
    const auto e = abelian_effects(a0, a1, 1e-9);
    EXPECT_LE(e.identity_residual(a0, a1), 1e-12);
  }
}

TEST(SineCheck, Examples) {
  const auto a = geo_mean_sine_check({M_PI / 4, M_PI / 4});
  EXPECT_NEAR(a.lhs, std::sin(M_PI / 4), 1e-15);
  EXPECT_NEAR(a.rhs, std::sin(M_PI / 4), 1e-15);
  const auto b = geo_mean_sine_check({M_PI / 6, M_PI / 2});
  EXPECT_NEAR(b.lhs, std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(b.rhs, std::sin(M_PI / 3), 1e-15);
  const auto c = geo_mean_sine_check({M_PI / 3, M_PI / 3, M_PI / 3});
  EXPECT_NEAR(c.lhs, c.rhs, 1e-15);
  EXPECT_EQ(code_of([] { geo_mean_sine_check({0.0, 1.0}); }), ErrorCode::ThetaOutOfRange);
  EXPECT_EQ(code_of([] { geo_mean_sine_check({1.0, M_PI}); }), ErrorCode::ThetaOutOfRange);
  EXPECT_EQ(code_of([] { geo_mean_sine_check({1.0}); }), ErrorCode::ThetaOutOfRange);
}

TEST(RootAbs, ZeroAndSign) {
  EXPECT_EQ(root_abs(0.0, 3), 0.0);
  EXPECT_NEAR(root_abs(-8.0, 3), 2.0, 1e-15);
  const auto r = make_bell_report(4.0, -1.0, {0, 2});
  EXPECT_NEAR(r.S, 3.0, 1e-15);
  EXPECT_FALSE(r.tsirelson_satisfied);
}
