#include <gtest/gtest.h>

#include "qnet/verify.hpp"
#include "test_util.hpp"

using namespace qnet;

TEST(Verify, EverySuitePassesSmall) {
  const auto r = run_verify("all", 200, 5);
  ASSERT_EQ(r.suites.size(), suite_names().size());
  for (const auto& s : r.suites) {
    EXPECT_TRUE(s.pass) << s.name << " worst " << s.worst_residual;
    EXPECT_EQ(s.passed, 200) << s.name;
  }
  EXPECT_TRUE(r.pass);
}

TEST(Verify, TrigTenThousand) {
  const auto r = run_verify("trig", 10000, 7);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.suites[0].passed, 10000);
  EXPECT_LE(r.suites[0].worst_residual, 1e-12);
}

TEST(Verify, SeedDeterminism) {
  const auto a = verify_tsirelson(60, 3);
  const auto b = verify_tsirelson(60, 3);
  EXPECT_EQ(a.worst_residual, b.worst_residual);
  const auto c = verify_tsirelson(60, 4);
  EXPECT_NE(a.worst_residual, c.worst_residual);
}

TEST(Verify, RandomScenariosViolateClassicalBound) {
  // Random entangled scenarios do exceed the classical bound sometimes, so the
  // separable and abelian suites are discriminating.
  const auto t = verify_tsirelson(300, 1);
  EXPECT_GT(t.worst_residual + 2.8284271247461903, 2.0);
}

TEST(Verify, Errors) {
  EXPECT_EQ(code_of([] { run_verify("nope", 10, 0); }), ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] { run_verify("trig", 0, 0); }), ErrorCode::ValidationError);
}
