#include <gtest/gtest.h>

#include "genwass/duality.hpp"
#include "genwass/solver_w1.hpp"
#include "genwass/verification.hpp"
#include "helpers.hpp"

using namespace genwass;
using genwass::testing::measure;
using genwass::testing::params;
using genwass::testing::q;
using genwass::testing::Q;

namespace {

struct UnitPair {
  FiniteMetricSpace<Q> space = genwass::testing::two_point<Q>(1);
  DiscreteMeasure<Q> mu = DiscreteMeasure<Q>::dirac(space, 0);
  DiscreteMeasure<Q> nu = DiscreteMeasure<Q>::dirac(space, 1);
  EntropyParams<Q> prm = params<Q>(1, 1);

  DualPotentials<Q> pots(std::vector<Q> phi1, std::vector<Q> phi2) const {
    return DualPotentials<Q>{std::move(phi1), std::move(phi2), prm};
  }
  TransportPlan<Q> shipped() const {
    TransportPlan<Q> plan{space, DenseMatrix<Q>(2, 2)};
    plan.gamma(0, 1) = 1;
    return plan;
  }
};

}  // namespace

TEST(TruncateI, Examples) {
  auto mid = truncate_I<Q>(q(1, 2), 1);
  ASSERT_TRUE(mid.is_finite());
  EXPECT_EQ(mid.value, q(1, 2));
  EXPECT_EQ(truncate_I<Q>(2, 1).value, 1);
  EXPECT_FALSE(truncate_I<Q>(-2, 1).is_finite());
  // the endpoints of [-a, a] are kept
  EXPECT_EQ(truncate_I<Q>(-1, 1).value, -1);
  EXPECT_EQ(truncate_I<Q>(1, 1).value, 1);
}

TEST(EvaluateDual, ConstantHalfPair) {
  verification::Rng rng(71);
  for (int k = 0; k < 30; ++k) {
    auto s = verification::random_graph_metric<Q>(rng, 5, 6);
    auto mu = verification::random_measure<Q>(rng, s, 5, 3);
    auto nu = verification::random_measure<Q>(rng, s, 5, 3);
    const Q a = q(verification::uniform_int(rng, 1, 6), 2);
    DualPotentials<Q> pots{std::vector<Q>(5, -a / 2), std::vector<Q>(5, -a / 2), params<Q>(a, 1)};
    auto ev = evaluate_dual(pots, mu, nu);
    EXPECT_TRUE(ev.feasible);
    ASSERT_TRUE(ev.objective.is_finite());
    EXPECT_EQ(ev.objective.value, -(a / 2) * (mu.mass() + nu.mass()));
  }
}

TEST(EvaluateDual, ComplementaryPairOnUnitDistance) {
  UnitPair u;
  auto ev = evaluate_dual(u.pots({0, -1}, {-1, 1}), u.mu, u.nu);
  EXPECT_TRUE(ev.feasible);
  EXPECT_EQ(ev.objective.value, 1);
}

TEST(EvaluateDual, ConstantAIsInfeasible) {
  UnitPair u;
  EXPECT_FALSE(evaluate_dual(u.pots({1, 1}, {1, 1}), u.mu, u.nu).feasible);
}

TEST(EvaluateDual, MinusInfinityShortCircuitsOnlyOnCharge) {
  UnitPair u;
  auto charged = evaluate_dual(u.pots({-2, 0}, {0, 0}), u.mu, u.nu);
  EXPECT_FALSE(charged.objective.is_finite());
  auto uncharged = evaluate_dual(u.pots({0, -2}, {0, 0}), u.mu, u.nu);
  EXPECT_TRUE(uncharged.objective.is_finite());
}

TEST(CTransform, Examples) {
  UnitPair u;
  EXPECT_EQ(c_transform<Q>(u.space, {-1, -1}, u.prm), (std::vector<Q>{1, 1}));
  EXPECT_EQ(c_transform<Q>(u.space, {1, 0}, u.prm), (std::vector<Q>{-1, 0}));
}

TEST(CTransform, DoubleTransformNegatesLipschitzBoxedInputs) {
  verification::Rng rng(73);
  for (int k = 0; k < 100; ++k) {
    auto s = verification::random_graph_metric<Q>(rng, 6, 6, 2);
    auto prm = params<Q>(q(verification::uniform_int(rng, 1, 6), 2), q(verification::uniform_int(rng, 1, 4), 2));
    std::vector<Q> phi(6);
    for (auto& x : phi) x = q(verification::uniform_int(rng, -12, 12), 4);
    auto psi = c_transform(s, phi, prm);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) EXPECT_LE(abs_value<Q>(psi[i] - psi[j]), prm.b * s(i, j));
    bool boxed = true;
    for (const auto& x : psi) boxed = boxed && -prm.a <= x && x <= prm.a;
    if (!boxed) continue;
    auto twice = c_transform(s, psi, prm);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(twice[i], -psi[i]);
  }
}

TEST(CTransform, ImprovesFeasiblePairs) {
  verification::Rng rng(79);
  for (int k = 0; k < 100; ++k) {
    auto s = verification::random_graph_metric<Q>(rng, 6, 6, 2);
    auto mu = verification::random_measure<Q>(rng, s, 6, 2);
    auto nu = verification::random_measure<Q>(rng, s, 6, 2);
    auto prm = params<Q>(q(verification::uniform_int(rng, 1, 6), 2), 1);
    // lower an optimal pair at random: still feasible, usually no longer optimal
    auto pots = *solve_w1(mu, nu, prm).potentials;
    for (auto* phi : {&pots.phi1, &pots.phi2})
      for (auto& x : *phi) x = std::max(Q(-prm.a), Q(x - q(verification::uniform_int(rng, 0, 4), 4)));
    const auto before = evaluate_dual(pots, mu, nu);
    ASSERT_TRUE(before.feasible);
    auto first = c_transform(s, pots.phi2, prm);
    DualPotentials<Q> better{first, c_transform(s, first, prm), prm};
    const auto after = evaluate_dual(better, mu, nu);
    EXPECT_TRUE(after.feasible);
    EXPECT_GE(after.objective.value, before.objective.value);
  }
}

TEST(SolveFlat, Examples) {
  auto far = genwass::testing::two_point<Q>(3);
  auto r = solve_flat(DiscreteMeasure<Q>::dirac(far, 0), DiscreteMeasure<Q>::dirac(far, 1), params<Q>(1, 1));
  EXPECT_EQ(r.value, 2);
  EXPECT_EQ(r.witness.f, (std::vector<Q>{1, -1}));

  UnitPair u;
  auto near = solve_flat(u.mu, u.nu, u.prm);
  EXPECT_EQ(near.value, 1);
  EXPECT_TRUE(is_flat_feasible(u.space, near.witness.f, u.prm, Q(0)));
  EXPECT_EQ(near.witness.f[0] - near.witness.f[1], 1);

  auto mu = measure<Q>(far, {q(2, 3), 5});
  EXPECT_EQ(solve_flat(mu, mu, u.prm).value, 0);
}

TEST(SolveFlat, AntisymmetricWitnessIsDualFeasible) {
  verification::Rng rng(83);
  for (int k = 0; k < 80; ++k) {
    auto s = verification::random_graph_metric<Q>(rng, 5, 6, 2);
    auto mu = verification::random_measure<Q>(rng, s, 6, 2);
    auto nu = verification::random_measure<Q>(rng, s, 6, 2);
    auto prm = params<Q>(q(verification::uniform_int(rng, 1, 6), 2), q(verification::uniform_int(rng, 1, 4), 2));
    auto flat = solve_flat(mu, nu, prm);
    std::vector<Q> minus_f;
    for (const auto& x : flat.witness.f) minus_f.push_back(-x);
    auto ev = evaluate_dual(DualPotentials<Q>{flat.witness.f, minus_f, prm}, mu, nu);
    EXPECT_TRUE(ev.feasible);
    EXPECT_EQ(ev.objective.value, flat.value);
    EXPECT_EQ(flat.value, solve_w1(mu, nu, prm).value);
  }
}

TEST(VerifyOptimality, UnitDistancePasses) {
  UnitPair u;
  auto cert = verify_optimality(u.mu, u.nu, u.prm, u.shipped(), u.pots({0, -1}, {-1, 1}), Q(0));
  EXPECT_TRUE(cert.passed());
  EXPECT_TRUE(cert.violations.empty());
}

TEST(VerifyOptimality, SlackOnShippedPairFailsConditionTwo) {
  UnitPair u;
  auto cert = verify_optimality(u.mu, u.nu, u.prm, u.shipped(), u.pots({0, -1}, {-1, q(1, 2)}), Q(0));
  EXPECT_FALSE(cert.passed());
  EXPECT_FALSE(cert.conditions[1]);
  ASSERT_FALSE(cert.violations.empty());
  EXPECT_EQ(cert.violations.front().condition, 2);
  EXPECT_EQ(cert.violations.front().i, 0u);
  EXPECT_EQ(cert.violations.front().j, 1u);
}

TEST(VerifyOptimality, DiagonalPlanWithZeroPotentials) {
  auto s = genwass::testing::line<Q>({0, 2, 3});
  auto mu = measure<Q>(s, {1, q(1, 2), 2});
  TransportPlan<Q> plan{s, DenseMatrix<Q>(3, 3)};
  for (std::size_t i = 0; i < 3; ++i) plan.gamma(i, i) = mu[i];
  DualPotentials<Q> zero{std::vector<Q>(3, Q(0)), std::vector<Q>(3, Q(0)), params<Q>(1, 1)};
  EXPECT_TRUE(verify_optimality(mu, mu, params<Q>(1, 1), plan, zero, Q(0)).passed());
}

TEST(VerifyOptimality, RejectsInfeasibleInputs) {
  UnitPair u;
  EXPECT_THROW(verify_optimality(u.mu, u.nu, u.prm, u.shipped(), u.pots({1, 1}, {1, 1}), Q(0)), Error);
  auto over = u.shipped();
  over.gamma(0, 1) = 2;
  try {
    verify_optimality(u.mu, u.nu, u.prm, over, u.pots({0, -1}, {-1, 1}), Q(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleInputs);
  }
}

TEST(VerifyOptimality, SolverOutputAlwaysCertifies) {
  verification::Rng rng(89);
  for (int k = 0; k < 150; ++k) {
    auto s = verification::random_graph_metric<Q>(rng, 6, 8, 2);
    auto mu = verification::random_measure<Q>(rng, s, 6, 4);
    auto nu = verification::random_measure<Q>(rng, s, 6, 4);
    auto prm = params<Q>(q(verification::uniform_int(rng, 1, 6), 2), q(verification::uniform_int(rng, 1, 4), 2));
    auto r = solve_w1(mu, nu, prm);
    EXPECT_TRUE(verify_optimality(mu, nu, prm, r.plan, *r.potentials, Q(0)).passed());
  }
}
