#include <gtest/gtest.h>

#include "genwass/oracle.hpp"
#include "genwass/solver_w1.hpp"
#include "genwass/solver_wp.hpp"
#include "genwass/verification.hpp"
#include "helpers.hpp"

using namespace genwass;
using genwass::testing::measure;
using genwass::testing::params;
using genwass::testing::q;
using genwass::testing::Q;

TEST(SolveW1, UnitDistanceShipsEverything) {
  auto s = genwass::testing::two_point<Q>(1);
  auto mu = DiscreteMeasure<Q>::dirac(s, 0);
  auto nu = DiscreteMeasure<Q>::dirac(s, 1);
  auto r = solve_w1(mu, nu, params<Q>(1, 1));
  EXPECT_EQ(r.value, 1);
  EXPECT_EQ(r.plan.gamma(0, 1), 1);
  EXPECT_EQ(r.plan.mass(), 1);
  EXPECT_EQ(r.transported_mass, 1);
  EXPECT_EQ(r.destroyed_mass, 0);
  EXPECT_EQ(r.created_mass, 0);
  EXPECT_EQ(*r.duality_gap, 0);
  EXPECT_EQ(r.value, oracle::brute_force_value(mu, nu, params<Q>(1, 1)));
}

TEST(SolveW1, FarPointsDestroyAndCreate) {
  auto s = genwass::testing::two_point<Q>(3);
  auto mu = DiscreteMeasure<Q>::dirac(s, 0);
  auto nu = DiscreteMeasure<Q>::dirac(s, 1);
  auto r = solve_w1(mu, nu, params<Q>(1, 1));
  EXPECT_EQ(r.value, 2);
  EXPECT_EQ(r.plan.mass(), 0);
  EXPECT_EQ(r.destroyed_mass, 1);
  EXPECT_EQ(r.created_mass, 1);
  EXPECT_EQ(r.value, oracle::brute_force_value(mu, nu, params<Q>(1, 1)));
}

TEST(SolveW1, EmptyTargetCostsAMassOfSource) {
  auto s = genwass::testing::line<Q>({0, 2, 5});
  auto mu = measure<Q>(s, {q(3, 2), 0, 2});
  auto r = solve_w1(mu, DiscreteMeasure<Q>::zero(s), params<Q>(q(5, 4), 1));
  EXPECT_EQ(r.value, q(5, 4) * q(7, 2));
  EXPECT_EQ(r.plan.mass(), 0);
}

TEST(SolveW1, TiesDoNotShip) {
  // b d = 2a exactly: shipping and not shipping cost the same; the plan stays empty
  auto s = genwass::testing::two_point<Q>(2);
  auto r = solve_w1(DiscreteMeasure<Q>::dirac(s, 0), DiscreteMeasure<Q>::dirac(s, 1), params<Q>(1, 1));
  EXPECT_EQ(r.value, 2);
  EXPECT_EQ(r.plan.mass(), 0);
}

TEST(SolveW1, NeverShipsAlongArcsCostlierThanTwoA) {
  verification::Rng rng(17);
  for (int k = 0; k < 200; ++k) {
    auto s = verification::random_graph_metric<Q>(rng, 6, 9, 2);
    auto mu = verification::random_measure<Q>(rng, s, 8, 3);
    auto nu = verification::random_measure<Q>(rng, s, 8, 3);
    auto p = params<Q>(q(verification::uniform_int(rng, 1, 6), 2), q(verification::uniform_int(rng, 1, 4), 2));
    auto r = solve_w1(mu, nu, p);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j)
        if (p.b * s(i, j) >= 2 * p.a) {
          EXPECT_EQ(r.plan.gamma(i, j), 0);
        }
    const Q m = r.plan.mass();
    EXPECT_EQ(r.value, p.a * (mu.mass() - m) + p.a * (nu.mass() - m) + p.b * r.plan.cost(1.0));
    EXPECT_GE(r.value, 0);
    EXPECT_LE(r.value, p.a * (mu.mass() + nu.mass()));
    check_submarginal(r.plan, mu, nu, Q(0));
  }
}

TEST(SolveW1, InvalidParams) {
  auto s = genwass::testing::two_point<Q>(1);
  auto z = DiscreteMeasure<Q>::zero(s);
  for (auto p : {params<Q>(0, 1), params<Q>(1, -1), params<Q>(1, 1, 2.0), params<Q>(1, 1, 0.5)}) {
    try {
      solve_w1(z, z, p);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidParams);
    }
  }
}

TEST(SolveW1, SpaceMismatch) {
  auto a = genwass::testing::two_point<Q>(1);
  auto b = genwass::testing::two_point<Q>(2);
  try {
    solve_w1(DiscreteMeasure<Q>::zero(a), DiscreteMeasure<Q>::zero(b), params<Q>(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SpaceMismatch);
  }
}

TEST(SolveW1, MetricAxiomsExact) {
  verification::Rng rng(23);
  for (int k = 0; k < 80; ++k) {
    auto s = verification::random_graph_metric<Q>(rng, 5, 6, 2);
    auto mu = verification::random_measure<Q>(rng, s, 6, 2);
    auto nu = verification::random_measure<Q>(rng, s, 6, 2);
    auto rho = verification::random_measure<Q>(rng, s, 6, 2);
    auto p = params<Q>(q(verification::uniform_int(rng, 1, 4), 2), q(verification::uniform_int(rng, 1, 4), 2));
    auto W = [&](const DiscreteMeasure<Q>& x, const DiscreteMeasure<Q>& y) { return solve_w1(x, y, p).value; };
    EXPECT_EQ(W(mu, nu), W(nu, mu));
    EXPECT_EQ(W(mu, mu), 0);
    if (!(mu == nu)) {
      EXPECT_GT(W(mu, nu), 0);
    }
    EXPECT_LE(W(mu, rho), W(mu, nu) + W(nu, rho));
  }
}

TEST(SolveW1, MidpointAndTranslation) {
  verification::Rng rng(29);
  for (int k = 0; k < 80; ++k) {
    auto s = verification::random_graph_metric<Q>(rng, 5, 6, 2);
    auto mu = verification::random_measure<Q>(rng, s, 6, 2);
    auto nu = verification::random_measure<Q>(rng, s, 6, 2);
    auto eta = verification::random_measure<Q>(rng, s, 6, 3);
    auto p = params<Q>(1, q(3, 2));
    const Q w = solve_w1(mu, nu, p).value;
    auto sigma = (mu + nu).scaled(q(1, 2));
    EXPECT_EQ(solve_w1(mu, sigma, p).value, w / 2);
    EXPECT_EQ(solve_w1(sigma, nu, p).value, w / 2);
    EXPECT_EQ(solve_w1(mu + eta, nu + eta, p).value, w);
  }
}

TEST(SolveW1, IsometryInvariance) {
  verification::Rng rng(31);
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 5;
    auto s = verification::random_graph_metric<Q>(rng, n, 6, 2);
    Permutation perm{0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    // relabelled copy: point i of the copy is point perm[i] of s
    std::vector<std::vector<Q>> d(n, std::vector<Q>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = s(perm[i], perm[j]);
    auto copy = validate_metric<Q>(d);
    auto mu = verification::random_measure<Q>(rng, s, 6, 2);
    auto nu = verification::random_measure<Q>(rng, s, 6, 2);
    std::vector<Q> mu2(n), nu2(n);
    for (std::size_t i = 0; i < n; ++i) {
      mu2[i] = mu[perm[i]];
      nu2[i] = nu[perm[i]];
    }
    auto p = params<Q>(q(3, 2), 1);
    EXPECT_EQ(solve_w1(mu, nu, p).value, solve_w1(measure(copy, mu2), measure(copy, nu2), p).value);
  }
}

TEST(SolveW1, EqualMassBoundedByTransport) {
  verification::Rng rng(37);
  for (int k = 0; k < 60; ++k) {
    auto s = verification::random_graph_metric<Q>(rng, 4, 6);
    auto mu = verification::random_measure<Q>(rng, s, 5, 1, 0.0);
    std::vector<Q> w = mu.weights();
    std::shuffle(w.begin(), w.end(), rng);
    auto nu = measure(s, w);
    auto p = params<Q>(q(verification::uniform_int(rng, 1, 4), 2), 1);
    EXPECT_LE(solve_w1(mu, nu, p).value, p.b * wasserstein_p(mu, nu, 1.0));
  }
}

TEST(SolveW1, FloatModeMatchesExact) {
  verification::Rng rng(41);
  for (int k = 0; k < 100; ++k) {
    auto s = verification::random_graph_metric<Q>(rng, 7, 8, 4);
    auto mu = verification::random_measure<Q>(rng, s, 8, 4);
    auto nu = verification::random_measure<Q>(rng, s, 8, 4);
    auto exact = solve_w1(mu, nu, params<Q>(1, q(1, 2)));
    auto fs = verification::convert_space<double>(s);
    auto flt = solve_w1(verification::convert_measure<double>(fs, mu), verification::convert_measure<double>(fs, nu),
                        params<double>(1.0, 0.5));
    EXPECT_NEAR(flt.value, to_double(exact.value), 1e-9 * (1 + flt.value));
    EXPECT_LE(std::abs(*flt.duality_gap), 1e-9 * (1 + flt.value));
  }
}
