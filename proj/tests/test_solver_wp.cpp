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

namespace {

std::vector<std::pair<Q, Q>> points_of(const ParametricCurve<Q>& c) {
  std::vector<std::pair<Q, Q>> out;
  for (const auto& pt : c.points) out.emplace_back(pt.mass, pt.cost);
  return out;
}

}  // namespace

TEST(WassersteinP, Examples) {
  auto s2 = genwass::testing::two_point<Q>(2);
  auto mu = measure<Q>(s2, {q(1, 3), 2});
  EXPECT_EQ(wasserstein_p(mu, mu, 2.0), 0);
  EXPECT_EQ(wasserstein_p(DiscreteMeasure<Q>::dirac(s2, 0), DiscreteMeasure<Q>::dirac(s2, 1), 2.0), 2);
  auto s1 = genwass::testing::two_point<Q>(1);
  EXPECT_EQ(wasserstein_p(measure<Q>(s1, {1, 1}), measure<Q>(s1, {2, 0}), 1.0), 1);
}

TEST(WassersteinP, MassMismatch) {
  auto s = genwass::testing::two_point<Q>(1);
  try {
    wasserstein_p(measure<Q>(s, {1, 1}), measure<Q>(s, {1, 0}), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MassMismatch);
  }
  auto f = genwass::testing::two_point<double>(1.0);
  EXPECT_NO_THROW(wasserstein_p(measure<double>(f, {0.1 + 0.2, 0}), measure<double>(f, {0, 0.3}), 1.0));
}

TEST(ParametricCurve, Examples) {
  auto s = genwass::testing::two_point<Q>(3);
  auto single = parametric_transport_curve(DiscreteMeasure<Q>::dirac(s, 0), DiscreteMeasure<Q>::dirac(s, 1), 1.0);
  EXPECT_EQ(points_of(single), (std::vector<std::pair<Q, Q>>{{0, 0}, {1, 3}}));

  // x1 and x2 at distances 1 and 2 from y, and 3 from each other
  auto tri = validate_metric<Q>({"x1", "x2", "y"}, {{0, 3, 1}, {3, 0, 2}, {1, 2, 0}});
  auto c = parametric_transport_curve(measure<Q>(tri, {1, 1, 0}), measure<Q>(tri, {0, 0, 2}), 1.0);
  EXPECT_EQ(points_of(c), (std::vector<std::pair<Q, Q>>{{0, 0}, {1, 1}, {2, 3}}));

  auto empty = parametric_transport_curve(DiscreteMeasure<Q>::zero(tri), measure<Q>(tri, {0, 0, 2}), 1.0);
  EXPECT_EQ(points_of(empty), (std::vector<std::pair<Q, Q>>{{0, 0}}));
}

TEST(ParametricCurve, SlopesIncreaseAndEndAtMinMass) {
  verification::Rng rng(43);
  for (int k = 0; k < 150; ++k) {
    auto s = verification::random_graph_metric<Q>(rng, 6, 7, 2);
    auto mu = verification::random_measure<Q>(rng, s, 6, 3);
    auto nu = verification::random_measure<Q>(rng, s, 6, 3);
    const double p = static_cast<double>(verification::uniform_int(rng, 1, 3));
    auto c = parametric_transport_curve(mu, nu, p);
    ASSERT_FALSE(c.points.empty());
    EXPECT_EQ(c.points.front().mass, 0);
    EXPECT_EQ(c.points.back().mass, std::min(mu.mass(), nu.mass()));
    Q last_slope(-1);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      const Q dm = c.points[i].mass - c.points[i - 1].mass;
      ASSERT_GT(dm, 0);
      const Q slope = (c.points[i].cost - c.points[i - 1].cost) / dm;
      EXPECT_GE(slope, last_slope);
      last_slope = slope;
    }
  }
}

TEST(SolveWp, Examples) {
  auto near = genwass::testing::two_point<Q>(1);
  auto r = solve_wp(DiscreteMeasure<Q>::dirac(near, 0), DiscreteMeasure<Q>::dirac(near, 1), params<Q>(1, 1, 2.0));
  EXPECT_EQ(r.value, 1);
  EXPECT_EQ(r.transported_mass, 1);
  EXPECT_FALSE(r.potentials.has_value());
  EXPECT_FALSE(r.certificate.has_value());

  auto far = genwass::testing::two_point<Q>(3);
  auto f = solve_wp(DiscreteMeasure<Q>::dirac(far, 0), DiscreteMeasure<Q>::dirac(far, 1), params<Q>(1, 1, 2.0));
  EXPECT_EQ(f.value, 2);
  EXPECT_EQ(f.transported_mass, 0);

  auto line = genwass::testing::line<Q>({0, 1, 4});
  auto mu = measure<Q>(line, {q(1, 2), 3, q(5, 4)});
  for (double p : {1.0, 2.0, 3.0}) {
    auto z = solve_wp(mu, DiscreteMeasure<Q>::zero(line), params<Q>(q(3, 2), 2, p));
    EXPECT_EQ(z.value, q(3, 2) * mu.mass());
  }
}

TEST(SolveWp, PlanMarginalsAreSubmeasures) {
  verification::Rng rng(47);
  for (int k = 0; k < 100; ++k) {
    auto s = verification::random_graph_metric<Q>(rng, 5, 6, 2);
    auto mu = verification::random_measure<Q>(rng, s, 6, 2);
    auto nu = verification::random_measure<Q>(rng, s, 6, 2);
    auto r = solve_wp(mu, nu, params<Q>(1, 1, 2.0));
    EXPECT_TRUE(is_submeasure(r.plan.source_marginal(), mu));
    EXPECT_TRUE(is_submeasure(r.plan.target_marginal(), nu));
    EXPECT_EQ(r.plan.mass(), r.transported_mass);
    EXPECT_EQ(r.destroyed_mass, mu.mass() - r.transported_mass);
    EXPECT_EQ(r.created_mass, nu.mass() - r.transported_mass);
  }
}

TEST(SolveWp, PEqualOneMatchesW1Exactly) {
  verification::Rng rng(53);
  for (int k = 0; k < 150; ++k) {
    auto s = verification::random_graph_metric<Q>(rng, 6, 8, 2);
    auto mu = verification::random_measure<Q>(rng, s, 7, 3);
    auto nu = verification::random_measure<Q>(rng, s, 7, 3);
    auto p = params<Q>(q(verification::uniform_int(rng, 1, 5), 2), q(verification::uniform_int(rng, 1, 5), 2));
    EXPECT_EQ(solve_wp(mu, nu, p).value, solve_w1(mu, nu, p).value);
  }
}

TEST(SolveWp, HugeADegeneratesToWassersteinP) {
  verification::Rng rng(59);
  for (int k = 0; k < 60; ++k) {
    auto s = verification::random_graph_metric<Q>(rng, 5, 6, 2);
    auto mu = verification::random_measure<Q>(rng, s, 5, 1, 0.0);
    std::vector<Q> w = mu.weights();
    std::shuffle(w.begin(), w.end(), rng);
    auto nu = measure(s, w);
    const double p = static_cast<double>(verification::uniform_int(rng, 1, 3));
    const Q b = q(verification::uniform_int(rng, 1, 4), 2);
    const Q a = b * s.diameter() * mu.mass() + 1;
    auto r = solve_wp(mu, nu, params<Q>(a, b, p));
    EXPECT_EQ(r.destroyed_mass, 0);
    const double expected = to_double(b * wasserstein_p(mu, nu, p));
    EXPECT_NEAR(to_double(r.value), expected, 1e-12 * (1 + expected));
  }
}

TEST(SolveWp, NondecreasingInAAndB) {
  verification::Rng rng(61);
  for (int k = 0; k < 100; ++k) {
    auto s = verification::random_graph_metric<Q>(rng, 5, 6, 2);
    auto mu = verification::random_measure<Q>(rng, s, 6, 2);
    auto nu = verification::random_measure<Q>(rng, s, 6, 2);
    const double p = static_cast<double>(verification::uniform_int(rng, 1, 3));
    const Q a = q(verification::uniform_int(rng, 1, 6), 2);
    const Q b = q(verification::uniform_int(rng, 1, 6), 2);
    const Q base = solve_wp(mu, nu, params<Q>(a, b, p)).value;
    EXPECT_GE(solve_wp(mu, nu, params<Q>(a + q(1, 3), b, p)).value, base);
    EXPECT_GE(solve_wp(mu, nu, params<Q>(a, b + q(1, 3), p)).value, base);
  }
}

TEST(SolveWp, AgreesWithOracle) {
  verification::Rng rng(67);
  for (int k = 0; k < 200; ++k) {
    auto s = verification::random_graph_metric<Q>(rng, static_cast<std::size_t>(verification::uniform_int(rng, 1, 3)), 5);
    auto mu = verification::random_measure<Q>(rng, s, 3, 1);
    auto nu = verification::random_measure<Q>(rng, s, 3, 1);
    const double p = static_cast<double>(verification::uniform_int(rng, 1, 3));
    auto prm = params<Q>(verification::pick(rng, std::vector<Q>{q(1, 2), 1, 2}),
                         verification::pick(rng, std::vector<Q>{q(1, 2), 1, 2}), p);
    const Q mine = solve(mu, nu, prm).value;
    const Q brute = oracle::brute_force_value(mu, nu, prm);
    if (p == 1.0) {
      EXPECT_EQ(mine, brute);
    } else {
      EXPECT_NEAR(to_double(mine), to_double(brute), 1e-9 * (1 + to_double(brute)));
    }
  }
}
