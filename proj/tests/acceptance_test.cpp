// Acceptance run: each criterion is a seeded randomized suite from
// genwass/verification.hpp. One PASS/FAIL line per criterion goes to stdout.
// The seed can be changed with GENWASS_SEED.

#include <gtest/gtest.h>

#include <cstdlib>
#include <iostream>

#include "genwass/verification.hpp"

namespace {

std::uint64_t seed() {
  if (const char* env = std::getenv("GENWASS_SEED")) return std::strtoull(env, nullptr, 10);
  return 20240101;
}

void report(const genwass::verification::CriterionResult& r) {
  std::cout << genwass::verification::format_result(r) << std::endl;
  EXPECT_TRUE(r.passed) << r.detail;
}

}  // namespace

namespace v = genwass::verification;

TEST(Acceptance, Criterion1OracleEquivalence) { report(v::criterion_oracle(seed())); }
TEST(Acceptance, Criterion2StrongDuality) { report(v::criterion_duality(seed())); }
TEST(Acceptance, Criterion3FlatMetricEquality) { report(v::criterion_flat(seed())); }
TEST(Acceptance, Criterion4MetricAxiomsAndMidpoint) { report(v::criterion_metric(seed())); }
TEST(Acceptance, Criterion5TranslationInvariance) { report(v::criterion_translation(seed())); }
TEST(Acceptance, Criterion6OptimalityCertificate) { report(v::criterion_certificate(seed())); }
TEST(Acceptance, Criterion7QuotientIsometry) { report(v::criterion_quotient(seed())); }
TEST(Acceptance, Criterion8GHStability) { report(v::criterion_gh(seed())); }
TEST(Acceptance, Criterion9CTransform) { report(v::criterion_c_transform(seed())); }

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  std::cout << "acceptance seed " << seed() << std::endl;
  return RUN_ALL_TESTS();
}
