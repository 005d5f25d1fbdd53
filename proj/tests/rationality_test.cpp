#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bribery/error.hpp"
#include "bribery/model.hpp"
#include "bribery/rationality.hpp"

namespace bribery {
namespace {

constexpr double kF = 6.25;

TEST(BasicFormula, WorkedExample) {
  const double expected[] = {-2.148, 5.713, 23.06, 62.95, 155.70, 371.90, 876.27};
  for (int i = 0; i <= 6; ++i) {
    const auto q = min_bribe_basic(i, 0.1, 0.2, 0.8, kF, "m");
    ASSERT_TRUE(q.persuadable());
    EXPECT_NEAR(*q.min_bribe, expected[i], 0.01) << "state " << i;
    EXPECT_EQ(q.formula, BribeFormula::kBasic);
  }
}

TEST(BasicFormula, Validation) {
  EXPECT_THROW(min_bribe_basic(1, 0.8, 0.2, 0.8, kF), Error);   // P_m == lambda
  EXPECT_THROW(min_bribe_basic(1, 0.1, 0.2, 0.7, kF), Error);   // mu + lambda != 1
  EXPECT_THROW(min_bribe_basic(-1, 0.1, 0.2, 0.8, kF), Error);
  EXPECT_THROW(min_bribe_basic(1, 0.1, 0.2, 0.8, 0.0), Error);
}

TEST(BasicFormula, BiggerMinersNeedLessProperty) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int violations = 0;
  for (int t = 0; t < 10000; ++t) {
    const double mu = 0.05 + 0.4 * unit(gen);
    const double lambda = 1.0 - mu;
    const int i = static_cast<int>(unit(gen) * 9);
    double a = 1e-4 + 0.9 * lambda * unit(gen);
    double b = 1e-4 + 0.9 * lambda * unit(gen);
    if (std::abs(a - b) < 1e-6) continue;
    if (a < b) std::swap(a, b);
    const double big = *min_bribe_basic(i, a, mu, lambda, kF).min_bribe;
    const double small = *min_bribe_basic(i, b, mu, lambda, kF).min_bribe;
    if (!(big < small)) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

TEST(BasicFormula, MultiplierKeepsOrderWhereQuotesRound) {
  // Both quotes round to -F here, the multipliers still differ.
  const double mu = 0.484258, lambda = 1.0 - mu;
  EXPECT_EQ(basic_threshold(8, 0.506778675, mu, lambda, kF), -kF);
  EXPECT_EQ(basic_threshold(8, 0.502950327, mu, lambda, kF), -kF);
  EXPECT_LT(basic_multiplier(8, 0.506778675, mu, lambda),
            basic_multiplier(8, 0.502950327, mu, lambda));
  EXPECT_NEAR(basic_multiplier(6, 0.1, 0.2, 0.8) * kF - kF, 876.265, 1e-3);
}

TEST(BasicFormula, AffineInReward) {
  for (int i = 0; i <= 6; ++i) {
    const double r1 = basic_threshold(i, 0.1284, 0.2123, 0.7877, 1.0);
    for (double f : {25.0, 12.5, 6.25, 3.125}) {
      const double rf = basic_threshold(i, 0.1284, 0.2123, 0.7877, f);
      EXPECT_NEAR(rf, (r1 + 1.0) * f - f, 1e-9 * std::max(1.0, std::abs(rf)));
    }
  }
}

TEST(GeneralFormula, MatchesBasicUnderConstantPowers) {
  // With the catch-up probabilities of an unbounded race the general test
  // reduces to the basic one.
  const double mu = 0.2, p = 0.1, lambda = 0.8;
  for (int i = 0; i <= 6; ++i) {
    const double p_xs = std::pow((mu + p) / (lambda - p), i + 1);
    const double p_yf = 1.0 - std::pow(mu / lambda, i + 1);
    const auto q = min_bribe_general(i, p, mu, lambda, p_xs, p_yf, kF);
    EXPECT_NEAR(*q.min_bribe, basic_threshold(i, p, mu, lambda, kF), 1e-9);
    EXPECT_EQ(q.formula, BribeFormula::kGeneral);
  }
  EXPECT_FALSE(min_bribe_general(2, p, mu, lambda, 0.0, 0.5, kF).persuadable());
}

TEST(ChooseChain, StrictlyAboveQuote) {
  const BribeQuote q{3, "m", 10.0, BribeFormula::kBasic};
  EXPECT_EQ(choose_chain(10.0, q), ChainChoice::kJoinMain);
  EXPECT_EQ(choose_chain(10.0 + kSatoshi, q), ChainChoice::kJoinFork);
  EXPECT_EQ(choose_chain(1e9, BribeQuote{3, "m", std::nullopt, BribeFormula::kGeneral}),
            ChainChoice::kJoinMain);
}

TEST(EmittedBribe, ClearsThresholdByOneSatoshi) {
  EXPECT_DOUBLE_EQ(emitted_bribe(-3.0), kSatoshi);
  EXPECT_DOUBLE_EQ(emitted_bribe(0.0), kSatoshi);
  EXPECT_DOUBLE_EQ(emitted_bribe(5.0), 5.0 + kSatoshi);
}

// Grid oracle: every power at or above the bisected threshold is persuaded,
// every power below it (by more than the tolerance) is not.
TEST(PersuadableThreshold, AgreesWithGrid) {
  const double mu = 0.2123, lambda = 0.7877;
  for (int i = 0; i <= 6; ++i) {
    for (double bribe : {0.5, 5.0, 25.0, 100.0, 400.0}) {
      const auto t = persuadable_threshold(i, bribe, mu, lambda, kF);
      ASSERT_TRUE(t.has_value());
      for (int g = 1; g < 1000; ++g) {
        const double p = lambda * g / 1000.0;
        const bool persuaded = bribe > basic_threshold(i, p, mu, lambda, kF);
        if (p >= *t) {
          EXPECT_TRUE(persuaded) << i << " " << bribe << " " << p;
        }
        if (p < *t - 1e-8) {
          EXPECT_FALSE(persuaded) << i << " " << bribe << " " << p;
        }
      }
    }
  }
  EXPECT_FALSE(persuadable_threshold(3, -kF, mu, lambda, kF).has_value());
  // A bribe above the zero-power threshold persuades everyone.
  EXPECT_EQ(*persuadable_threshold(0, 100.0, mu, lambda, kF), 0.0);
}

TEST(CrbConstant, VisitWeightedAverageDownToZero) {
  const std::vector<double> visits{1.0, 2.0, 3.0};
  const std::vector<double> required{10.0, 20.0, 30.0};
  EXPECT_DOUBLE_EQ(crb_min_constant(visits, required, 0), 10.0);
  EXPECT_DOUBLE_EQ(crb_min_constant(visits, required, 1), 50.0 / 3.0);
  EXPECT_DOUBLE_EQ(crb_min_constant(visits, required, 2), 140.0 / 6.0);
  EXPECT_THROW(crb_min_constant(visits, required, 3), Error);
}

TEST(StayingCondition, SummedComparison) {
  const std::vector<double> bribes{0.0, 50.0};
  const std::vector<double> p_xs{0.5, 0.2}, p_yf{0.5, 0.8}, mu_i{0.2, 0.2}, lambda_i{0.8, 0.8};
  EXPECT_TRUE(staying_condition(bribes, 0.1, p_xs, p_yf, mu_i, lambda_i, kF));
  const std::vector<double> none{0.0, 0.0}, unlikely{0.05, 0.02};
  EXPECT_FALSE(staying_condition(none, 0.1, unlikely, p_yf, mu_i, lambda_i, kF));
}

}  // namespace
}  // namespace bribery
