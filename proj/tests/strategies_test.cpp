#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bribery/error.hpp"
#include "bribery/rationality.hpp"
#include "bribery/strategies.hpp"
#include "fixtures.hpp"

namespace bribery {
namespace {

using testing::table2_scenario;
using testing::whale_scenario;

TEST(StrategyNames, RoundTrip) {
  for (auto k : {StrategyKind::kBs, StrategyKind::kBff, StrategyKind::kCrb1, StrategyKind::kCrb2,
                 StrategyKind::kGvcAc, StrategyKind::kGvcRac}) {
    EXPECT_EQ(strategy_from_string(to_string(k)), k);
  }
  EXPECT_FALSE(strategy_from_string("whale").has_value());
}

TEST(Bs, WorkedExample) {
  const auto o = run_bs(whale_scenario());
  const double expected[] = {kSatoshi, 5.713, 23.06, 62.95, 155.70, 371.90, 876.27};
  for (int i = 0; i < 7; ++i) EXPECT_NEAR(o.schedule.bribes[i], expected[i], 0.01);
  EXPECT_NEAR(o.single_visit_cost, 1495.6, 0.2);
  EXPECT_NEAR(o.single_visit_recapture.attacker, 997.1, 0.1);
  EXPECT_NEAR(o.single_visit_recapture.target, 498.5, 0.1);
  EXPECT_NEAR(o.single_visit_recapture.others, 0.0, 1e-9);
  EXPECT_NEAR(o.catchup_success, std::pow(0.3 / 0.7, 7), 1e-12);
  for (double p : o.chain.fork_powers()) EXPECT_NEAR(p, 0.3, 1e-15);
  EXPECT_FALSE(o.schedule.committed);
  EXPECT_EQ(o.strategy, StrategyKind::kBs);
}

TEST(Bs, NoBribesAboveConfirmationDepth) {
  const auto o = run_bs(with_horizon(whale_scenario(), 10));
  ASSERT_EQ(o.schedule.bribes.size(), 10u);
  for (int i = 7; i < 10; ++i) {
    EXPECT_EQ(o.schedule.bribes[i], 0.0);
    EXPECT_NEAR(o.chain.fork_power(i), 0.2, 1e-15);
  }
}

TEST(Bs, LowestSuccessOnTable2) {
  const auto s = table2_scenario(4);
  const double bs = run_bs(s).success_prob;
  EXPECT_NEAR(bs, 0.0319, 5e-4);
  EXPECT_LT(bs, run_bff(s).success_prob);
  EXPECT_LT(bs, run_crb(s, CrbVariant::kFromConfirmationDepth).success_prob);
  EXPECT_LT(bs, run_crb(s, CrbVariant::kFromStartState).success_prob);
  EXPECT_LT(bs, optimize_gvc(s, GvcObjective::kAverageCost, GvcSearchOptions{.restarts = 4, .gvc = {}}).outcome.success_prob);
}

TEST(Bs, SuccessFallsWithStartState) {
  double previous = 1.0;
  for (int start = 1; start <= 6; ++start) {
    const double p = run_bs(table2_scenario(start)).success_prob;
    EXPECT_LT(p, previous);
    previous = p;
  }
}

TEST(Bff, TopStateMatchesBsOnLargestMiner) {
  const auto s = table2_scenario(4);
  const auto bff = run_bff(s);
  const auto bs = run_bs(s);  // the target P2 is the largest miner
  EXPECT_DOUBLE_EQ(bff.schedule.bribes[6], bs.schedule.bribes[6]);
}

TEST(Bff, RecruitedPowerGrowsTowardsZero) {
  for (int start = 1; start <= 6; ++start) {
    const auto o = run_bff(table2_scenario(start));
    for (std::size_t i = 1; i < o.chain.size(); ++i) {
      EXPECT_GE(o.chain.fork_power(i - 1), o.chain.fork_power(i));
    }
  }
}

TEST(Bff, Table2SuccessNearSixtyPercent) {
  EXPECT_NEAR(run_bff(table2_scenario(4)).success_prob, 0.60, 0.05);
}

TEST(Bff, DominatesBsOnRandomRosters) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + trial % 8;
    std::vector<Miner> miners;
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      miners.push_back({"M" + std::to_string(k), unit(gen)});
      total += miners.back().power;
    }
    const double mu = 0.1 + 0.25 * unit(gen);
    for (auto& m : miners) m.power *= (1.0 - mu) / total;
    const MinerSet set({"A", mu}, miners);
    for (int start = 1; start <= 6; ++start) {
      const auto s = with_start_state(make_scenario(set, set.miners()[0].id, 6, 1, 6.25), start);
      EXPECT_GE(run_bff(s).success_prob + 1e-12, run_bs(s).success_prob);
    }
  }
}

TEST(Bff, RosterShorterThanDepth) {
  // Two miners, C = 6: states below C - 1 keep both recruits.
  const auto s = make_scenario(MinerSet({"A", 0.3}, {{"x", 0.4}, {"y", 0.3}}), "x", 6, 1, 6.25);
  const auto o = run_bff(s);
  for (int i = 0; i <= 5; ++i) EXPECT_NEAR(o.chain.fork_power(i), 1.0, 1e-12);
  EXPECT_NEAR(o.chain.fork_power(6), 0.7, 1e-12);
  EXPECT_DOUBLE_EQ(o.schedule.bribes[0], kSatoshi);
}

TEST(Halving, BsAndBffSchedulesAreAffineInReward) {
  for (auto run : {run_bs, run_bff}) {
    const auto base = run(with_reward(table2_scenario(4), 1.0));
    for (double f : {25.0, 12.5, 6.25, 3.125}) {
      const auto o = run(with_reward(table2_scenario(4), f));
      for (std::size_t i = 0; i < o.schedule.required.size(); ++i) {
        if (!o.schedule.required[i]) continue;
        const double want = (*base.schedule.required[i] + 1.0) * f - f;
        EXPECT_NEAR(*o.schedule.required[i], want, 1e-9 * std::max(1.0, std::abs(want)));
      }
    }
  }
}

TEST(Crb, Crb2CostNear192) {
  const auto o = run_crb(table2_scenario(4), CrbVariant::kFromStartState);
  EXPECT_NEAR(o.cost_unconditional, 192.0, 19.2);
  EXPECT_TRUE(o.schedule.committed);
  for (int i = 0; i <= 4; ++i) EXPECT_DOUBLE_EQ(o.schedule.bribes[i], o.schedule.bribes[0]);
  EXPECT_EQ(o.schedule.bribes[5], 0.0);
  EXPECT_EQ(o.schedule.bribes[6], 0.0);
}

TEST(Crb, Crb1ScheduleIgnoresStartState) {
  const auto ref = run_crb(table2_scenario(1), CrbVariant::kFromConfirmationDepth);
  for (int start = 2; start <= 6; ++start) {
    const auto o = run_crb(table2_scenario(start), CrbVariant::kFromConfirmationDepth);
    EXPECT_EQ(o.schedule.bribes, ref.schedule.bribes);
  }
}

TEST(Crb, NothingOfferedMeansBaseline) {
  const auto s = table2_scenario(4);
  const auto o = run_crb_with_constant(s, CrbVariant::kFromStartState, 0.0);
  for (double p : o.chain.fork_powers()) EXPECT_NEAR(p, s.mu(), 1e-15);
  EXPECT_EQ(o.cost_unconditional, 0.0);
}

TEST(Crb, TargetMembershipFollowsConstant) {
  const auto s = table2_scenario(4);
  const auto o = run_crb(s, CrbVariant::kFromStartState);
  for (int j = 0; j <= 4; ++j) EXPECT_TRUE(o.membership(s.target_index(), j)) << j;
}

TEST(Recapture, ConservationAndSymmetry) {
  const std::vector<double> basis{1.0, 2.0, 3.0};
  const std::vector<double> target{0.1, 0.0, 0.1};
  const std::vector<double> fork{0.5, 0.2, 0.3};
  const Recapture r = recapture_split(basis, 0.2, target, fork);
  EXPECT_NEAR(r.attacker + r.target + r.others, 6.0, 1e-12);
  EXPECT_NEAR(r.attacker, 1.0 * 0.4 + 2.0 + 3.0 * 2.0 / 3.0, 1e-12);

  const std::vector<double> one{10.0}, equal{0.25}, fork2{0.5};
  const Recapture even = recapture_split(one, 0.25, equal, fork2);
  EXPECT_DOUBLE_EQ(even.attacker, even.target);
}

TEST(Recapture, PerStateSharesSumToCostForBff) {
  const auto o = run_bff(table2_scenario(4));
  const auto& r = o.recapture;
  EXPECT_NEAR(r.attacker + r.target + r.others, o.cost_unconditional, 1e-9);
}

TEST(Evaluate, ZeroScheduleCostsNothing) {
  const auto s = table2_scenario(4);
  BribeSchedule zero{std::vector<double>(7, 0.0), std::vector<std::optional<double>>(7)};
  const MembershipMatrix none(s.miner_set.size(), 7);
  const auto o = evaluate_schedule(s, zero, none, AbsorbingChain::constant(7, s.mu()));
  EXPECT_EQ(o.cost_unconditional, 0.0);
  ASSERT_TRUE(o.cost_on_success.has_value());
  EXPECT_EQ(*o.cost_on_success, 0.0);
}

TEST(Evaluate, RejectsShapeMismatch) {
  const auto s = table2_scenario(4);
  BribeSchedule shortened{std::vector<double>(6, 0.0), std::vector<std::optional<double>>(6)};
  const MembershipMatrix none(s.miner_set.size(), 7);
  EXPECT_THROW(evaluate_schedule(s, shortened, none, AbsorbingChain::constant(7, 0.3)), Error);
}

}  // namespace
}  // namespace bribery
