#include <gtest/gtest.h>

#include <cmath>

#include "bribery/error.hpp"
#include "bribery/rng.hpp"
#include "bribery/simulate.hpp"
#include "bribery/strategies.hpp"
#include "fixtures.hpp"

namespace bribery {
namespace {

using testing::table2_scenario;
using testing::whale_scenario;

SimConfig config(std::uint64_t trials, std::uint64_t seed = 42, unsigned threads = 1) {
  SimConfig c;
  c.trials = trials;
  c.seed = seed;
  c.threads = threads;
  return c;
}

TEST(SplitMix64, KnownSequenceAndRange) {
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
  SplitMix64 u(9);
  for (int i = 0; i < 10000; ++i) {
    const double x = u.uniform();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
}

TEST(Simulate, ConstantChainMatchesAbsorptionProbability) {
  const auto s = whale_scenario();
  const auto bs = run_bs(s);  // fork power 0.3 in every state
  const auto r = simulate_race(s, policy_from(bs), config(1'000'000));
  const double b = analyze(AbsorbingChain::constant(7, 0.3)).success(6);
  EXPECT_LE(std::abs(r.success.mean - b), 3 * std::max(r.success.std_error, 1e-12));
  EXPECT_TRUE(compare_reports(bs, r).pass());
}

TEST(Simulate, CoinFlip) {
  const auto s = make_scenario(MinerSet({"A", 0.5}, {{"x", 0.5}}), "x", 1, 1, 6.25);
  RacePolicy nobody{std::vector<double>(2, 0.0), MembershipMatrix(1, 2)};
  const auto r = simulate_race(s, nobody, config(200'000));
  EXPECT_NEAR(r.success.mean, 1.0 / 3.0, 3 * r.success.std_error);
  EXPECT_NEAR(r.success.std_error, std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / 200'000), 1e-4);
}

TEST(Simulate, BitIdenticalAcrossThreadCounts) {
  const auto s = table2_scenario(4);
  const auto policy = policy_from(run_bff(s));
  const auto one = simulate_race(s, policy, config(100'000, 7, 1));
  const auto four = simulate_race(s, policy, config(100'000, 7, 4));
  const auto again = simulate_race(s, policy, config(100'000, 7, 1));
  EXPECT_EQ(one, four);
  EXPECT_EQ(one, again);
  EXPECT_FALSE(one == simulate_race(s, policy, config(100'000, 8, 1)));
}

TEST(Simulate, BsCostMatchesChain) {
  const auto s = whale_scenario();
  const auto bs = run_bs(s);
  const auto r = simulate_race(s, policy_from(bs), config(1'000'000, 3));
  const auto cmp = compare_reports(bs, r);
  for (const auto& c : cmp.checks) EXPECT_TRUE(c.pass) << c.metric;
}

TEST(Simulate, PerturbedChainFails) {
  const auto s = table2_scenario(4);
  const auto bs = run_bs(s);
  // Analytic side believes in 0.05 more fork power than the simulated policy has.
  std::vector<double> more(bs.chain.fork_powers().begin(), bs.chain.fork_powers().end());
  for (auto& p : more) p += 0.05;
  auto wrong = evaluate_schedule(s, bs.schedule, bs.membership, AbsorbingChain(more));
  const auto r = simulate_race(s, policy_from(bs), config(1'000'000));
  const auto cmp = compare_reports(wrong, r);
  EXPECT_FALSE(cmp.pass());
  EXPECT_FALSE(cmp.checks.front().pass);
  EXPECT_EQ(cmp.checks.front().metric, "success_prob");
}

TEST(Simulate, SmallSamplesStillPassAgainstTheTruth) {
  const auto s = table2_scenario(4);
  const auto bff = run_bff(s);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = simulate_race(s, policy_from(bff), config(10, seed));
    EXPECT_TRUE(compare_reports(bff, r).pass()) << "seed " << seed;
  }
}

TEST(Simulate, StickyRetentionHelpsTheFork) {
  const auto s = table2_scenario(5);
  const auto bff = run_bff(s);
  auto sticky = config(200'000);
  sticky.retention = RetentionRule::kSticky;
  const auto a = simulate_race(s, policy_from(bff), config(200'000));
  const auto b = simulate_race(s, policy_from(bff), sticky);
  EXPECT_GT(b.success.mean, a.success.mean);
}

TEST(Simulate, Preconditions) {
  const auto s = table2_scenario(4);
  const auto policy = policy_from(run_bs(s));
  EXPECT_THROW(simulate_race(s, policy, config(0)), Error);
  auto tight = config(10);
  tight.max_events = 10;
  EXPECT_THROW(simulate_race(s, policy, tight), Error);
  SimReport empty;
  empty.visits.resize(7);
  EXPECT_THROW(compare_reports(run_bs(s), empty), Error);
}

TEST(Simulate, VisitsMatchFundamentalRow) {
  const auto s = table2_scenario(3);
  const auto crb = run_crb(s, CrbVariant::kFromStartState);
  const auto r = simulate_race(s, policy_from(crb), config(500'000, 99));
  for (std::size_t i = 0; i < crb.visits.size(); ++i) {
    EXPECT_LE(std::abs(r.visits[i].mean - crb.visits[i]),
              3 * std::max(r.visits[i].std_error, 1e-12))
        << "state " << i;
  }
}

}  // namespace
}  // namespace bribery
