#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bribery/model.hpp"
#include "bribery/strategies.hpp"

namespace bribery {

// What each agent does in each state: the bribe released for a fork block and
// which miners mine on the fork.
struct RacePolicy {
  std::vector<double> bribes;
  MembershipMatrix membership;
};

RacePolicy policy_from(const StrategyOutcome& outcome);

enum class RetentionRule {
  kStateIndexed,  // membership follows the current state exactly
  kSticky,        // once on the fork a miner never returns to the main chain
};

struct SimConfig {
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  std::uint64_t max_events = 0;  // 0 picks 1000 * horizon
  unsigned threads = 0;          // 0 picks the hardware concurrency
  RetentionRule retention = RetentionRule::kStateIndexed;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;

  friend bool operator==(const Estimate&, const Estimate&) = default;
};

struct SimReport {
  std::uint64_t trials = 0;
  std::uint64_t completed = 0;
  std::uint64_t discarded = 0;  // hit max_events
  std::uint64_t successes = 0;
  Estimate success;
  Estimate steps;
  std::vector<Estimate> visits;
  Estimate cost_unconditional;
  std::optional<Estimate> cost_on_success;  // empty without a single success

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

// Event-level Monte Carlo of the race from the scenario's start state. Every
// event picks the attacker or one miner with probability equal to its power;
// the block extends the fork when that agent is on it. Bit-identical for a
// fixed seed regardless of the thread count.
SimReport simulate_race(const Scenario& scenario, const RacePolicy& policy,
                        const SimConfig& config);

struct MetricCheck {
  std::string metric;
  double analytic = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;  // the error the test used
  bool pass = false;
};

struct Comparison {
  std::vector<MetricCheck> checks;
  bool pass() const;
};

// Flags every metric whose analytic value lies more than z standard errors
// from the empirical mean. The standard error is the larger of the sample one
// and the one implied by the analytic chain's own variance; when both vanish
// the metric is deterministic and must match exactly.
Comparison compare_reports(const StrategyOutcome& analytic, const SimReport& empirical,
                           double z = 3.0);

}  // namespace bribery
