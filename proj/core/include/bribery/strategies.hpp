#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bribery/markov.hpp"
#include "bribery/model.hpp"

namespace bribery {

enum class StrategyKind { kBs, kBff, kCrb1, kCrb2, kGvcAc, kGvcRac };

std::string_view to_string(StrategyKind kind);
std::optional<StrategyKind> strategy_from_string(std::string_view name);

// Per-state bribe offered to whoever mines the next fork block in that state.
// A zero entry means nothing is offered there; offered entries are at least
// one satoshi. `required` keeps the raw threshold each entry was derived from
// (empty where the strategy has no per-state threshold).
struct BribeSchedule {
  std::vector<double> bribes;
  std::vector<std::optional<double>> required;
  bool committed = false;
  StrategyKind tag = StrategyKind::kBs;

  bool offered(std::size_t state) const { return bribes[state] > 0.0; }
};

// Miner-by-state 0/1 matrix: entry (m, j) is set when miner m mines on the
// fork while the race sits in state j. Rows follow MinerSet::miners() order.
class MembershipMatrix {
 public:
  MembershipMatrix() = default;
  MembershipMatrix(std::size_t miners, std::size_t states)
      : miners_(miners), states_(states), cells_(miners * states, 0) {}

  std::size_t miners() const { return miners_; }
  std::size_t states() const { return states_; }
  bool operator()(std::size_t miner, std::size_t state) const {
    return cells_[miner * states_ + state] != 0;
  }
  void set(std::size_t miner, std::size_t state, bool on = true) {
    cells_[miner * states_ + state] = on ? 1 : 0;
  }

  // Power mining on the fork per state: attacker plus every member.
  std::vector<double> fork_power(const MinerSet& miner_set) const;

  friend bool operator==(const MembershipMatrix&, const MembershipMatrix&) = default;

 private:
  std::size_t miners_ = 0;
  std::size_t states_ = 0;
  std::vector<std::uint8_t> cells_;
};

// How the bribe money flows back: the share mined by the attacker, by the
// target miner, and by everybody else on the fork.
struct Recapture {
  double attacker = 0.0;
  double target = 0.0;
  double others = 0.0;
};

struct StrategyOutcome {
  StrategyKind strategy = StrategyKind::kBs;
  int start_state = 0;
  double success_prob = 0.0;           // B[D0][V] on the final chain
  double expected_steps = 0.0;         // e[D0]
  std::vector<double> visits;          // N row D0
  double cost_unconditional = 0.0;     // sum_i N[D0][i] R_i
  std::optional<double> cost_on_success;  // empty when success is impossible
  Recapture recapture;                 // split of the unconditional cost
  double single_visit_cost = 0.0;      // every event on the fork, each state once
  Recapture single_visit_recapture;
  double catchup_success = 0.0;        // infinite-horizon catch-up at the start state
  BribeSchedule schedule;
  MembershipMatrix membership;
  AbsorbingChain chain = AbsorbingChain::constant(1, 0.5);
};

// Split a per-state cost basis in proportion to mining power on the fork.
// `target_on_fork[i]` is the target's power when it mines on the fork in
// state i and 0 otherwise.
Recapture recapture_split(std::span<const double> cost_basis, double mu,
                          std::span<const double> target_on_fork,
                          std::span<const double> fork_power);

// Costs, visits and probabilities of `schedule` on `chain`, starting from the
// scenario's start state.
StrategyOutcome evaluate_schedule(const Scenario& scenario, const BribeSchedule& schedule,
                                  const MembershipMatrix& membership, const AbsorbingChain& chain);

// Only the target miner is bribed, state by state, with the basic formula.
StrategyOutcome run_bs(const Scenario& scenario);

// Biggest fish first: state i recruits the (C - i + 1)th biggest miner while
// retaining everyone recruited deeper; a main-chain block sends the newest
// recruit back.
StrategyOutcome run_bff(const Scenario& scenario);

enum class CrbVariant { kFromConfirmationDepth, kFromStartState };

// Constant committed bribe K. CRB1 derives K as if the race started at C and
// bribes every state up to C; CRB2 derives it from the start state and offers
// nothing above it.
StrategyOutcome run_crb(const Scenario& scenario, CrbVariant variant);

// Same machinery with a caller-chosen K, for studying ineffective bribes.
StrategyOutcome run_crb_with_constant(const Scenario& scenario, CrbVariant variant,
                                      double constant_bribe);

// --- guaranteed variable-rate bribing with commitment -----------------------

enum class RecruitScope {
  kAllMiners,   // every miner re-evaluates the committed schedule
  kTargetOnly,  // only the target does; others respond to the basic formula
};

// Which absorption columns enter the second-step test. The default weighs the
// first-step chain's failure probability against the perturbed chain's
// success probability, the same roles they play in the general formula; the
// alternative swaps the two columns.
enum class ColumnReading { kFailureOverSuccess, kSuccessOverFailure };

struct GvcOptions {
  RecruitScope scope = RecruitScope::kAllMiners;
  ColumnReading columns = ColumnReading::kFailureOverSuccess;
};

// First step: per state, the smallest power the bribe persuades under the
// basic formula, and everyone at or above it joins.
struct NewMarkov {
  AbsorbingChain chain = AbsorbingChain::constant(1, 0.5);
  std::vector<std::optional<double>> thresholds;
  MembershipMatrix membership;
};

NewMarkov gvc_new_markov(const Scenario& scenario, const BribeSchedule& schedule);

// Second step: miner k joins in state j if it already did in the first step
// or if the committed bribe covers its general-formula threshold when it
// alone is added to the first-step chain in state j.
MembershipMatrix gvc_zeta(const Scenario& scenario, const BribeSchedule& schedule,
                          const NewMarkov& new_markov, const GvcOptions& options = {});

// Fork power per state is mu plus the summed powers of the members.
AbsorbingChain gvc_final_markov(const MembershipMatrix& zeta, const MinerSet& miner_set);

// True when the target is on the fork in every state from the start down to 0.
bool gvc_persuades_target(const Scenario& scenario, const MembershipMatrix& zeta);

StrategyOutcome run_gvc(const Scenario& scenario, BribeSchedule schedule,
                        const GvcOptions& options = {});

enum class GvcObjective { kAverageCost, kAverageCostOnSuccess };

struct GvcSearchOptions {
  int restarts = 32;
  std::uint64_t seed = 1;
  double quantum = 0.01;
  int max_sweeps = 40;
  GvcOptions gvc;
};

struct GvcOptimum {
  StrategyOutcome outcome;
  double objective = 0.0;
};

// Coordinate descent over the per-state bribes subject to the target being
// persuaded at every state up to the start. Throws kInfeasible when no
// schedule found persuades it.
GvcOptimum optimize_gvc(const Scenario& scenario, GvcObjective objective,
                        const GvcSearchOptions& options = {});

}  // namespace bribery
