#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bribery {

// One satoshi, the smallest bribe that is still "something".
inline constexpr double kSatoshi = 1e-8;

struct Miner {
  std::string id;
  double power = 0.0;  // fraction of total network hash power

  friend bool operator==(const Miner&, const Miner&) = default;
};

// Attacker plus the main-chain miners, normalized so that the attacker's power
// and the summed miner powers add up to exactly one. Miners are kept in
// descending power order with ties broken by id.
class MinerSet {
 public:
  // Validates and renormalizes. Inputs summing to more than 5% away from one
  // are rejected as malformed.
  MinerSet(Miner attacker, std::vector<Miner> miners);

  const Miner& attacker() const { return attacker_; }
  double attacker_power() const { return attacker_.power; }
  // Total power of the main-chain miners.
  double lambda() const { return lambda_; }
  const std::vector<Miner>& miners() const { return miners_; }
  std::size_t size() const { return miners_.size(); }

  std::optional<std::size_t> index_of(std::string_view id) const;

 private:
  Miner attacker_;
  std::vector<Miner> miners_;
  double lambda_ = 0.0;
};

// Pool file: one record per line, `id power [attacker]`, `#` starts a comment.
// When `attacker_override` is set, that id becomes the attacker and any flag in
// the file is ignored.
MinerSet load_pool_distribution(std::string_view text,
                                std::optional<std::string> attacker_override = std::nullopt);
MinerSet load_pool_file(const std::filesystem::path& path,
                        std::optional<std::string> attacker_override = std::nullopt);

// One attack instance. `horizon` is the number of transient gap states; by
// default it is C + 1 (gap 0 through C), and it may be raised for
// sensitivity studies.
struct Scenario {
  MinerSet miner_set;
  std::string target_id;
  int confirmations = 6;  // C
  int premined = 1;       // l
  double reward = 6.25;   // F
  int horizon = 7;

  // Gap state the race starts from, C - l + 1.
  int start_state() const { return confirmations - premined + 1; }
  std::size_t target_index() const;
  double target_power() const;
  double mu() const { return miner_set.attacker_power(); }
  double lambda() const { return miner_set.lambda(); }
  // States 0..C may carry a bribe; anything beyond C never does.
  int last_bribed_state() const { return std::min(confirmations, horizon - 1); }
};

Scenario make_scenario(MinerSet miner_set, std::string target_id, int confirmations,
                       int premined, double reward);

// Same scenario with the attack starting at `start_state` (l = C - start + 1).
Scenario with_start_state(Scenario scenario, int start_state);
Scenario with_reward(Scenario scenario, double reward);
Scenario with_horizon(Scenario scenario, int horizon);

}  // namespace bribery
