#include "bribery/model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bribery/error.hpp"

namespace bribery {

namespace {

constexpr double kSumTolerance = 0.05;

void check_power(const Miner& m) {
  require(std::isfinite(m.power) && m.power > 0.0 && m.power <= 1.0,
          ErrorCode::kInvalidArgument,
          "miner '" + m.id + "' has power outside (0, 1]");
}

bool by_power_then_id(const Miner& a, const Miner& b) {
  if (a.power != b.power) return a.power > b.power;
  return a.id < b.id;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

MinerSet::MinerSet(Miner attacker, std::vector<Miner> miners)
    : attacker_(std::move(attacker)), miners_(std::move(miners)) {
  require(!attacker_.id.empty(), ErrorCode::kInvalidArgument, "attacker id is empty");
  check_power(attacker_);
  std::set<std::string> seen{attacker_.id};
  double total = attacker_.power;
  for (const auto& m : miners_) {
    require(!m.id.empty(), ErrorCode::kInvalidArgument, "miner id is empty");
    check_power(m);
    require(seen.insert(m.id).second, ErrorCode::kInvalidArgument,
            "duplicate miner id '" + m.id + "'");
    total += m.power;
  }
  require(std::abs(total - 1.0) <= kSumTolerance, ErrorCode::kInvalidArgument,
          "powers sum to " + std::to_string(total) + ", more than 5% away from 1");

  attacker_.power /= total;
  for (auto& m : miners_) m.power /= total;
  std::sort(miners_.begin(), miners_.end(), by_power_then_id);

  // Defined as the complement so that mu + lambda == 1 holds exactly.
  lambda_ = 1.0 - attacker_.power;
}

std::optional<std::size_t> MinerSet::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < miners_.size(); ++i)
    if (miners_[i].id == id) return i;
  return std::nullopt;
}

MinerSet load_pool_distribution(std::string_view text,
                                std::optional<std::string> attacker_override) {
  std::vector<Miner> records;
  std::vector<std::string> flagged;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    std::istringstream fields{std::string(line)};
    std::string id, power_text, flag, extra;
    fields >> id >> power_text >> flag >> extra;
    const auto where = "pool file line " + std::to_string(line_no);
    require(!power_text.empty(), ErrorCode::kParse, where + ": expected `id power [attacker]`");
    require(extra.empty(), ErrorCode::kParse, where + ": trailing fields");
    require(flag.empty() || flag == "attacker", ErrorCode::kParse,
            where + ": unknown flag '" + flag + "'");

    double power = 0.0;
    const auto* first = power_text.data();
    const auto* last = first + power_text.size();
    const auto [ptr, ec] = std::from_chars(first, last, power);
    require(ec == std::errc{} && ptr == last, ErrorCode::kParse,
            where + ": bad power '" + power_text + "'");
    require(power > 0.0, ErrorCode::kInvalidArgument,
            where + ": power must be positive");
    if (flag == "attacker") flagged.push_back(id);
    records.push_back({id, power});
  }

  std::string attacker_id;
  if (attacker_override) {
    attacker_id = *attacker_override;
  } else {
    require(flagged.size() == 1, ErrorCode::kParse,
            "pool file must flag exactly one record as `attacker`");
    attacker_id = flagged.front();
  }

  std::optional<Miner> attacker;
  std::vector<Miner> miners;
  for (auto& r : records) {
    if (r.id == attacker_id && !attacker) {
      attacker = r;
    } else {
      miners.push_back(std::move(r));
    }
  }
  require(attacker.has_value(), ErrorCode::kInvalidArgument,
          "attacker '" + attacker_id + "' not present in pool file");
  return MinerSet(std::move(*attacker), std::move(miners));
}

MinerSet load_pool_file(const std::filesystem::path& path,
                        std::optional<std::string> attacker_override) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kParse, "cannot open pool file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_pool_distribution(buf.str(), std::move(attacker_override));
}

std::size_t Scenario::target_index() const {
  const auto idx = miner_set.index_of(target_id);
  require(idx.has_value(), ErrorCode::kInvalidArgument,
          "unknown target miner '" + target_id + "'");
  return *idx;
}

double Scenario::target_power() const { return miner_set.miners()[target_index()].power; }

Scenario make_scenario(MinerSet miner_set, std::string target_id, int confirmations,
                       int premined, double reward) {
  require(confirmations >= 1, ErrorCode::kInvalidArgument, "confirmation depth must be >= 1");
  require(premined >= 1, ErrorCode::kInvalidArgument, "attacker must have pre-mined >= 1 block");
  require(premined <= confirmations, ErrorCode::kInvalidArgument,
          "pre-mined blocks cannot exceed the confirmation depth");
  require(std::isfinite(reward) && reward > 0.0, ErrorCode::kInvalidArgument,
          "block reward must be positive");
  require(target_id != miner_set.attacker().id, ErrorCode::kInvalidArgument,
          "the target cannot be the attacker");
  require(miner_set.index_of(target_id).has_value(), ErrorCode::kInvalidArgument,
          "unknown target miner '" + target_id + "'");
  return Scenario{std::move(miner_set), std::move(target_id), confirmations, premined, reward,
                  confirmations + 1};
}

Scenario with_start_state(Scenario scenario, int start_state) {
  require(start_state >= 1 && start_state <= scenario.confirmations,
          ErrorCode::kInvalidArgument,
          "start state must lie in [1, C]");
  scenario.premined = scenario.confirmations - start_state + 1;
  require(start_state < scenario.horizon, ErrorCode::kInvalidArgument,
          "start state lies beyond the chain horizon");
  return scenario;
}

Scenario with_reward(Scenario scenario, double reward) {
  require(std::isfinite(reward) && reward > 0.0, ErrorCode::kInvalidArgument,
          "block reward must be positive");
  scenario.reward = reward;
  return scenario;
}

Scenario with_horizon(Scenario scenario, int horizon) {
  require(horizon > scenario.start_state(), ErrorCode::kInvalidArgument,
          "horizon must include the start state");
  scenario.horizon = horizon;
  return scenario;
}

}  // namespace bribery
