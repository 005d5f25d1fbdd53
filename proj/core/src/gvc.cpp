#include <algorithm>
#include <cmath>

#include "bribery/error.hpp"
#include "bribery/rationality.hpp"
#include "bribery/strategies.hpp"

namespace bribery {

NewMarkov gvc_new_markov(const Scenario& scenario, const BribeSchedule& schedule) {
  const auto h = static_cast<std::size_t>(scenario.horizon);
  require(schedule.bribes.size() == h, ErrorCode::kInvalidArgument,
          "schedule length must equal the horizon");
  const auto& roster = scenario.miner_set.miners();
  NewMarkov nm;
  nm.thresholds.assign(h, std::nullopt);
  nm.membership = MembershipMatrix(roster.size(), h);
  for (std::size_t i = 0; i < h; ++i) {
    if (!schedule.offered(i)) continue;
    const auto p = persuadable_threshold(static_cast<int>(i), schedule.bribes[i], scenario.mu(),
                                         scenario.lambda(), scenario.reward);
    nm.thresholds[i] = p;
    if (!p) continue;
    for (std::size_t k = 0; k < roster.size(); ++k) {
      if (roster[k].power >= *p) nm.membership.set(k, i);
    }
  }
  nm.chain = AbsorbingChain(nm.membership.fork_power(scenario.miner_set));
  return nm;
}

MembershipMatrix gvc_zeta(const Scenario& scenario, const BribeSchedule& schedule,
                          const NewMarkov& new_markov, const GvcOptions& options) {
  const auto& roster = scenario.miner_set.miners();
  const std::size_t h = new_markov.chain.size();
  require(schedule.bribes.size() == h, ErrorCode::kInvalidArgument,
          "schedule and chain must span the same states");
  MembershipMatrix zeta = new_markov.membership;
  const auto base = new_markov.chain.fork_powers();
  const auto base_success = success_probabilities(new_markov.chain);
  const std::size_t target = scenario.target_index();

  std::vector<double> perturbed(base.begin(), base.end());
  for (std::size_t j = 0; j < h; ++j) {
    if (!schedule.offered(j)) continue;
    const double eta = base[j];
    const double gamma = 1.0 - eta;
    if (gamma <= 0.0) continue;  // the whole network is already on the fork
    for (std::size_t k = 0; k < roster.size(); ++k) {
      if (zeta(k, j)) continue;
      if (options.scope == RecruitScope::kTargetOnly && k != target) continue;
      perturbed[j] = std::min(1.0, eta + roster[k].power);
      const double joined_success = success_probabilities(AbsorbingChain(perturbed))[j];
      perturbed[j] = eta;
      double p_xs = joined_success;
      double p_yf = 1.0 - base_success[j];
      if (options.columns == ColumnReading::kSuccessOverFailure) {
        p_xs = std::max(0.0, 1.0 - joined_success);
        p_yf = base_success[j];
      }
      const BribeQuote q = min_bribe_general(static_cast<int>(j), roster[k].power, eta, gamma,
                                             p_xs, p_yf, scenario.reward, roster[k].id);
      if (q.min_bribe && schedule.bribes[j] >= *q.min_bribe) zeta.set(k, j);
    }
  }
  return zeta;
}

AbsorbingChain gvc_final_markov(const MembershipMatrix& zeta, const MinerSet& miner_set) {
  return AbsorbingChain(zeta.fork_power(miner_set));
}

bool gvc_persuades_target(const Scenario& scenario, const MembershipMatrix& zeta) {
  const std::size_t target = scenario.target_index();
  for (int j = 0; j <= scenario.start_state(); ++j) {
    if (!zeta(target, static_cast<std::size_t>(j))) return false;
  }
  return true;
}

StrategyOutcome run_gvc(const Scenario& scenario, BribeSchedule schedule,
                        const GvcOptions& options) {
  require(schedule.bribes.size() == static_cast<std::size_t>(scenario.horizon),
          ErrorCode::kInvalidArgument, "schedule length must equal the horizon");
  for (double b : schedule.bribes) {
    require(std::isfinite(b) && b >= 0.0, ErrorCode::kInvalidArgument,
            "bribes must be finite and non-negative");
  }
  schedule.committed = true;
  schedule.required.resize(schedule.bribes.size());
  const NewMarkov nm = gvc_new_markov(scenario, schedule);
  const MembershipMatrix zeta = gvc_zeta(scenario, schedule, nm, options);
  return evaluate_schedule(scenario, schedule, zeta, gvc_final_markov(zeta, scenario.miner_set));
}

}  // namespace bribery
