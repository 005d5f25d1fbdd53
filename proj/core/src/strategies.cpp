#include "bribery/strategies.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <utility>

#include "bribery/error.hpp"
#include "bribery/rationality.hpp"

namespace bribery {

namespace {

constexpr std::array<std::pair<StrategyKind, std::string_view>, 6> kNames{{
    {StrategyKind::kBs, "bs"},
    {StrategyKind::kBff, "bff"},
    {StrategyKind::kCrb1, "crb1"},
    {StrategyKind::kCrb2, "crb2"},
    {StrategyKind::kGvcAc, "gvc_ac"},
    {StrategyKind::kGvcRac, "gvc_rac"},
}};

BribeSchedule empty_schedule(const Scenario& scenario, StrategyKind tag, bool committed) {
  const auto h = static_cast<std::size_t>(scenario.horizon);
  return {std::vector<double>(h, 0.0), std::vector<std::optional<double>>(h), committed, tag};
}

}  // namespace

std::string_view to_string(StrategyKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<StrategyKind> strategy_from_string(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::vector<double> MembershipMatrix::fork_power(const MinerSet& miner_set) const {
  require(miner_set.size() == miners_, ErrorCode::kInvalidArgument,
          "membership rows must match the miner roster");
  std::vector<double> power(states_, miner_set.attacker_power());
  for (std::size_t m = 0; m < miners_; ++m) {
    for (std::size_t j = 0; j < states_; ++j) {
      if ((*this)(m, j)) power[j] += miner_set.miners()[m].power;
    }
  }
  // Renormalized powers can sum a hair above one.
  for (auto& p : power) p = std::min(p, 1.0);
  return power;
}

Recapture recapture_split(std::span<const double> cost_basis, double mu,
                          std::span<const double> target_on_fork,
                          std::span<const double> fork_power) {
  require(cost_basis.size() == fork_power.size() && target_on_fork.size() == fork_power.size(),
          ErrorCode::kInvalidArgument, "recapture vectors must have equal length");
  require(mu > 0.0, ErrorCode::kInvalidArgument, "attacker power must be positive");
  Recapture r;
  for (std::size_t i = 0; i < cost_basis.size(); ++i) {
    if (cost_basis[i] == 0.0) continue;
    const double attacker = cost_basis[i] * mu / fork_power[i];
    const double target = cost_basis[i] * target_on_fork[i] / fork_power[i];
    r.attacker += attacker;
    r.target += target;
    r.others += cost_basis[i] - attacker - target;
  }
  return r;
}

StrategyOutcome evaluate_schedule(const Scenario& scenario, const BribeSchedule& schedule,
                                  const MembershipMatrix& membership,
                                  const AbsorbingChain& chain) {
  const std::size_t h = chain.size();
  require(schedule.bribes.size() == h, ErrorCode::kInvalidArgument,
          "schedule and chain must span the same states");
  require(membership.states() == h && membership.miners() == scenario.miner_set.size(),
          ErrorCode::kInvalidArgument, "membership shape does not match the scenario");
  for (double b : schedule.bribes) {
    require(std::isfinite(b) && b >= 0.0, ErrorCode::kInvalidArgument,
            "bribes must be finite and non-negative");
  }
  const auto d0 = static_cast<std::size_t>(scenario.start_state());
  require(d0 < h, ErrorCode::kInvalidArgument, "start state outside the chain");

  const AbsorptionAnalysis a = analyze(chain);
  StrategyOutcome out;
  out.strategy = schedule.tag;
  out.schedule = schedule;
  out.schedule.required.resize(h);
  out.start_state = scenario.start_state();
  out.success_prob = std::clamp(a.success(d0), 0.0, 1.0);
  out.expected_steps = a.steps[d0];
  out.visits.assign(a.n.row(d0).begin(), a.n.row(d0).end());

  std::vector<double> basis(h);
  double on_success = 0.0;
  for (std::size_t i = 0; i < h; ++i) {
    basis[i] = out.visits[i] * schedule.bribes[i];
    out.cost_unconditional += basis[i];
    on_success += a.success(i) * basis[i];
  }
  if (a.success(d0) > 0.0) out.cost_on_success = on_success / a.success(d0);

  const std::size_t target = scenario.target_index();
  std::vector<double> target_on_fork(h, 0.0);
  for (std::size_t i = 0; i < h; ++i) {
    if (membership(target, i)) target_on_fork[i] = scenario.target_power();
  }
  out.recapture = recapture_split(basis, scenario.mu(), target_on_fork, chain.fork_powers());

  // The shortest successful race: one fork block per state from D0 down to 0.
  std::vector<double> single(h, 0.0);
  for (std::size_t i = 0; i <= d0; ++i) single[i] = schedule.bribes[i];
  out.single_visit_cost = std::accumulate(single.begin(), single.end(), 0.0);
  out.single_visit_recapture =
      recapture_split(single, scenario.mu(), target_on_fork, chain.fork_powers());

  out.catchup_success =
      catchup_prob(chain.fork_power(d0), chain.main_power(d0), static_cast<int>(d0));
  out.membership = membership;
  out.chain = chain;
  return out;
}

StrategyOutcome run_bs(const Scenario& scenario) {
  const auto h = static_cast<std::size_t>(scenario.horizon);
  const std::size_t target = scenario.target_index();
  const double p_m = scenario.target_power();
  BribeSchedule schedule = empty_schedule(scenario, StrategyKind::kBs, false);
  MembershipMatrix membership(scenario.miner_set.size(), h);
  for (int i = 0; i <= scenario.last_bribed_state(); ++i) {
    const BribeQuote quote = min_bribe_basic(i, p_m, scenario.mu(), scenario.lambda(),
                                             scenario.reward, scenario.target_id);
    const double bribe = emitted_bribe(*quote.min_bribe);
    schedule.bribes[i] = bribe;
    schedule.required[i] = quote.min_bribe;
    if (choose_chain(bribe, quote) == ChainChoice::kJoinFork) membership.set(target, i);
  }
  const auto chain = AbsorbingChain(membership.fork_power(scenario.miner_set));
  return evaluate_schedule(scenario, schedule, membership, chain);
}

StrategyOutcome run_bff(const Scenario& scenario) {
  const auto h = static_cast<std::size_t>(scenario.horizon);
  const auto& roster = scenario.miner_set.miners();
  const std::size_t n = roster.size();
  const int c = scenario.confirmations;
  const double reward = scenario.reward;
  BribeSchedule schedule = empty_schedule(scenario, StrategyKind::kBff, false);
  MembershipMatrix membership(n, h);

  for (int i = 0; i <= scenario.last_bribed_state(); ++i) {
    // Recruits are roster[0..newest]; past the end of the roster the newest
    // stays the smallest miner.
    const std::size_t newest = std::min<std::size_t>(static_cast<std::size_t>(c - i), n - 1);
    double mu_eff = scenario.mu();
    for (std::size_t k = 0; k < newest; ++k) mu_eff += roster[k].power;
    const double lambda_eff = 1.0 - mu_eff;
    const double p = roster[newest].power;

    double raw;
    if (p >= lambda_eff - 1e-12) {
      raw = -reward;  // the recruit is the whole main chain; nothing left to lose
    } else {
      raw = basic_threshold(i, p, mu_eff, lambda_eff, reward);
    }
    const double bribe = emitted_bribe(raw);
    schedule.bribes[i] = bribe;
    schedule.required[i] = raw;
    const BribeQuote quote{i, roster[newest].id, raw, BribeFormula::kBasic};
    if (choose_chain(bribe, quote) == ChainChoice::kJoinFork) {
      for (std::size_t k = 0; k <= newest; ++k) membership.set(k, i);
    }
  }
  const auto chain = AbsorbingChain(membership.fork_power(scenario.miner_set));
  return evaluate_schedule(scenario, schedule, membership, chain);
}

namespace {

struct CrbPlan {
  int top = 0;                        // highest bribed state
  std::vector<double> target_chain;   // mu + P_m at 0..top
  std::vector<double> required;       // target's per-state general-formula minima
  std::vector<double> visits;         // N row `top` of the target chain
};

CrbPlan crb_plan(const Scenario& scenario, CrbVariant variant) {
  const auto h = static_cast<std::size_t>(scenario.horizon);
  CrbPlan plan;
  plan.top = variant == CrbVariant::kFromConfirmationDepth ? scenario.last_bribed_state()
                                                           : scenario.start_state();
  const double p_m = scenario.target_power();
  const double mu = scenario.mu();
  plan.target_chain.assign(h, mu);
  for (int i = 0; i <= plan.top; ++i) plan.target_chain[i] = std::min(1.0, mu + p_m);

  const AbsorbingChain with_target(plan.target_chain);
  const auto on = success_probabilities(with_target);
  plan.required.assign(static_cast<std::size_t>(plan.top) + 1, 0.0);
  for (int i = 0; i <= plan.top; ++i) {
    auto off_powers = plan.target_chain;
    off_powers[i] = mu;
    const auto off = success_probabilities(AbsorbingChain(off_powers));
    const BribeQuote q = min_bribe_general(i, p_m, mu, 1.0 - mu, on[i], 1.0 - off[i],
                                           scenario.reward, scenario.target_id);
    require(q.persuadable(), ErrorCode::kInfeasible, "target cannot be persuaded");
    plan.required[i] = *q.min_bribe;
  }
  const AbsorptionAnalysis a = analyze(with_target);
  const auto row = a.n.row(static_cast<std::size_t>(plan.top));
  plan.visits.assign(row.begin(), row.begin() + plan.top + 1);
  return plan;
}

StrategyOutcome crb_outcome(const Scenario& scenario, CrbVariant variant, const CrbPlan& plan,
                            double constant_bribe) {
  const auto h = static_cast<std::size_t>(scenario.horizon);
  const auto& roster = scenario.miner_set.miners();
  const std::size_t target = scenario.target_index();
  BribeSchedule schedule = empty_schedule(
      scenario, variant == CrbVariant::kFromConfirmationDepth ? StrategyKind::kCrb1
                                                              : StrategyKind::kCrb2,
      true);
  MembershipMatrix membership(roster.size(), h);

  const auto base_success = success_probabilities(AbsorbingChain(plan.target_chain));
  for (int j = 0; j <= plan.top; ++j) {
    schedule.bribes[j] = constant_bribe;
    schedule.required[j] = plan.required[j];
    if (constant_bribe <= 0.0) continue;  // nothing on offer recruits nobody
    const double target_needs = crb_min_constant(plan.visits, plan.required, j);
    if (constant_bribe > target_needs) membership.set(target, j);

    // Everyone else weighs the constant bribe against joining the
    // target's fork in this state alone.
    const double eta = plan.target_chain[j];
    for (std::size_t k = 0; k < roster.size(); ++k) {
      if (k == target) continue;
      auto joined = plan.target_chain;
      joined[j] = std::min(1.0, eta + roster[k].power);
      const double p_xs = success_probabilities(AbsorbingChain(joined))[j];
      const BribeQuote q = min_bribe_general(j, roster[k].power, eta, 1.0 - eta, p_xs,
                                             1.0 - base_success[j], scenario.reward, roster[k].id);
      if (choose_chain(constant_bribe, q) == ChainChoice::kJoinFork) membership.set(k, j);
    }
  }
  const auto chain = AbsorbingChain(membership.fork_power(scenario.miner_set));
  return evaluate_schedule(scenario, schedule, membership, chain);
}

}  // namespace

StrategyOutcome run_crb(const Scenario& scenario, CrbVariant variant) {
  const CrbPlan plan = crb_plan(scenario, variant);
  const double k = crb_min_constant(plan.visits, plan.required, plan.top);
  return crb_outcome(scenario, variant, plan, emitted_bribe(k));
}

StrategyOutcome run_crb_with_constant(const Scenario& scenario, CrbVariant variant,
                                      double constant_bribe) {
  require(std::isfinite(constant_bribe) && constant_bribe >= 0.0, ErrorCode::kInvalidArgument,
          "constant bribe must be non-negative");
  return crb_outcome(scenario, variant, crb_plan(scenario, variant), constant_bribe);
}

}  // namespace bribery
