#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "bribery/error.hpp"
#include "bribery/rationality.hpp"
#include "bribery/rng.hpp"
#include "bribery/strategies.hpp"

namespace bribery {

namespace {

struct Candidate {
  std::vector<double> bribes;
  double objective = 0.0;
  StrategyOutcome outcome;
};

// Strictly better objective, or equal within rounding and lexicographically
// smaller schedule; keeps the search independent of evaluation order.
bool better(const Candidate& a, const Candidate& b) {
  const double tol = 1e-9 * std::max(1.0, std::abs(b.objective));
  if (a.objective < b.objective - tol) return true;
  if (a.objective > b.objective + tol) return false;
  return a.bribes < b.bribes;
}

class Search {
 public:
  Search(const Scenario& scenario, GvcObjective objective, const GvcSearchOptions& options)
      : scenario_(scenario),
        objective_(objective),
        options_(options),
        d0_(scenario.start_state()),
        top_(scenario.last_bribed_state()) {}

  std::optional<Candidate> evaluate(const std::vector<double>& bribes) const {
    BribeSchedule schedule;
    schedule.bribes = bribes;
    schedule.tag =
        objective_ == GvcObjective::kAverageCost ? StrategyKind::kGvcAc : StrategyKind::kGvcRac;
    const NewMarkov nm = gvc_new_markov(scenario_, schedule);
    const MembershipMatrix zeta = gvc_zeta(scenario_, schedule, nm, options_.gvc);
    if (!gvc_persuades_target(scenario_, zeta)) return std::nullopt;
    Candidate c{bribes, 0.0,
                evaluate_schedule(scenario_, schedule, zeta,
                                  gvc_final_markov(zeta, scenario_.miner_set))};
    if (objective_ == GvcObjective::kAverageCost) {
      c.objective = c.outcome.cost_unconditional;
    } else {
      if (!c.outcome.cost_on_success) return std::nullopt;
      c.objective = *c.outcome.cost_on_success;
    }
    return c;
  }

  // The target's basic-formula bribe at each state up to the start, nothing
  // above. Always persuades the target in the first step.
  std::vector<double> seed_schedule() const {
    std::vector<double> b(static_cast<std::size_t>(scenario_.horizon), 0.0);
    for (int i = 0; i <= d0_; ++i) {
      b[i] = snap_up(emitted_bribe(basic_threshold(i, scenario_.target_power(), scenario_.mu(),
                                                   scenario_.lambda(), scenario_.reward)));
    }
    return b;
  }

  Candidate descend(Candidate current) const {
    for (int sweep = 0; sweep < options_.max_sweeps; ++sweep) {
      bool improved = false;
      for (int i = 0; i <= top_; ++i) {
        for (double v : moves(i, current.bribes[i])) {
          if (v == current.bribes[i]) continue;
          auto trial = current.bribes;
          trial[i] = v;
          auto c = evaluate(trial);
          if (c && better(*c, current)) {
            current = std::move(*c);
            improved = true;
          }
        }
        if (auto c = lowest_feasible(current, i); c && better(*c, current)) {
          current = std::move(*c);
          improved = true;
        }
      }
      if (!improved) break;
    }
    return current;
  }

  // Random restart around `from`, repaired so the target stays persuaded.
  std::vector<double> perturb(const std::vector<double>& from, SplitMix64& rng) const {
    const auto floor = seed_schedule();
    auto b = from;
    for (int i = 0; i <= top_; ++i) {
      const double u = rng.uniform();
      if (i > d0_ && u < 0.25) {
        b[i] = 0.0;
        continue;
      }
      const double factor = std::exp2(4.0 * rng.uniform() - 2.0);
      b[i] = snap_up(std::max(kSatoshi, (b[i] > 0.0 ? b[i] : floor[std::min(i, d0_)]) * factor));
    }
    if (!evaluate(b)) {
      for (int i = 0; i <= d0_; ++i) b[i] = std::max(b[i], floor[i]);
    }
    return b;
  }

 private:
  double snap_up(double x) const {
    if (x <= kSatoshi) return kSatoshi;
    return std::ceil(x / options_.quantum - 1e-9) * options_.quantum;
  }

  std::vector<double> moves(int i, double v) const {
    std::vector<double> out{kSatoshi};
    if (i > d0_) out.push_back(0.0);
    static constexpr std::array<double, 10> kFactors{0.5, 0.8, 0.9, 0.95, 0.99,
                                                     1.01, 1.05, 1.1, 1.25, 2.0};
    static constexpr std::array<int, 4> kSteps{1, 5, 25, 100};
    if (v > 0.0) {
      for (double f : kFactors) out.push_back(snap_up(v * f));
      for (int k : kSteps) {
        out.push_back(snap_up(v + k * options_.quantum));
        if (v - k * options_.quantum > 0.0) out.push_back(snap_up(v - k * options_.quantum));
      }
    }
    out.push_back(snap_up(emitted_bribe(basic_threshold(
        i, scenario_.target_power(), scenario_.mu(), scenario_.lambda(), scenario_.reward))));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Bisection on the quantized grid for the smallest bribe at state i that
  // keeps the schedule feasible, holding the other states fixed.
  std::optional<Candidate> lowest_feasible(const Candidate& current, int i) const {
    double hi = current.bribes[i];
    if (hi <= kSatoshi) return std::nullopt;
    auto trial = current.bribes;
    trial[i] = kSatoshi;
    if (auto c = evaluate(trial)) return c;
    double lo = kSatoshi;
    std::optional<Candidate> best;
    while (hi - lo > options_.quantum * 1.5) {
      const double mid = snap_up(0.5 * (lo + hi));
      if (mid >= hi) break;
      trial[i] = mid;
      if (auto c = evaluate(trial)) {
        hi = mid;
        best = std::move(c);
      } else {
        lo = mid;
      }
    }
    return best;
  }

  const Scenario& scenario_;
  GvcObjective objective_;
  GvcSearchOptions options_;
  int d0_;
  int top_;
};

}  // namespace

GvcOptimum optimize_gvc(const Scenario& scenario, GvcObjective objective,
                        const GvcSearchOptions& options) {
  require(options.restarts >= 0 && options.max_sweeps >= 1 && options.quantum > 0.0,
          ErrorCode::kInvalidArgument, "invalid search options");
  const Search search(scenario, objective, options);
  auto start = search.evaluate(search.seed_schedule());
  if (!start) fail(ErrorCode::kInfeasible, "no bribe schedule persuades the target miner");

  Candidate best = search.descend(std::move(*start));
  SplitMix64 rng(options.seed);
  for (int r = 0; r < options.restarts; ++r) {
    auto c = search.evaluate(search.perturb(best.bribes, rng));
    if (!c) continue;
    Candidate local = search.descend(std::move(*c));
    if (better(local, best)) best = std::move(local);
  }
  return {std::move(best.outcome), best.objective};
}

}  // namespace bribery
