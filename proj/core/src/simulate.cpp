#include "bribery/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "bribery/error.hpp"
#include "bribery/rng.hpp"

namespace bribery {

namespace {

// Running mean and sum of squared deviations; merged pairwise (Chan et al.).
struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    const double total = n + o.n;
    const double delta = o.mean - mean;
    mean += delta * o.n / total;
    m2 += o.m2 + delta * delta * n * o.n / total;
    n = total;
  }

  Estimate estimate() const {
    if (n < 2.0) return {mean, 0.0};
    return {mean, std::sqrt(m2 / (n - 1.0) / n)};
  }
};

struct Tally {
  std::uint64_t completed = 0;
  std::uint64_t discarded = 0;
  std::uint64_t successes = 0;
  Moments success;
  Moments steps;
  std::vector<Moments> visits;
  Moments cost;
  Moments cost_on_success;

  explicit Tally(std::size_t h) : visits(h) {}

  void merge(const Tally& o) {
    completed += o.completed;
    discarded += o.discarded;
    successes += o.successes;
    success.merge(o.success);
    steps.merge(o.steps);
    for (std::size_t i = 0; i < visits.size(); ++i) visits[i].merge(o.visits[i]);
    cost.merge(o.cost);
    cost_on_success.merge(o.cost_on_success);
  }
};

class Race {
 public:
  Race(const Scenario& scenario, const RacePolicy& policy, const SimConfig& config)
      : scenario_(scenario), policy_(policy), config_(config),
        h_(static_cast<int>(policy.bribes.size())) {}

  void run_trial(std::uint64_t index, Tally& tally, std::vector<double>& visits,
                 std::vector<std::uint8_t>& sticky) const {
    SplitMix64 rng(config_.seed ^ index);
    const auto& roster = scenario_.miner_set.miners();
    std::fill(visits.begin(), visits.end(), 0.0);
    std::fill(sticky.begin(), sticky.end(), 0);
    int state = scenario_.start_state();
    double cost = 0.0;
    std::uint64_t events = 0;
    while (state >= 0 && state < h_) {
      if (events == max_events()) {
        ++tally.discarded;
        return;
      }
      ++events;
      visits[state] += 1.0;
      cost += policy_.bribes[state];
      if (config_.retention == RetentionRule::kSticky) {
        for (std::size_t k = 0; k < roster.size(); ++k) {
          if (policy_.membership(k, state)) sticky[k] = 1;
        }
      }

      // Categorical draw over the attacker and every miner.
      double u = rng.uniform();
      bool on_fork = true;
      u -= scenario_.mu();
      if (u >= 0.0) {
        std::size_t k = 0;
        for (; k + 1 < roster.size(); ++k) {
          u -= roster[k].power;
          if (u < 0.0) break;
        }
        on_fork = policy_.membership(k, state) ||
                  (config_.retention == RetentionRule::kSticky && sticky[k] != 0);
      }
      state += on_fork ? -1 : 1;
    }
    const double won = state < 0 ? 1.0 : 0.0;
    ++tally.completed;
    tally.successes += state < 0 ? 1 : 0;
    tally.success.add(won);
    tally.steps.add(static_cast<double>(events));
    for (std::size_t i = 0; i < visits.size(); ++i) tally.visits[i].add(visits[i]);
    tally.cost.add(cost);
    if (state < 0) tally.cost_on_success.add(cost);
  }

  std::uint64_t max_events() const {
    return config_.max_events != 0 ? config_.max_events
                                   : static_cast<std::uint64_t>(1000) * h_;
  }

 private:
  const Scenario& scenario_;
  const RacePolicy& policy_;
  const SimConfig& config_;
  int h_;
};

// Fixed-size chunks merged in index order, so the result does not depend on
// how chunks are spread over threads.
constexpr std::uint64_t kChunk = 1 << 14;

}  // namespace

RacePolicy policy_from(const StrategyOutcome& outcome) {
  return {outcome.schedule.bribes, outcome.membership};
}

SimReport simulate_race(const Scenario& scenario, const RacePolicy& policy,
                        const SimConfig& config) {
  const std::size_t h = policy.bribes.size();
  require(config.trials >= 1, ErrorCode::kInvalidArgument, "at least one trial is required");
  require(h == static_cast<std::size_t>(scenario.horizon), ErrorCode::kInvalidArgument,
          "policy length must equal the horizon");
  require(policy.membership.states() == h &&
              policy.membership.miners() == scenario.miner_set.size(),
          ErrorCode::kInvalidArgument, "policy membership shape does not match the scenario");
  require(config.max_events == 0 || config.max_events >= 100 * h, ErrorCode::kInvalidArgument,
          "max_events must be at least 100 times the horizon");

  const Race race(scenario, policy, config);
  const std::uint64_t chunks = (config.trials + kChunk - 1) / kChunk;
  std::vector<Tally> partial(chunks, Tally(h));

  unsigned threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  threads = static_cast<unsigned>(std::clamp<std::uint64_t>(threads, 1, chunks));

  auto work = [&](unsigned worker) {
    std::vector<double> visits(h);
    std::vector<std::uint8_t> sticky(scenario.miner_set.size());
    for (std::uint64_t c = worker; c < chunks; c += threads) {
      const std::uint64_t end = std::min(config.trials, (c + 1) * kChunk);
      for (std::uint64_t t = c * kChunk; t < end; ++t) race.run_trial(t, partial[c], visits, sticky);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  Tally total(h);
  for (const auto& p : partial) total.merge(p);

  SimReport report;
  report.trials = config.trials;
  report.completed = total.completed;
  report.discarded = total.discarded;
  report.successes = total.successes;
  report.success = total.success.estimate();
  report.steps = total.steps.estimate();
  for (const auto& v : total.visits) report.visits.push_back(v.estimate());
  report.cost_unconditional = total.cost.estimate();
  if (total.cost_on_success.n > 0.0) report.cost_on_success = total.cost_on_success.estimate();
  return report;
}

bool Comparison::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const MetricCheck& c) { return c.pass; });
}

Comparison compare_reports(const StrategyOutcome& analytic, const SimReport& empirical,
                           double z) {
  require(empirical.completed > 0, ErrorCode::kInvalidArgument,
          "the simulation completed no trials");
  require(z > 0.0, ErrorCode::kInvalidArgument, "z must be positive");
  const std::size_t h = analytic.visits.size();
  require(empirical.visits.size() == h && analytic.chain.size() == h &&
              analytic.schedule.bribes.size() == h,
          ErrorCode::kInvalidArgument, "reports cover different state spaces");

  // Per-trial variances implied by the analytic chain. A small sample can
  // show no spread at all, so the test uses whichever error is larger.
  const auto start = static_cast<std::size_t>(analytic.start_state);
  const AbsorptionAnalysis a = analyze(analytic.chain);
  const Matrix cov = visit_covariance(a.n, start);
  const auto& bribes = analytic.schedule.bribes;
  auto quadratic = [&](const Matrix& m, bool weighted) {
    double sum = 0.0;
    for (std::size_t j = 0; j < h; ++j) {
      for (std::size_t k = 0; k < h; ++k) {
        sum += (weighted ? bribes[j] * bribes[k] : 1.0) * m(j, k);
      }
    }
    return std::max(sum, 0.0);
  };

  Comparison out;
  auto check = [&](std::string name, double expected, const Estimate& e, double variance,
                   double n) {
    const double se = std::max(e.std_error, std::sqrt(variance / n));
    const double delta = std::abs(expected - e.mean);
    const bool ok = se > 0.0 ? delta <= z * se
                             : delta <= 1e-9 * std::max(1.0, std::abs(expected));
    out.checks.push_back({std::move(name), expected, e.mean, se, ok});
  };
  const auto n = static_cast<double>(empirical.completed);
  const double p = analytic.success_prob;
  check("success_prob", p, empirical.success, p * (1.0 - p), n);
  check("expected_steps", analytic.expected_steps, empirical.steps, quadratic(cov, false), n);
  for (std::size_t i = 0; i < h; ++i) {
    check("visits_" + std::to_string(i), analytic.visits[i], empirical.visits[i],
          std::max(cov(i, i), 0.0), n);
  }
  check("cost_unconditional", analytic.cost_unconditional, empirical.cost_unconditional,
        quadratic(cov, true), n);
  if (analytic.cost_on_success && empirical.cost_on_success) {
    const Matrix cond = visit_covariance(success_conditioned(a.n, a.b), start);
    check("cost_on_success", *analytic.cost_on_success, *empirical.cost_on_success,
          quadratic(cond, true), static_cast<double>(empirical.successes));
  } else if (!analytic.cost_on_success && empirical.cost_on_success) {
    // The chain says success is impossible, yet the simulation succeeded.
    out.checks.push_back({"cost_on_success", 0.0, empirical.cost_on_success->mean, 0.0, false});
  }
  return out;
}

}  // namespace bribery
