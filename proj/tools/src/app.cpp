#include "bribery_cli/app.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "bribery/error.hpp"
#include "bribery/model.hpp"
#include "bribery/simulate.hpp"
#include "bribery/strategies.hpp"
#include "bribery_cli/report.hpp"

namespace bribery::cli {

namespace {

using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string pools;
  std::optional<std::string> attacker;
  std::optional<std::string> target;
  int confirmations = 6;
  int premined = 1;
  double reward = 6.25;
  std::optional<int> start_state;
  std::vector<std::string> strategies;
  std::optional<std::string> objective;
  std::string scope = "all";
  std::string columns = "failure-success";
  std::vector<std::string> schedule;
  int restarts = 32;
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  double z = 3.0;
  std::string format = "csv";
  std::optional<std::string> out;
  std::vector<int> states;
  std::vector<double> rewards;
  bool corrupt_schedule = false;
};

const std::vector<std::string> kStrategyNames{"bs", "bff", "crb1", "crb2", "gvc"};

int strategy_rank(const std::string& name) {
  return static_cast<int>(std::find(kStrategyNames.begin(), kStrategyNames.end(), name) -
                          kStrategyNames.begin());
}

void check_strategies(const RunConfig& cfg, bool single) {
  if (cfg.strategies.empty()) throw UsageError("--strategy is required");
  if (single && cfg.strategies.size() != 1) throw UsageError("exactly one --strategy expected");
  bool gvc = false;
  for (const auto& s : cfg.strategies) {
    if (strategy_rank(s) == static_cast<int>(kStrategyNames.size())) {
      throw UsageError("unknown strategy '" + s + "' (expected bs, bff, crb1, crb2 or gvc)");
    }
    gvc = gvc || s == "gvc";
  }
  if (gvc && !cfg.objective && cfg.schedule.empty()) {
    throw UsageError("--objective (ac or rac) is required for gvc");
  }
  if (!gvc && cfg.objective) throw UsageError("--objective only applies to gvc");
  if (!gvc && !cfg.schedule.empty()) throw UsageError("--schedule only applies to gvc");
}

Scenario build_scenario(const RunConfig& cfg, std::optional<double> reward = std::nullopt) {
  MinerSet set = load_pool_file(cfg.pools, cfg.attacker);
  require(set.size() > 0, ErrorCode::kInvalidArgument, "pool file has no main-chain miners");
  const std::string target = cfg.target.value_or(set.miners().front().id);
  if (cfg.start_state && *cfg.start_state > cfg.confirmations) {
    throw UsageError("--start-state must not exceed --confirmations");
  }
  Scenario s = make_scenario(std::move(set), target, cfg.confirmations, cfg.premined,
                             reward.value_or(cfg.reward));
  if (cfg.start_state) s = with_start_state(std::move(s), *cfg.start_state);
  return s;
}

std::vector<double> parse_schedule(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& item : items) {
    if (item == "eps" || item == "e") {
      out.push_back(kSatoshi);
      continue;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw UsageError("bad --schedule entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

StrategyOutcome run_strategy(const Scenario& scenario, const std::string& name,
                             const RunConfig& cfg) {
  if (name == "bs") return run_bs(scenario);
  if (name == "bff") return run_bff(scenario);
  if (name == "crb1") return run_crb(scenario, CrbVariant::kFromConfirmationDepth);
  if (name == "crb2") return run_crb(scenario, CrbVariant::kFromStartState);

  GvcOptions gvc;
  gvc.scope = cfg.scope == "target" ? RecruitScope::kTargetOnly : RecruitScope::kAllMiners;
  gvc.columns = cfg.columns == "success-failure" ? ColumnReading::kSuccessOverFailure
                                                 : ColumnReading::kFailureOverSuccess;
  const bool rac = cfg.objective && *cfg.objective == "rac";
  if (!cfg.schedule.empty()) {
    BribeSchedule schedule;
    schedule.bribes = parse_schedule(cfg.schedule);
    if (schedule.bribes.size() != static_cast<std::size_t>(scenario.horizon)) {
      throw UsageError("--schedule needs " + std::to_string(scenario.horizon) + " entries");
    }
    schedule.tag = rac ? StrategyKind::kGvcRac : StrategyKind::kGvcAc;
    return run_gvc(scenario, std::move(schedule), gvc);
  }
  GvcSearchOptions search;
  search.restarts = cfg.restarts;
  search.seed = cfg.seed;
  search.gvc = gvc;
  return optimize_gvc(scenario,
                      rac ? GvcObjective::kAverageCostOnSuccess : GvcObjective::kAverageCost,
                      search)
      .outcome;
}

// Rounded the same way as the CSV text so both formats carry one value.
double btc_value(double btc) { return std::stod(format_btc(btc)); }
double prob_value(double p) { return std::stod(format_prob(p)); }

ordered_json btc_json(const std::optional<double>& btc) {
  return btc ? ordered_json(btc_value(*btc)) : ordered_json(nullptr);
}

std::string members_at(const Scenario& scenario, const MembershipMatrix& m, std::size_t state) {
  std::vector<std::string> ids;
  for (std::size_t k = 0; k < m.miners(); ++k) {
    if (m(k, state)) ids.push_back(scenario.miner_set.miners()[k].id);
  }
  return join(ids, ";");
}

ordered_json recapture_json(const Recapture& r) {
  return {{"attacker", btc_value(r.attacker)},
          {"target", btc_value(r.target)},
          {"others", btc_value(r.others)}};
}

ordered_json scenario_json(const Scenario& s) {
  return {{"attacker", s.miner_set.attacker().id},
          {"attacker_power", s.mu()},
          {"target", s.target_id},
          {"target_power", s.target_power()},
          {"confirmations", s.confirmations},
          {"premined", s.premined},
          {"reward", s.reward},
          {"start_state", s.start_state()},
          {"horizon", s.horizon}};
}

ordered_json outcome_json(const Scenario& scenario, const StrategyOutcome& o) {
  ordered_json states = ordered_json::array();
  for (std::size_t i = 0; i < o.schedule.bribes.size(); ++i) {
    const auto& req = o.schedule.required[i];
    states.push_back({{"state", i},
                      {"bribe", btc_value(o.schedule.bribes[i])},
                      {"required", req ? ordered_json(btc_value(*req)) : ordered_json(nullptr)},
                      {"visits", prob_value(o.visits[i])},
                      {"fork_power", prob_value(o.chain.fork_power(i))},
                      {"members", members_at(scenario, o.membership, i)}});
  }
  return {{"strategy", std::string(to_string(o.strategy))},
          {"start_state", o.start_state},
          {"committed", o.schedule.committed},
          {"success_prob", prob_value(o.success_prob)},
          {"catchup_success", prob_value(o.catchup_success)},
          {"expected_steps", prob_value(o.expected_steps)},
          {"cost_unconditional", btc_value(o.cost_unconditional)},
          {"cost_on_success", btc_json(o.cost_on_success)},
          {"recapture", recapture_json(o.recapture)},
          {"single_visit_cost", btc_value(o.single_visit_cost)},
          {"single_visit_recapture", recapture_json(o.single_visit_recapture)},
          {"states", states}};
}

std::string dump(const ordered_json& j) {
  std::string text = j.dump(2);
  // The only value that prints in exponent form is the one-satoshi bribe.
  for (std::size_t pos = 0; (pos = text.find("1e-08", pos)) != std::string::npos;) {
    text.replace(pos, 5, "1e-8");
  }
  return text + "\n";
}

std::string percent(double p) { return format_prob(100.0 * p) + "%"; }

void write_summary(std::ostream& os, const Scenario& scenario, const StrategyOutcome& o) {
  std::vector<std::string> bribes;
  for (double b : o.schedule.bribes) bribes.push_back(format_btc(b));
  os << "strategy      " << to_string(o.strategy) << " (target " << scenario.target_id
     << ", start state " << o.start_state << ")\n"
     << "success       " << percent(o.success_prob) << " within the horizon, catch-up "
     << percent(o.catchup_success) << "\n"
     << "average cost  " << format_btc(o.cost_unconditional) << " BTC, "
     << format_btc(o.cost_on_success) << " BTC when successful\n"
     << "single visit  " << format_btc(o.single_visit_cost) << " BTC, recaptured "
     << format_btc(o.single_visit_recapture.attacker) << " by the attacker and "
     << format_btc(o.single_visit_recapture.target) << " by the target\n"
     << "bribes        " << join(bribes, " ") << "\n";
}

const std::vector<std::string> kSummaryColumns{
    "strategy",          "start_state",        "success_prob",     "catchup_success",
    "expected_steps",    "cost_unconditional", "cost_on_success",  "single_visit_cost",
    "attacker_recapture", "target_recapture",  "bribes"};

std::vector<std::string> summary_fields(const StrategyOutcome& o) {
  std::vector<std::string> bribes;
  for (double b : o.schedule.bribes) bribes.push_back(format_btc(b));
  return {std::string(to_string(o.strategy)),
          std::to_string(o.start_state),
          format_prob(o.success_prob),
          format_prob(o.catchup_success),
          format_prob(o.expected_steps),
          format_btc(o.cost_unconditional),
          format_btc(o.cost_on_success),
          format_btc(o.single_visit_cost),
          format_btc(o.recapture.attacker),
          format_btc(o.recapture.target),
          join(bribes, ";")};
}

ordered_json summary_json(const StrategyOutcome& o) {
  ordered_json bribes = ordered_json::array();
  for (double b : o.schedule.bribes) bribes.push_back(btc_value(b));
  return {{"strategy", std::string(to_string(o.strategy))},
          {"start_state", o.start_state},
          {"success_prob", prob_value(o.success_prob)},
          {"catchup_success", prob_value(o.catchup_success)},
          {"expected_steps", prob_value(o.expected_steps)},
          {"cost_unconditional", btc_value(o.cost_unconditional)},
          {"cost_on_success", btc_json(o.cost_on_success)},
          {"single_visit_cost", btc_value(o.single_visit_cost)},
          {"attacker_recapture", btc_value(o.recapture.attacker)},
          {"target_recapture", btc_value(o.recapture.target)},
          {"bribes", bribes}};
}

// Writes to --out when given, otherwise to the command's output stream.
class Sink {
 public:
  Sink(const RunConfig& cfg, std::ostream& fallback) : stream_(&fallback) {
    if (cfg.out) {
      file_.open(*cfg.out, std::ios::binary);
      require(file_.good(), ErrorCode::kInvalidArgument, "cannot write " + *cfg.out);
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  check_strategies(cfg, true);
  const Scenario scenario = build_scenario(cfg);
  const StrategyOutcome o = run_strategy(scenario, cfg.strategies.front(), cfg);
  Sink sink(cfg, out);
  if (cfg.format == "json") {
    sink.stream() << dump({{"schema_version", kSchemaVersion},
                           {"command", "analyze"},
                           {"scenario", scenario_json(scenario)},
                           {"outcome", outcome_json(scenario, o)}});
  } else {
    auto columns = kSummaryColumns;
    columns.pop_back();
    for (const char* c : {"state", "bribe", "required", "visits", "fork_power", "members"}) {
      columns.emplace_back(c);
    }
    CsvWriter csv(sink.stream(), columns);
    auto head = summary_fields(o);
    head.pop_back();
    for (std::size_t i = 0; i < o.schedule.bribes.size(); ++i) {
      auto row = head;
      const auto& req = o.schedule.required[i];
      row.push_back(std::to_string(i));
      row.push_back(format_btc(o.schedule.bribes[i]));
      row.push_back(req ? format_btc(*req) : std::string());
      row.push_back(format_prob(o.visits[i]));
      row.push_back(format_prob(o.chain.fork_power(i)));
      row.push_back(members_at(scenario, o.membership, i));
      csv.row(row);
    }
  }
  write_summary(sink.to_file() ? out : err, scenario, o);
  return kExitOk;
}

int cmd_sweep_start(RunConfig cfg, std::ostream& out) {
  check_strategies(cfg, false);
  if (cfg.states.empty()) throw UsageError("--states must list at least one start state");
  auto states = cfg.states;
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
  auto strategies = cfg.strategies;
  std::stable_sort(strategies.begin(), strategies.end(), [](const auto& a, const auto& b) {
    return strategy_rank(a) < strategy_rank(b);
  });
  strategies.erase(std::unique(strategies.begin(), strategies.end()), strategies.end());

  std::vector<StrategyOutcome> rows;
  for (const auto& name : strategies) {
    for (int state : states) {
      if (state < 1 || state > cfg.confirmations) {
        throw UsageError("start state " + std::to_string(state) + " outside [1, C]");
      }
      cfg.start_state = state;
      rows.push_back(run_strategy(build_scenario(cfg), name, cfg));
    }
  }
  Sink sink(cfg, out);
  if (cfg.format == "json") {
    ordered_json list = ordered_json::array();
    for (const auto& o : rows) list.push_back(summary_json(o));
    sink.stream() << dump(
        {{"schema_version", kSchemaVersion}, {"command", "sweep-start"}, {"rows", list}});
  } else {
    CsvWriter csv(sink.stream(), kSummaryColumns);
    for (const auto& o : rows) csv.row(summary_fields(o));
  }
  return kExitOk;
}

int cmd_sweep_reward(const RunConfig& cfg, std::ostream& out) {
  check_strategies(cfg, false);
  if (cfg.rewards.empty()) throw UsageError("--rewards must list at least one block reward");
  for (double f : cfg.rewards) {
    require(std::isfinite(f) && f > 0.0, ErrorCode::kInvalidArgument,
            "block rewards must be positive");
  }
  auto rewards = cfg.rewards;
  std::sort(rewards.begin(), rewards.end(), std::greater<>());
  rewards.erase(std::unique(rewards.begin(), rewards.end()), rewards.end());
  auto strategies = cfg.strategies;
  std::stable_sort(strategies.begin(), strategies.end(), [](const auto& a, const auto& b) {
    return strategy_rank(a) < strategy_rank(b);
  });
  strategies.erase(std::unique(strategies.begin(), strategies.end()), strategies.end());

  std::vector<std::pair<double, StrategyOutcome>> rows;
  for (double f : rewards) {
    for (const auto& name : strategies) {
      rows.emplace_back(f, run_strategy(build_scenario(cfg, f), name, cfg));
    }
  }
  char reward_text[32];
  Sink sink(cfg, out);
  if (cfg.format == "json") {
    ordered_json list = ordered_json::array();
    for (const auto& [f, o] : rows) {
      ordered_json row{{"reward", f}};
      row.update(summary_json(o));
      list.push_back(row);
    }
    sink.stream() << dump(
        {{"schema_version", kSchemaVersion}, {"command", "sweep-reward"}, {"rows", list}});
  } else {
    auto columns = kSummaryColumns;
    columns.insert(columns.begin() + 1, "reward");
    CsvWriter csv(sink.stream(), columns);
    for (const auto& [f, o] : rows) {
      auto fields = summary_fields(o);
      std::snprintf(reward_text, sizeof reward_text, "%.10g", f);
      fields.insert(fields.begin() + 1, reward_text);
      csv.row(fields);
    }
  }
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  check_strategies(cfg, true);
  const Scenario scenario = build_scenario(cfg);
  const StrategyOutcome analytic = run_strategy(scenario, cfg.strategies.front(), cfg);
  RacePolicy policy = policy_from(analytic);
  if (cfg.corrupt_schedule) {
    // Negative control: pay more than advertised and lose the target at the start.
    for (auto& b : policy.bribes) b = 2.0 * b + 1.0;
    policy.membership.set(scenario.target_index(),
                          static_cast<std::size_t>(scenario.start_state()), false);
  }
  SimConfig sim;
  sim.trials = cfg.trials;
  sim.seed = cfg.seed;
  sim.threads = cfg.threads;
  const SimReport report = simulate_race(scenario, policy, sim);
  const Comparison cmp = compare_reports(analytic, report, cfg.z);

  auto num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return std::string(buf);
  };
  auto in_se = [](const MetricCheck& c) {
    return c.std_error > 0.0 ? std::abs(c.analytic - c.empirical) / c.std_error : 0.0;
  };
  Sink sink(cfg, out);
  if (cfg.format == "json") {
    ordered_json metrics = ordered_json::array();
    for (const auto& c : cmp.checks) {
      metrics.push_back({{"metric", c.metric},
                         {"analytic", c.analytic},
                         {"empirical", c.empirical},
                         {"std_error", c.std_error},
                         {"delta_in_se", in_se(c)},
                         {"pass", c.pass}});
    }
    sink.stream() << dump({{"schema_version", kSchemaVersion},
                           {"command", "validate"},
                           {"strategy", std::string(to_string(analytic.strategy))},
                           {"trials", report.trials},
                           {"completed", report.completed},
                           {"discarded", report.discarded},
                           {"z", cfg.z},
                           {"pass", cmp.pass()},
                           {"metrics", metrics}});
  } else {
    CsvWriter csv(sink.stream(),
                  {"metric", "analytic", "empirical", "std_error", "delta_in_se", "pass"});
    for (const auto& c : cmp.checks) {
      csv.row({c.metric, num(c.analytic), num(c.empirical), num(c.std_error), num(in_se(c)),
               c.pass ? "true" : "false"});
    }
  }
  std::size_t passed = 0;
  for (const auto& c : cmp.checks) passed += c.pass ? 1 : 0;
  std::ostream& log = sink.to_file() ? out : err;
  log << "validate " << to_string(analytic.strategy) << ": " << passed << "/"
      << cmp.checks.size() << " metrics within " << cfg.z << " standard errors ("
      << report.completed << " trials completed, " << report.discarded << " discarded)\n";
  for (const auto& c : cmp.checks) {
    if (!c.pass) {
      log << "  " << c.metric << ": analytic " << num(c.analytic) << ", empirical "
          << num(c.empirical) << " +- " << num(c.std_error) << "\n";
    }
  }
  return cmp.pass() ? kExitOk : kExitMismatch;
}

void error_record(std::ostream& err, std::string_view code, std::string_view message) {
  ordered_json j{{"schema_version", kSchemaVersion},
                 {"error", {{"code", code}, {"message", message}}}};
  err << j.dump() << "\n";
}

void add_scenario_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--pools", cfg.pools, "Pool distribution file")->required();
  cmd->add_option("--attacker", cfg.attacker, "Attacker id (overrides the file's flag)");
  cmd->add_option("--target", cfg.target, "Target miner id (default: largest miner)");
  cmd->add_option("--confirmations", cfg.confirmations, "Confirmation depth C")
      ->check(CLI::Range(1, 64));
  cmd->add_option("--premined", cfg.premined, "Blocks pre-mined by the attacker")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--reward", cfg.reward, "Block reward F in BTC")->check(CLI::PositiveNumber);
  cmd->add_option("--objective", cfg.objective, "GVC objective")
      ->check(CLI::IsMember({"ac", "rac"}));
  cmd->add_option("--scope", cfg.scope, "GVC recruitment scope")
      ->check(CLI::IsMember({"all", "target"}));
  cmd->add_option("--columns", cfg.columns, "GVC second-step column reading")
      ->check(CLI::IsMember({"failure-success", "success-failure"}));
  cmd->add_option("--schedule", cfg.schedule,
                  "Evaluate this GVC bribe vector instead of searching (eps = 1 satoshi)")
      ->delimiter(',');
  cmd->add_option("--restarts", cfg.restarts, "GVC search restarts")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", cfg.seed, "Seed for the GVC search and the simulator");
  cmd->add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", cfg.out, "Report path (default: standard output)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Bribery attack analysis for Bitcoin fork races", "bribery"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Evaluate one strategy");
  add_scenario_options(analyze, cfg);
  analyze->add_option("--start-state", cfg.start_state, "Gap state the attack starts from");
  analyze->add_option("--strategy", cfg.strategies, "bs, bff, crb1, crb2 or gvc")->required();

  auto* sweep_start = app.add_subcommand("sweep-start", "Success and cost per start state");
  add_scenario_options(sweep_start, cfg);
  sweep_start->add_option("--strategy", cfg.strategies, "Strategies, comma separated")
      ->delimiter(',')
      ->required();
  sweep_start->add_option("--states", cfg.states, "Start states, comma separated")
      ->delimiter(',')
      ->required();

  auto* sweep_reward = app.add_subcommand("sweep-reward", "Cost per block reward");
  add_scenario_options(sweep_reward, cfg);
  sweep_reward->add_option("--start-state", cfg.start_state, "Gap state the attack starts from");
  sweep_reward->add_option("--strategy", cfg.strategies, "Strategies, comma separated")
      ->delimiter(',')
      ->required();
  sweep_reward->add_option("--rewards", cfg.rewards, "Block rewards, comma separated")
      ->delimiter(',')
      ->required();

  auto* validate = app.add_subcommand("validate", "Check a strategy against the simulator");
  add_scenario_options(validate, cfg);
  validate->add_option("--start-state", cfg.start_state, "Gap state the attack starts from");
  validate->add_option("--strategy", cfg.strategies, "bs, bff, crb1, crb2 or gvc")->required();
  validate->add_option("--trials", cfg.trials, "Simulated races")->check(CLI::PositiveNumber);
  validate->add_option("--threads", cfg.threads, "Simulator threads (0: all cores)");
  validate->add_option("--z", cfg.z, "Tolerance in standard errors")->check(CLI::PositiveNumber);
  validate->add_flag("--corrupt-schedule", cfg.corrupt_schedule,
                     "Debug: simulate a deliberately wrong policy");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    error_record(err, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(cfg, out, err);
    if (sweep_start->parsed()) return cmd_sweep_start(cfg, out);
    if (sweep_reward->parsed()) return cmd_sweep_reward(cfg, out);
    return cmd_validate(cfg, out, err);
  } catch (const UsageError& e) {
    error_record(err, "usage", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    error_record(err, to_string(e.code()), e.what());
    return kExitError;
  } catch (const std::exception& e) {
    error_record(err, "internal", e.what());
    return kExitError;
  }
}

}  // namespace bribery::cli
