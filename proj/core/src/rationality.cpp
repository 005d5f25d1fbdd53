#include "bribery/rationality.hpp"

#include <cmath>
#include <numeric>

#include "bribery/error.hpp"
#include "bribery/model.hpp"

namespace bribery {

namespace {
constexpr double kThresholdTolerance = 1e-9;
}

double emitted_bribe(double threshold) {
  return threshold > 0.0 ? threshold + kSatoshi : kSatoshi;
}

double basic_multiplier(int i, double p_m, double mu, double lambda) {
  const double fail_if_main = 1.0 - std::pow(mu / lambda, i + 1);
  const double success_if_fork = std::pow((mu + p_m) / (lambda - p_m), i + 1);
  return fail_if_main * (p_m + mu) / (lambda * success_if_fork);
}

double basic_threshold(int i, double p_m, double mu, double lambda, double reward) {
  return basic_multiplier(i, p_m, mu, lambda) * reward - reward;
}

BribeQuote min_bribe_basic(int i, double p_m, double mu, double lambda, double reward,
                           std::string miner_id) {
  require(i >= 0, ErrorCode::kInvalidArgument, "state must be non-negative");
  require(mu > 0.0 && p_m > 0.0, ErrorCode::kInvalidArgument, "powers must be positive");
  require(p_m < lambda, ErrorCode::kInvalidArgument,
          "miner power must be below the whole main-chain power");
  require(std::abs(mu + lambda - 1.0) <= 1e-9, ErrorCode::kInvalidArgument,
          "fork and main powers must sum to 1");
  require(reward > 0.0, ErrorCode::kInvalidArgument, "block reward must be positive");
  return {i, std::move(miner_id), basic_threshold(i, p_m, mu, lambda, reward),
          BribeFormula::kBasic};
}

BribeQuote min_bribe_general(int i, double p_m, double mu_i, double lambda_i, double p_xs,
                             double p_yf, double reward, std::string miner_id) {
  require(p_xs >= 0.0 && p_xs <= 1.0 && p_yf >= 0.0 && p_yf <= 1.0,
          ErrorCode::kInvalidArgument, "probabilities must lie in [0, 1]");
  require(lambda_i > 0.0, ErrorCode::kInvalidArgument, "main-chain power must be positive");
  BribeQuote quote{i, std::move(miner_id), std::nullopt, BribeFormula::kGeneral};
  if (p_xs > 0.0) quote.min_bribe = p_yf * (p_m + mu_i) / (lambda_i * p_xs) * reward - reward;
  return quote;
}

bool staying_condition(std::span<const double> bribes, double p_m,
                       std::span<const double> p_xs, std::span<const double> p_yf,
                       std::span<const double> mu_i, std::span<const double> lambda_i,
                       double reward) {
  const std::size_t h = bribes.size();
  require(p_xs.size() == h && p_yf.size() == h && mu_i.size() == h && lambda_i.size() == h,
          ErrorCode::kInvalidArgument, "per-state vectors must have equal length");
  double fork_side = 0.0;
  double main_side = 0.0;
  for (std::size_t i = 0; i < h; ++i) {
    fork_side += p_xs[i] * p_m / (mu_i[i] + p_m) * (bribes[i] + reward);
    main_side += p_yf[i] * p_m / lambda_i[i] * reward;
  }
  return fork_side > main_side;
}

double crb_min_constant(std::span<const double> visits_from_start,
                        std::span<const double> required, int current_state) {
  require(visits_from_start.size() == required.size(), ErrorCode::kInvalidArgument,
          "visit and bribe vectors must have equal length");
  require(current_state >= 0 && static_cast<std::size_t>(current_state) < required.size(),
          ErrorCode::kInvalidArgument, "current state outside the transient range");
  double weighted = 0.0;
  double weight = 0.0;
  for (int i = current_state; i >= 0; --i) {
    weighted += visits_from_start[i] * required[i];
    weight += visits_from_start[i];
  }
  require(weight > 0.0, ErrorCode::kInvalidArgument, "no expected visits in the summation range");
  return weighted / weight;
}

std::optional<double> persuadable_threshold(int i, double bribe, double mu, double lambda,
                                            double reward) {
  // The basic threshold falls monotonically in the miner's power and tends to
  // -F as the power approaches lambda.
  if (!(bribe > -reward)) return std::nullopt;
  if (bribe > basic_threshold(i, 0.0, mu, lambda, reward)) return 0.0;
  double lo = 0.0;
  double hi = lambda;
  while (hi - lo > kThresholdTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (bribe > basic_threshold(i, mid, mu, lambda, reward)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

ChainChoice choose_chain(double offered_bribe, const BribeQuote& quote) {
  if (quote.min_bribe && offered_bribe > *quote.min_bribe) return ChainChoice::kJoinFork;
  return ChainChoice::kJoinMain;
}

}  // namespace bribery
