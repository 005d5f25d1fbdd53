#pragma once

#include <optional>
#include <span>
#include <string>

namespace bribery {

// Which profitability test produced a quote: the general one driven by
// arbitrary per-state success/failure probabilities, or the basic one that
// assumes constant powers and infinite-horizon catch-up.
enum class BribeFormula { kGeneral, kBasic };

// Minimum bribe that makes mining on the fork strictly more profitable for one
// miner in one state. A negative value means no bribe is needed. An empty
// `min_bribe` marks a state where the fork can never succeed, so no finite
// bribe persuades.
struct BribeQuote {
  int state = 0;
  std::string miner_id;
  std::optional<double> min_bribe;
  BribeFormula formula = BribeFormula::kBasic;

  bool persuadable() const { return min_bribe.has_value(); }
};

// Turns a required threshold into a bribe that strictly clears it; negative
// thresholds become one satoshi.
double emitted_bribe(double threshold);

// Raw right-hand side of the basic test:
//   [(1 - (mu/lambda)^(i+1)) (P_m + mu)] / [lambda ((mu + P_m)/(lambda - P_m))^(i+1)] F - F
// No validation; callers guarantee 0 < p_m < lambda.
double basic_threshold(int i, double p_m, double mu, double lambda, double reward);

// (R + F) / F from the formula above. Orders miners exactly like R but keeps
// its precision where R itself rounds to -F.
double basic_multiplier(int i, double p_m, double mu, double lambda);

// Throws kInvalidArgument unless 0 < p_m < lambda, mu > 0 and mu + lambda == 1.
BribeQuote min_bribe_basic(int i, double p_m, double mu, double lambda, double reward,
                           std::string miner_id = {});

// R = P_YF (P_m + mu_i) / (lambda_i P_XS) F - F, where P_XS is the success
// probability if the miner joins the fork and P_YF the failure probability if
// it stays on the main chain.
BribeQuote min_bribe_general(int i, double p_m, double mu_i, double lambda_i, double p_xs,
                             double p_yf, double reward, std::string miner_id = {});

// Summed-over-states condition for keeping a miner on the fork. Necessary,
// not sufficient: persuasion must still hold state by state.
bool staying_condition(std::span<const double> bribes, double p_m,
                       std::span<const double> p_xs, std::span<const double> p_yf,
                       std::span<const double> mu_i, std::span<const double> lambda_i,
                       double reward);

// Constant bribe a miner needs when it weighs the per-state minima from
// `current_state` down to state 0 by the expected visits from the start state.
double crb_min_constant(std::span<const double> visits_from_start,
                        std::span<const double> required, int current_state);

// Smallest miner power that the basic test deems persuaded by bribe `bribe`
// in state i, found by bisection to 1e-9. Every miner at or above the returned
// power joins. Empty when no power below lambda is persuaded.
std::optional<double> persuadable_threshold(int i, double bribe, double mu, double lambda,
                                            double reward);

enum class ChainChoice { kJoinFork, kJoinMain };

// A miner joins the fork only when the offered bribe strictly exceeds its
// quote; indifference keeps it on the main chain.
ChainChoice choose_chain(double offered_bribe, const BribeQuote& quote);

}  // namespace bribery
