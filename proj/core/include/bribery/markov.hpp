#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bribery/linalg.hpp"
#include "bribery/model.hpp"

namespace bribery {

// Column indices of the absorbing states in G and B.
inline constexpr std::size_t kSuccess = 0;  // V: the fork overtakes
inline constexpr std::size_t kFailure = 1;  // W: the gap exceeds the horizon

// Birth-death chain over the gap between the main chain and the fork.
// From transient state i a fork block (probability fork_power(i)) moves to
// i - 1, or into V from state 0; a main-chain block moves to i + 1, or into W
// from the last state.
//
// Fork power may reach 1 (every miner on the fork); it may not reach 0, which
// keeps V reachable from every state and I - Q nonsingular.
class AbsorbingChain {
 public:
  explicit AbsorbingChain(std::vector<double> fork_power);

  static AbsorbingChain constant(std::size_t states, double fork_power);

  std::size_t size() const { return fork_power_.size(); }
  double fork_power(std::size_t i) const { return fork_power_[i]; }
  double main_power(std::size_t i) const { return 1.0 - fork_power_[i]; }
  std::span<const double> fork_powers() const { return fork_power_; }

  friend bool operator==(const AbsorbingChain&, const AbsorbingChain&) = default;

 private:
  std::vector<double> fork_power_;
};

// Chain for a scenario from an explicit per-state fork power vector of length
// scenario.horizon.
AbsorbingChain build_base_chain(const Scenario& scenario,
                                std::span<const double> per_state_fork_power);

struct CanonicalForm {
  Matrix q;  // h x h transient-to-transient
  Matrix g;  // h x 2 transient-to-absorbing, columns V then W
};

CanonicalForm canonical_form(const AbsorbingChain& chain);

// N = (I - Q)^-1 via dense LU. Throws kSingularMatrix if I - Q is singular or
// the residual ||(I - Q)N - I||_inf exceeds 1e-8.
Matrix fundamental_matrix(const CanonicalForm& cf);

// e = N * 1
std::vector<double> expected_steps(const Matrix& n);

// B = N * G
Matrix absorption_probs(const Matrix& n, const Matrix& g);

struct AbsorptionAnalysis {
  Matrix n;
  std::vector<double> steps;
  Matrix b;

  double success(std::size_t state) const { return b(state, kSuccess); }
  double failure(std::size_t state) const { return b(state, kFailure); }
};

AbsorptionAnalysis analyze(const AbsorbingChain& chain);

// Column V of B alone, from a tridiagonal solve of (I - Q) x = G[:, V].
// Used in the inner loops of the strategy search where only the success
// probability is needed.
std::vector<double> success_probabilities(const AbsorbingChain& chain);

// Covariance of the visit counts V_j, V_k starting from `start`:
// E[V_j V_k] = N_sj N_jk + N_sk N_kj - [j == k] N_sj.
Matrix visit_covariance(const Matrix& n, std::size_t start);

// Fundamental matrix of the same chain conditioned on absorption in V:
// N'_jk = N_jk B_kV / B_jV. Rows with B_jV = 0 are left at zero.
Matrix success_conditioned(const Matrix& n, const Matrix& b);

// Infinite-horizon probability that a fork with constant power `mu_eff` ever
// overtakes a chain `i + 1` blocks ahead: (mu_eff / lambda_eff)^(i + 1),
// or 1 when the fork is at least as strong.
double catchup_prob(double mu_eff, double lambda_eff, int i);

}  // namespace bribery
