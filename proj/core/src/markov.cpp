#include "bribery/markov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bribery/error.hpp"

namespace bribery {

namespace {
constexpr double kResidualLimit = 1e-8;
}

AbsorbingChain::AbsorbingChain(std::vector<double> fork_power)
    : fork_power_(std::move(fork_power)) {
  require(!fork_power_.empty(), ErrorCode::kInvalidArgument, "chain needs at least one state");
  for (std::size_t i = 0; i < fork_power_.size(); ++i) {
    const double p = fork_power_[i];
    require(std::isfinite(p) && p > 0.0 && p <= 1.0, ErrorCode::kDegenerateChain,
            "fork power at state " + std::to_string(i) + " must lie in (0, 1], got " +
                std::to_string(p));
  }
}

AbsorbingChain AbsorbingChain::constant(std::size_t states, double fork_power) {
  return AbsorbingChain(std::vector<double>(states, fork_power));
}

AbsorbingChain build_base_chain(const Scenario& scenario,
                                std::span<const double> per_state_fork_power) {
  require(per_state_fork_power.size() == static_cast<std::size_t>(scenario.horizon),
          ErrorCode::kInvalidArgument, "fork power vector length must equal the horizon");
  return AbsorbingChain({per_state_fork_power.begin(), per_state_fork_power.end()});
}

CanonicalForm canonical_form(const AbsorbingChain& chain) {
  const std::size_t h = chain.size();
  CanonicalForm cf{Matrix(h, h), Matrix(h, 2)};
  for (std::size_t i = 0; i < h; ++i) {
    const double down = chain.fork_power(i);
    const double up = chain.main_power(i);
    if (i == 0) {
      cf.g(i, kSuccess) += down;
    } else {
      cf.q(i, i - 1) += down;
    }
    if (i + 1 == h) {
      cf.g(i, kFailure) += up;
    } else {
      cf.q(i, i + 1) += up;
    }
  }
  return cf;
}

Matrix fundamental_matrix(const CanonicalForm& cf) {
  const Matrix i_minus_q = Matrix::identity(cf.q.rows()) - cf.q;
  Matrix n = LuDecomposition(i_minus_q).inverse();
  const double residual = norm_inf(i_minus_q * n - Matrix::identity(n.rows()));
  require(residual < kResidualLimit, ErrorCode::kSingularMatrix,
          "fundamental matrix residual too large: " + std::to_string(residual));
  return n;
}

std::vector<double> expected_steps(const Matrix& n) {
  const std::vector<double> ones(n.cols(), 1.0);
  return n * std::span<const double>(ones);
}

Matrix absorption_probs(const Matrix& n, const Matrix& g) { return n * g; }

AbsorptionAnalysis analyze(const AbsorbingChain& chain) {
  const auto cf = canonical_form(chain);
  auto n = fundamental_matrix(cf);
  auto steps = expected_steps(n);
  auto b = absorption_probs(n, cf.g);
  return {std::move(n), std::move(steps), std::move(b)};
}

std::vector<double> success_probabilities(const AbsorbingChain& chain) {
  // Thomas algorithm; I - Q is irreducibly diagonally dominant so no pivoting
  // is needed. Row i: -down_i x_{i-1} + x_i - up_i x_{i+1} = [i == 0] down_0.
  const std::size_t h = chain.size();
  std::vector<double> c(h, 0.0);
  std::vector<double> d(h, 0.0);
  for (std::size_t i = 0; i < h; ++i) {
    const double lower = i == 0 ? 0.0 : -chain.fork_power(i);
    const double upper = i + 1 == h ? 0.0 : -chain.main_power(i);
    const double rhs = i == 0 ? chain.fork_power(0) : 0.0;
    const double denom = 1.0 - (i == 0 ? 0.0 : lower * c[i - 1]);
    c[i] = upper / denom;
    d[i] = (rhs - (i == 0 ? 0.0 : lower * d[i - 1])) / denom;
  }
  std::vector<double> x(h);
  x[h - 1] = d[h - 1];
  for (std::size_t i = h - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  for (auto& v : x) v = std::clamp(v, 0.0, 1.0);  // rounding can overshoot by an ulp
  return x;
}

Matrix visit_covariance(const Matrix& n, std::size_t start) {
  require(start < n.rows(), ErrorCode::kInvalidArgument, "start state outside the chain");
  const std::size_t h = n.rows();
  Matrix cov(h, h);
  for (std::size_t j = 0; j < h; ++j) {
    for (std::size_t k = 0; k < h; ++k) {
      double second = n(start, j) * n(j, k) + n(start, k) * n(k, j);
      if (j == k) second -= n(start, j);
      cov(j, k) = second - n(start, j) * n(start, k);
    }
  }
  return cov;
}

Matrix success_conditioned(const Matrix& n, const Matrix& b) {
  const std::size_t h = n.rows();
  Matrix out(h, h);
  for (std::size_t j = 0; j < h; ++j) {
    if (b(j, kSuccess) <= 0.0) continue;
    for (std::size_t k = 0; k < h; ++k) out(j, k) = n(j, k) * b(k, kSuccess) / b(j, kSuccess);
  }
  return out;
}

double catchup_prob(double mu_eff, double lambda_eff, int i) {
  if (mu_eff >= lambda_eff) return 1.0;
  return std::pow(mu_eff / lambda_eff, i + 1);
}

}  // namespace bribery
