#include "ppdcpp/mh.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ppdcpp/errors.hpp"

namespace ppdcpp {

namespace {

double poisson_loglik(const Matrix& x, const std::vector<double>& y,
                      const std::vector<double>& w, const std::vector<double>& beta) {
  // Up to the additive lgamma(y+1) constants, which cancel in MH ratios.
  double ll = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (w[i] == 0.0) continue;
    double eta = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) eta += x(i, j) * beta[j];
    if (eta > 700.0) return -std::numeric_limits<double>::infinity();
    ll += w[i] * (y[i] * eta - std::exp(eta));
  }
  return ll;
}

// Weighted Poisson MLE by Newton iterations; also returns the curvature at
// the optimum for proposal preconditioning.
std::pair<std::vector<double>, Matrix> poisson_map(const Matrix& x,
                                                   const std::vector<double>& y,
                                                   const std::vector<double>& w) {
  const std::size_t p = x.cols();
  std::vector<double> beta(p, 0.0);
  double ybar = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ybar += w[i] * y[i];
    wsum += w[i];
  }
  beta[0] = std::log(std::max(ybar / std::max(wsum, 1e-12), 1e-8));
  double ll = poisson_loglik(x, y, w, beta);
  Matrix hess(p, p);
  for (int it = 0; it < 100; ++it) {
    std::vector<double> grad(p, 0.0);
    hess = Matrix(p, p);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (w[i] == 0.0) continue;
      double eta = 0.0;
      for (std::size_t j = 0; j < p; ++j) eta += x(i, j) * beta[j];
      const double mu = std::exp(std::min(eta, 700.0));
      for (std::size_t j = 0; j < p; ++j) {
        grad[j] += w[i] * (y[i] - mu) * x(i, j);
        for (std::size_t k = j; k < p; ++k) hess(j, k) += w[i] * mu * x(i, j) * x(i, k);
      }
    }
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < j; ++k) hess(j, k) = hess(k, j);
    const Cholesky chol(hess);
    const std::vector<double> step = chol.solve(grad);
    double t = 1.0;
    std::vector<double> cand(p);
    double cand_ll = -std::numeric_limits<double>::infinity();
    for (int half = 0; half < 30; ++half) {
      for (std::size_t j = 0; j < p; ++j) cand[j] = beta[j] + t * step[j];
      cand_ll = poisson_loglik(x, y, w, cand);
      if (cand_ll >= ll) break;
      t *= 0.5;
    }
    const double gain = cand_ll - ll;
    beta = cand;
    ll = cand_ll;
    if (gain < 1e-10) break;
  }
  return {beta, hess};
}

}  // namespace

MhResult random_walk_mh(const std::function<double(const std::vector<double>&)>& log_target,
                        const std::vector<double>& init, const Cholesky& precondition,
                        const MhOptions& options, RngStream rng) {
  if (options.burn_in < 0 || options.iters <= options.burn_in) {
    throw ValidationError("random_walk_mh requires iters > burn_in >= 0");
  }
  const std::size_t p = init.size();
  if (precondition.dim() != p) throw ValidationError("preconditioner dimension mismatch");
  double log_scale = std::log(options.proposal_scale > 0.0
                                  ? options.proposal_scale
                                  : 2.38 / std::sqrt(static_cast<double>(p)));
  const int retained = options.iters - options.burn_in;
  MhResult out;
  out.draws = Matrix(static_cast<std::size_t>(retained), p);

  std::vector<double> state = init;
  double ll = log_target(state);
  std::vector<double> z(p), cand(p);
  long accepted_post = 0;
  for (int it = 0; it < options.iters; ++it) {
    for (std::size_t j = 0; j < p; ++j) z[j] = rng.next_normal();
    // Proposal covariance scale^2 * H^{-1}: solve L^T u = z.
    const std::vector<double> u = precondition.solve_upper(z);
    const double scale = std::exp(log_scale);
    for (std::size_t j = 0; j < p; ++j) cand[j] = state[j] + scale * u[j];
    const double cand_ll = log_target(cand);
    const double log_u = std::log(rng.next_double());
    const bool accept = log_u < cand_ll - ll;
    if (accept) {
      state = cand;
      ll = cand_ll;
    }
    if (it < options.burn_in) {
      // Robbins-Monro on the log scale; frozen after burn-in.
      const double gamma = 1.0 / std::pow(static_cast<double>(it + 1), 0.6);
      log_scale += gamma * ((accept ? 1.0 : 0.0) - options.target_accept);
    } else {
      accepted_post += accept ? 1 : 0;
      const std::size_t row = static_cast<std::size_t>(it - options.burn_in);
      for (std::size_t j = 0; j < p; ++j) out.draws(row, j) = state[j];
    }
  }
  out.acceptance_rate = static_cast<double>(accepted_post) / static_cast<double>(retained);
  out.final_scale = std::exp(log_scale);
  if (out.acceptance_rate <= 0.05 || out.acceptance_rate >= 0.8) {
    std::ostringstream msg;
    msg << "Metropolis sampler did not settle: post burn-in acceptance rate "
        << out.acceptance_rate << " outside (0.05, 0.8)";
    throw NumericError(msg.str());
  }
  return out;
}

MhResult poisson_glm_mh(const Matrix& x, const std::vector<double>& y,
                        const std::vector<double>& weights, const MhOptions& options,
                        RngStream rng) {
  if (x.rows() != y.size() || x.rows() != weights.size()) {
    throw ValidationError("poisson_glm_mh: dimension mismatch");
  }
  for (double v : y) {
    if (v < 0.0 || v != std::floor(v)) {
      throw ValidationError("poisson responses must be nonnegative integers");
    }
  }
  auto [beta, hess] = poisson_map(x, y, weights);
  const Cholesky chol(hess);
  const auto target = [&](const std::vector<double>& b) {
    return poisson_loglik(x, y, weights, b);
  };
  return random_walk_mh(target, beta, chol, options, rng);
}

}  // namespace ppdcpp
