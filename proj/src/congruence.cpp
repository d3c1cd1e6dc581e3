#include "ppdcpp/congruence.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "ppdcpp/bvn.hpp"
#include "ppdcpp/dists.hpp"
#include "ppdcpp/errors.hpp"
#include "ppdcpp/mh.hpp"

namespace ppdcpp {

namespace {

void require_no_covariates(const Dataset& hist, const Dataset& curr) {
  if (hist.has_covariates() || curr.has_covariates()) {
    throw ValidationError("this estimator applies to endpoints without covariates");
  }
}

struct NormalPlugins {
  double ybar_h, ybar_c;
  double var_sum, var_diff;  // Var(U) and Cov(U,V) of the sum/difference pair
};

// Plug-in mean/variance structure shared by the closed forms. Known
// variances keep the finite-sample (m+1)/m predictive inflation; unknown
// variances use the asymptotic form with unbiased sample variances.
NormalPlugins normal_plugins(const Dataset& hist, const Dataset& curr,
                             const EndpointModel& model) {
  NormalPlugins pl{};
  pl.ybar_h = sample_mean(hist.y);
  pl.ybar_c = sample_mean(curr.y);
  if (model.kind == EndpointKind::normal_known_var) {
    model.validate();
    const double m = static_cast<double>(hist.size());
    const double infl = (m + 1.0) / m;
    pl.var_sum = model.sigma2_curr + infl * model.sigma2_hist;
    pl.var_diff = model.sigma2_curr - infl * model.sigma2_hist;
  } else if (model.kind == EndpointKind::normal_unknown_var) {
    const double s2h = sample_variance(hist.y);
    const double s2c = sample_variance(curr.y);
    if (s2h == 0.0 || s2c == 0.0) {
      throw NumericError(
          "constant responses make the plug-in variance zero; use the "
          "known-variance endpoint or supply more varied data");
    }
    pl.var_sum = s2c + s2h;
    pl.var_diff = s2c - s2h;
  } else {
    throw ValidationError("normal closed forms require a normal endpoint kind");
  }
  return pl;
}

CongruenceEstimate make_scalar(double p, Statistic stat, Estimator est) {
  CongruenceEstimate e;
  e.p_cm = {p};
  e.distance_s = {std::fabs(p - 0.5)};
  e.statistic = stat;
  e.estimator = est;
  e.aggregate_p = p;
  return e;
}

}  // namespace

std::string to_string(Statistic s) { return s == Statistic::lik ? "lik" : "obs"; }
std::string to_string(Estimator e) { return e == Estimator::thm ? "thm" : "sim"; }

Statistic statistic_from_string(const std::string& s) {
  if (s == "lik") return Statistic::lik;
  if (s == "obs") return Statistic::obs;
  throw ValidationError("unknown statistic: " + s);
}

Estimator estimator_from_string(const std::string& s) {
  if (s == "thm") return Estimator::thm;
  if (s == "sim") return Estimator::sim;
  throw ValidationError("unknown estimator: " + s);
}

double CongruenceEstimate::value() const {
  if (!aggregate_p) {
    throw ValidationError("no scalar congruence value for this direction");
  }
  return *aggregate_p;
}

double CongruenceEstimate::distance() const { return std::fabs(value() - 0.5); }

CongruenceEstimate pcm_closed_normal(const Dataset& hist, const Dataset& curr,
                                     const EndpointModel& model) {
  hist.validate();
  curr.validate();
  require_no_covariates(hist, curr);
  const NormalPlugins pl = normal_plugins(hist, curr, model);
  stats::SymmetricBvnSpec spec;
  spec.mean_delta = pl.ybar_c - pl.ybar_h;
  spec.var = pl.var_sum;
  spec.cov = pl.var_diff;
  return make_scalar(stats::orthant_double(spec), Statistic::lik, Estimator::thm);
}

CongruenceEstimate pcm_closed_obs(const Dataset& hist, const Dataset& curr,
                                  const EndpointModel& model) {
  hist.validate();
  curr.validate();
  require_no_covariates(hist, curr);
  const NormalPlugins pl = normal_plugins(hist, curr, model);
  // Pr(U >= 0) with U = replicate - current observation.
  const double p = stats::norm_cdf((pl.ybar_h - pl.ybar_c) / std::sqrt(pl.var_sum));
  return make_scalar(p, Statistic::obs, Estimator::thm);
}

CongruenceEstimate pcm_closed_regression(const Dataset& hist, const Dataset& curr,
                                         RegressionTarget target, Statistic statistic) {
  hist.validate();
  curr.validate();
  if (!hist.has_covariates() || !curr.has_covariates()) {
    throw ValidationError("regression closed form requires design matrices on both arms");
  }
  if (hist.x->cols() != curr.x->cols()) {
    throw ValidationError("historical and current design matrices disagree on columns");
  }
  const bool score_current = target == RegressionTarget::score_current_given_hist;
  const Dataset& scored = score_current ? curr : hist;
  const Dataset& cond = score_current ? hist : curr;

  const OlsFit fit_scored = ols(*scored.x, scored.y);
  const OlsFit fit_cond = ols(*cond.x, cond.y);
  const Cholesky cond_chol(fit_cond.xtx);

  const std::size_t rows = scored.size();
  const std::size_t p = scored.x->cols();
  CongruenceEstimate e;
  e.statistic = statistic;
  e.estimator = Estimator::thm;
  e.pointwise = true;
  e.p_cm.resize(rows);
  e.distance_s.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::vector<double> xi = scored.x->row(i);
    const double leverage = 1.0 + cond_chol.quad_inverse(xi);
    double delta = 0.0;
    for (std::size_t j = 0; j < p; ++j) delta += xi[j] * (fit_scored.beta[j] - fit_cond.beta[j]);
    const double var = fit_scored.sigma2 + fit_cond.sigma2 * leverage;
    double pi;
    if (statistic == Statistic::lik) {
      stats::SymmetricBvnSpec spec{delta, var, fit_scored.sigma2 - fit_cond.sigma2 * leverage};
      pi = stats::orthant_double(spec);
    } else {
      // Replicate minus scored observation: mean flips sign.
      pi = stats::norm_cdf(-delta / std::sqrt(var));
    }
    e.p_cm[i] = pi;
    e.distance_s[i] = std::fabs(pi - 0.5);
  }
  if (score_current) {
    e.aggregate_p =
        std::accumulate(e.p_cm.begin(), e.p_cm.end(), 0.0) / static_cast<double>(rows);
  }
  return e;
}

namespace {

// One Monte Carlo iteration: draw parameters from the historical-only
// posterior, one replicate per current row, count indicator successes.
// All randomness comes from the iteration's own substream, so the loop over
// iterations can run in any order or in parallel.

struct NormalMcContext {
  double ybar_h = 0.0;
  double s2_h = 0.0;      // unbiased sample variance (unknown-variance kind)
  double sigma2_h = 0.0;  // known variance (known-variance kind)
  bool known = false;
  std::size_t m = 0;
};

long mc_count_normal(const NormalMcContext& ctx, const std::vector<double>& y_c,
                     Statistic stat, RngStream stream) {
  const double dm = static_cast<double>(ctx.m);
  double sigma2;
  if (ctx.known) {
    sigma2 = ctx.sigma2_h;
  } else {
    sigma2 = stream.next_inverse_gamma(0.5 * (dm - 1.0), 0.5 * (dm - 1.0) * ctx.s2_h);
  }
  const double mu = stream.next_normal(ctx.ybar_h, std::sqrt(sigma2 / dm));
  const double sd = std::sqrt(sigma2);
  long count = 0;
  for (double yc : y_c) {
    const double rep = stream.next_normal(mu, sd);
    if (stat == Statistic::lik) {
      // Density comparison under N(mu, sigma2) reduces to squared distance.
      const double dc = yc - mu, dr = rep - mu;
      count += (dr * dr <= dc * dc) ? 1 : 0;
    } else {
      count += (rep >= yc) ? 1 : 0;
    }
  }
  return count;
}

struct RegressionMcContext {
  std::vector<double> beta_hat;
  const Cholesky* chol = nullptr;  // of X_h^T X_h
  double sse = 0.0;
  std::size_t m = 0, p = 0;
  const Matrix* x_c = nullptr;
};

long mc_count_regression(const RegressionMcContext& ctx, const std::vector<double>& y_c,
                         Statistic stat, RngStream stream) {
  const double sigma2 = stream.next_inverse_gamma(0.5 * static_cast<double>(ctx.m), 0.5 * ctx.sse);
  const double sd = std::sqrt(sigma2);
  std::vector<double> z(ctx.p);
  for (std::size_t j = 0; j < ctx.p; ++j) z[j] = stream.next_normal();
  const std::vector<double> u = ctx.chol->solve_upper(z);
  std::vector<double> beta(ctx.p);
  for (std::size_t j = 0; j < ctx.p; ++j) beta[j] = ctx.beta_hat[j] + sd * u[j];
  long count = 0;
  for (std::size_t i = 0; i < y_c.size(); ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < ctx.p; ++j) mean += (*ctx.x_c)(i, j) * beta[j];
    const double rep = stream.next_normal(mean, sd);
    if (stat == Statistic::lik) {
      const double dc = y_c[i] - mean, dr = rep - mean;
      count += (dr * dr <= dc * dc) ? 1 : 0;
    } else {
      count += (rep >= y_c[i]) ? 1 : 0;
    }
  }
  return count;
}

struct PoissonMcContext {
  const Matrix* chain = nullptr;  // draws x p, historical-only posterior
  const Matrix* x_c = nullptr;
  std::size_t p = 0;
};

long mc_count_poisson(const PoissonMcContext& ctx, const std::vector<double>& y_c, int r,
                      Statistic stat, RngStream stream) {
  long count = 0;
  for (std::size_t i = 0; i < y_c.size(); ++i) {
    double eta = 0.0;
    for (std::size_t j = 0; j < ctx.p; ++j) {
      eta += (*ctx.x_c)(i, j) * (*ctx.chain)(static_cast<std::size_t>(r), j);
    }
    const double mu = std::exp(std::min(eta, 700.0));
    const long rep = stream.next_poisson(mu);
    if (stat == Statistic::lik) {
      count += (stats::poisson_logpmf(rep, mu) >=
                stats::poisson_logpmf(static_cast<long>(y_c[i]), mu))
                   ? 1
                   : 0;
    } else {
      count += (static_cast<double>(rep) >= y_c[i]) ? 1 : 0;
    }
  }
  return count;
}

CongruenceEstimate run_monte_carlo(const Dataset& hist, const Dataset& curr,
                                   const EndpointModel& model, Statistic stat, int draws,
                                   RngStream rng, bool parallel) {
  hist.validate();
  curr.validate();
  if (draws < 1) throw ValidationError("monte carlo estimator requires draws >= 1");

  NormalMcContext nctx;
  RegressionMcContext rctx;
  PoissonMcContext pctx;
  std::optional<Cholesky> chol_storage;
  std::optional<MhResult> chain_storage;
  OlsFit hist_fit;

  switch (model.kind) {
    case EndpointKind::normal_known_var:
    case EndpointKind::normal_unknown_var: {
      require_no_covariates(hist, curr);
      nctx.m = hist.size();
      nctx.ybar_h = sample_mean(hist.y);
      nctx.known = model.kind == EndpointKind::normal_known_var;
      if (nctx.known) {
        model.validate();
        nctx.sigma2_h = model.sigma2_hist;
      } else {
        nctx.s2_h = sample_variance(hist.y);
        if (nctx.s2_h == 0.0) {
          throw NumericError("constant historical responses: posterior for the variance is degenerate");
        }
      }
      break;
    }
    case EndpointKind::linear_regression: {
      if (!hist.has_covariates() || !curr.has_covariates()) {
        throw ValidationError("linear_regression endpoint requires design matrices");
      }
      if (hist.x->cols() != curr.x->cols()) {
        throw ValidationError("historical and current design matrices disagree on columns");
      }
      hist_fit = ols(*hist.x, hist.y);
      chol_storage.emplace(hist_fit.xtx);
      rctx.beta_hat = hist_fit.beta;
      rctx.chol = &*chol_storage;
      rctx.sse = hist_fit.sse;
      rctx.m = hist.size();
      rctx.p = hist.x->cols();
      rctx.x_c = &*curr.x;
      if (rctx.sse == 0.0) throw NumericError("historical regression fits exactly; variance posterior is degenerate");
      break;
    }
    case EndpointKind::poisson_regression: {
      if (!hist.has_covariates() || !curr.has_covariates()) {
        throw ValidationError("poisson_regression endpoint requires design matrices");
      }
      for (double v : curr.y) {
        if (v < 0.0 || v != std::floor(v)) {
          throw ValidationError("poisson responses must be nonnegative integers");
        }
      }
      MhOptions opt;
      opt.burn_in = 1500;
      opt.iters = opt.burn_in + draws;  // one retained draw per iteration
      std::vector<double> w(hist.size(), 1.0);
      chain_storage = poisson_glm_mh(*hist.x, hist.y, w, opt, rng.substream(0x706f6973));
      pctx.chain = &chain_storage->draws;
      pctx.x_c = &*curr.x;
      pctx.p = hist.x->cols();
      break;
    }
  }

  const long n = static_cast<long>(curr.size());
  std::vector<long> counts(static_cast<std::size_t>(draws), 0);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < draws; ++r) {
      RngStream stream = rng.substream(static_cast<std::uint64_t>(r));
      switch (model.kind) {
        case EndpointKind::normal_known_var:
        case EndpointKind::normal_unknown_var:
          counts[static_cast<std::size_t>(r)] = mc_count_normal(nctx, curr.y, stat, stream);
          break;
        case EndpointKind::linear_regression:
          counts[static_cast<std::size_t>(r)] = mc_count_regression(rctx, curr.y, stat, stream);
          break;
        case EndpointKind::poisson_regression:
          counts[static_cast<std::size_t>(r)] = mc_count_poisson(pctx, curr.y, r, stat, stream);
          break;
      }
    }
  } else {
    for (int r = 0; r < draws; ++r) {
      RngStream stream = rng.substream(static_cast<std::uint64_t>(r));
      switch (model.kind) {
        case EndpointKind::normal_known_var:
        case EndpointKind::normal_unknown_var:
          counts[static_cast<std::size_t>(r)] = mc_count_normal(nctx, curr.y, stat, stream);
          break;
        case EndpointKind::linear_regression:
          counts[static_cast<std::size_t>(r)] = mc_count_regression(rctx, curr.y, stat, stream);
          break;
        case EndpointKind::poisson_regression:
          counts[static_cast<std::size_t>(r)] = mc_count_poisson(pctx, curr.y, r, stat, stream);
          break;
      }
    }
  }
  long total = 0;
  for (long c : counts) total += c;
  const double p = static_cast<double>(total) / (static_cast<double>(n) * static_cast<double>(draws));

  CongruenceEstimate e = make_scalar(p, stat, Estimator::sim);
  e.mc_draws = draws;
  if (draws < 100) {
    e.notes.push_back("fewer than 100 monte carlo draws: estimate is noisy");
  }
  if (chain_storage) {
    e.notes.push_back("historical posterior sampled by metropolis, acceptance rate " +
                      std::to_string(chain_storage->acceptance_rate));
  }
  return e;
}

}  // namespace

CongruenceEstimate pcm_monte_carlo(const Dataset& hist, const Dataset& curr,
                                   const EndpointModel& model, Statistic statistic, int draws,
                                   RngStream rng) {
  return run_monte_carlo(hist, curr, model, statistic, draws, rng, true);
}

CongruenceEstimate pcm_monte_carlo_serial(const Dataset& hist, const Dataset& curr,
                                          const EndpointModel& model, Statistic statistic,
                                          int draws, RngStream rng) {
  return run_monte_carlo(hist, curr, model, statistic, draws, rng, false);
}

double pcm_naive_vector(const Dataset& hist, const Dataset& curr, const EndpointModel& model,
                        VectorStatistic stat, double quantile_q, int draws, RngStream rng) {
  hist.validate();
  curr.validate();
  require_no_covariates(hist, curr);
  if (draws < 1) throw ValidationError("naive estimator requires draws >= 1");
  if (stat == VectorStatistic::quantile && !(quantile_q >= 0.0 && quantile_q <= 1.0)) {
    throw ValidationError("quantile statistic requires q in [0,1]");
  }
  const auto apply = [&](std::vector<double>& v) {
    switch (stat) {
      case VectorStatistic::max: {
        double mx = v[0];
        for (double x : v) mx = std::max(mx, x);
        return mx;
      }
      case VectorStatistic::mean:
        return sample_mean(v);
      case VectorStatistic::quantile:
        return stats::quantile_type7(v, quantile_q);
    }
    return 0.0;
  };

  NormalMcContext ctx;
  ctx.m = hist.size();
  ctx.ybar_h = sample_mean(hist.y);
  ctx.known = model.kind == EndpointKind::normal_known_var;
  if (ctx.known) {
    model.validate();
    ctx.sigma2_h = model.sigma2_hist;
  } else if (model.kind == EndpointKind::normal_unknown_var) {
    ctx.s2_h = sample_variance(hist.y);
    if (ctx.s2_h == 0.0) throw NumericError("constant historical responses");
  } else {
    throw ValidationError("naive whole-vector estimator supports normal endpoints only");
  }

  std::vector<double> cur = curr.y;
  const double t_cur = apply(cur);
  const std::size_t n = curr.size();
  const double dm = static_cast<double>(ctx.m);
  long count = 0;
  std::vector<double> rep(n);
  for (int r = 0; r < draws; ++r) {
    RngStream stream = rng.substream(static_cast<std::uint64_t>(r));
    double sigma2 = ctx.known
                        ? ctx.sigma2_h
                        : stream.next_inverse_gamma(0.5 * (dm - 1.0), 0.5 * (dm - 1.0) * ctx.s2_h);
    const double mu = stream.next_normal(ctx.ybar_h, std::sqrt(sigma2 / dm));
    const double sd = std::sqrt(sigma2);
    for (std::size_t i = 0; i < n; ++i) rep[i] = stream.next_normal(mu, sd);
    count += (apply(rep) >= t_cur) ? 1 : 0;
  }
  return static_cast<double>(count) / static_cast<double>(draws);
}

}  // namespace ppdcpp
