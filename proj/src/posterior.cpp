#include "ppdcpp/posterior.hpp"

#include <cmath>

#include "ppdcpp/dists.hpp"
#include "ppdcpp/errors.hpp"
#include "ppdcpp/mh.hpp"

namespace ppdcpp {

PowerAssignment PowerAssignment::global(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("global power must lie in [0,1]");
  }
  PowerAssignment p;
  p.global_ = alpha;
  return p;
}

PowerAssignment PowerAssignment::pointwise(std::vector<double> alphas) {
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw ValidationError("pointwise powers must lie in [0,1]");
    }
  }
  PowerAssignment p;
  p.alphas_ = std::move(alphas);
  return p;
}

double PowerAssignment::global_value() const {
  if (!global_) throw ValidationError("power assignment is pointwise, not global");
  return *global_;
}

double PowerAssignment::total(std::size_t m) const {
  if (global_) return *global_ * static_cast<double>(m);
  double s = 0.0;
  for (double a : alphas_) s += a;
  return s;
}

void PowerAssignment::validate(std::size_t m) const {
  if (!global_ && alphas_.size() != m) {
    throw ValidationError("pointwise power vector length must equal the historical sample size");
  }
}

std::vector<double> PosteriorDraws::column(std::size_t param) const {
  std::vector<double> col(n_draws());
  for (std::size_t i = 0; i < col.size(); ++i) col[i] = at(i, param);
  return col;
}

const ParameterSummary& PosteriorSummary::by_name(const std::string& name) const {
  for (const auto& p : params) {
    if (p.name == name) return p;
  }
  throw ValidationError("no parameter named " + name);
}

namespace {

constexpr double kZ975 = 1.9599639845400545;  // norm_quantile(0.975)

ParameterSummary summarize_column(const std::string& name, const std::vector<double>& col) {
  ParameterSummary s;
  s.name = name;
  s.mean = sample_mean(col);
  s.sd = col.size() > 1 ? std::sqrt(sample_variance(col)) : 0.0;
  s.ci_lower = stats::quantile_type7(col, 0.025);
  s.ci_upper = stats::quantile_type7(col, 0.975);
  s.interval_length = s.ci_upper - s.ci_lower;
  return s;
}

void check_iters(int iters, int burn_in) {
  if (burn_in < 0 || iters <= burn_in) {
    throw ValidationError("fit requires iters > burn_in >= 0");
  }
}

}  // namespace

PosteriorSummary summarize(const PosteriorDraws& draws) {
  if (draws.n_draws() == 0) throw ValidationError("cannot summarize an empty draw set");
  if (draws.n_draws() < 100) {
    throw ValidationError("summaries need at least 100 retained draws");
  }
  PosteriorSummary out;
  for (std::size_t j = 0; j < draws.n_params(); ++j) {
    out.params.push_back(summarize_column(draws.names[j], draws.column(j)));
  }
  return out;
}

PosteriorSummary fit_normal_known_var(const Dataset& hist, const Dataset& curr,
                                      double sigma2_hist, double sigma2_curr,
                                      const PowerAssignment& power) {
  hist.validate();
  curr.validate();
  power.validate(hist.size());
  if (hist.has_covariates() || curr.has_covariates()) {
    throw ValidationError("known-variance fit applies to endpoints without covariates");
  }
  if (!(sigma2_hist > 0.0) || !(sigma2_curr > 0.0)) {
    throw ValidationError("known variances must be strictly positive");
  }
  const double n = static_cast<double>(curr.size());
  double wsum = 0.0, wy = 0.0;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    const double w = power.weight(i);
    wsum += w;
    wy += w * hist.y[i];
  }
  const double precision = n / sigma2_curr + wsum / sigma2_hist;
  const double mean = (n * sample_mean(curr.y) / sigma2_curr + wy / sigma2_hist) / precision;
  const double sd = std::sqrt(1.0 / precision);
  ParameterSummary mu;
  mu.name = "mu";
  mu.mean = mean;
  mu.sd = sd;
  mu.ci_lower = mean - kZ975 * sd;
  mu.ci_upper = mean + kZ975 * sd;
  mu.interval_length = mu.ci_upper - mu.ci_lower;
  PosteriorSummary out;
  out.params.push_back(mu);
  return out;
}

std::pair<PosteriorDraws, PosteriorSummary> fit_normal_unknown_var(
    const Dataset& hist, const Dataset& curr, const PowerAssignment& power, int iters,
    int burn_in, RngStream rng) {
  hist.validate();
  curr.validate();
  power.validate(hist.size());
  check_iters(iters, burn_in);
  if (hist.has_covariates() || curr.has_covariates()) {
    throw ValidationError("unknown-variance fit applies to endpoints without covariates");
  }
  const double n = static_cast<double>(curr.size());
  double wsum = 0.0, t1 = 0.0;
  for (double y : curr.y) t1 += y;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    wsum += power.weight(i);
    t1 += power.weight(i) * hist.y[i];
  }
  const double n_eff = n + wsum;
  if (!(n_eff > 1.0)) {
    throw ValidationError("improper posterior: effective sample size n + sum(alpha) must exceed 1");
  }
  const double center = t1 / n_eff;
  double q = 0.0;
  for (double y : curr.y) q += (y - center) * (y - center);
  for (std::size_t i = 0; i < hist.size(); ++i) {
    q += power.weight(i) * (hist.y[i] - center) * (hist.y[i] - center);
  }
  if (!(q > 0.0)) throw NumericError("degenerate posterior: weighted sum of squares is zero");

  const int retained = iters - burn_in;
  PosteriorDraws draws;
  draws.names = {"mu", "sigma2"};
  draws.values.resize(static_cast<std::size_t>(retained) * 2);
  draws.burn_in = burn_in;
  draws.seed = rng.seed();
  draws.stream_id = rng.stream_id();
  for (int r = 0; r < retained; ++r) {
    const double sigma2 = rng.next_inverse_gamma(0.5 * (n_eff - 1.0), 0.5 * q);
    const double mu = rng.next_normal(center, std::sqrt(sigma2 / n_eff));
    draws.values[static_cast<std::size_t>(r) * 2] = mu;
    draws.values[static_cast<std::size_t>(r) * 2 + 1] = sigma2;
  }
  PosteriorSummary summary = summarize(draws);
  return {std::move(draws), std::move(summary)};
}

std::pair<PosteriorDraws, PosteriorSummary> fit_linear_regression(
    const Dataset& hist, const Dataset& curr, const PowerAssignment& power, int iters,
    int burn_in, RngStream rng) {
  hist.validate();
  curr.validate();
  power.validate(hist.size());
  check_iters(iters, burn_in);
  if (!hist.has_covariates() || !curr.has_covariates()) {
    throw ValidationError("regression fit requires design matrices on both arms");
  }
  if (hist.x->cols() != curr.x->cols()) {
    throw ValidationError("historical and current design matrices disagree on columns");
  }
  const std::size_t p = curr.x->cols();

  // Weighted cross-products: current rows at weight 1, historical rows at
  // their assigned powers.
  Matrix a(p, p);
  std::vector<double> b(p, 0.0);
  double n_w = 0.0;
  auto accumulate = [&](const Matrix& x, const std::vector<double>& y, auto weight_of) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double w = weight_of(i);
      if (w == 0.0) continue;
      for (std::size_t j = 0; j < p; ++j) {
        const double wx = w * x(i, j);
        b[j] += wx * y[i];
        for (std::size_t k = j; k < p; ++k) a(j, k) += wx * x(i, k);
      }
      n_w += w;
    }
  };
  accumulate(*curr.x, curr.y, [](std::size_t) { return 1.0; });
  accumulate(*hist.x, hist.y, [&](std::size_t i) { return power.weight(i); });
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < j; ++k) a(j, k) = a(k, j);

  Cholesky chol(a);  // throws NumericError when the weighted design is singular
  const std::vector<double> beta_hat = chol.solve(b);

  double sse_w = 0.0;
  auto add_sse = [&](const Matrix& x, const std::vector<double>& y, auto weight_of) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double w = weight_of(i);
      if (w == 0.0) continue;
      double pred = 0.0;
      for (std::size_t j = 0; j < p; ++j) pred += x(i, j) * beta_hat[j];
      sse_w += w * (y[i] - pred) * (y[i] - pred);
    }
  };
  add_sse(*curr.x, curr.y, [](std::size_t) { return 1.0; });
  add_sse(*hist.x, hist.y, [&](std::size_t i) { return power.weight(i); });
  if (!(sse_w > 0.0)) throw NumericError("degenerate posterior: weighted residual sum of squares is zero");
  if (!(n_w > 0.0)) throw ValidationError("improper posterior: total weight is zero");

  const int retained = iters - burn_in;
  PosteriorDraws draws;
  for (std::size_t j = 0; j < p; ++j) draws.names.push_back("beta" + std::to_string(j));
  draws.names.push_back("sigma2");
  draws.values.resize(static_cast<std::size_t>(retained) * (p + 1));
  draws.burn_in = burn_in;
  draws.seed = rng.seed();
  draws.stream_id = rng.stream_id();
  std::vector<double> z(p);
  for (int r = 0; r < retained; ++r) {
    const double sigma2 = rng.next_inverse_gamma(0.5 * n_w, 0.5 * sse_w);
    const double sd = std::sqrt(sigma2);
    for (std::size_t j = 0; j < p; ++j) z[j] = rng.next_normal();
    const std::vector<double> u = chol.solve_upper(z);
    const std::size_t base = static_cast<std::size_t>(r) * (p + 1);
    for (std::size_t j = 0; j < p; ++j) draws.values[base + j] = beta_hat[j] + sd * u[j];
    draws.values[base + p] = sigma2;
  }
  PosteriorSummary summary = summarize(draws);
  return {std::move(draws), std::move(summary)};
}

std::pair<PosteriorDraws, PosteriorSummary> fit_poisson_regression_mh(
    const Dataset& hist, const Dataset& curr, const PowerAssignment& power, int iters,
    int burn_in, double proposal_scale, RngStream rng) {
  hist.validate();
  curr.validate();
  power.validate(hist.size());
  check_iters(iters, burn_in);
  if (!power.is_global()) {
    throw ValidationError("the Metropolis fit supports a global power only");
  }
  if (!hist.has_covariates() || !curr.has_covariates()) {
    throw ValidationError("poisson fit requires design matrices on both arms");
  }
  if (hist.x->cols() != curr.x->cols()) {
    throw ValidationError("historical and current design matrices disagree on columns");
  }
  const std::size_t p = curr.x->cols();
  const std::size_t n = curr.size();
  const std::size_t m = hist.size();
  // Stack current rows (weight 1) over historical rows (weight alpha).
  Matrix x(n + m, p);
  std::vector<double> y(n + m), w(n + m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) x(i, j) = (*curr.x)(i, j);
    y[i] = curr.y[i];
    w[i] = 1.0;
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j) x(n + i, j) = (*hist.x)(i, j);
    y[n + i] = hist.y[i];
    w[n + i] = power.global_value();
  }
  MhOptions opt;
  opt.iters = iters;
  opt.burn_in = burn_in;
  opt.proposal_scale = proposal_scale;
  const MhResult res = poisson_glm_mh(x, y, w, opt, rng);

  PosteriorDraws draws;
  for (std::size_t j = 0; j < p; ++j) draws.names.push_back("beta" + std::to_string(j));
  draws.burn_in = burn_in;
  draws.acceptance_rate = res.acceptance_rate;
  draws.seed = rng.seed();
  draws.stream_id = rng.stream_id();
  draws.values = res.draws.data();
  PosteriorSummary summary = summarize(draws);
  return {std::move(draws), std::move(summary)};
}

PowerAssignment assign_pointwise_powers(const Dataset& hist, const Dataset& curr,
                                        const CalibrationCurve& curve, Statistic statistic,
                                        std::optional<double> cap) {
  const CongruenceEstimate est = pcm_closed_regression(
      hist, curr, RegressionTarget::score_hist_given_current, statistic);
  std::vector<double> alphas(est.distance_s.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    alphas[i] = power_from_s(curve, est.distance_s[i], cap);
  }
  return PowerAssignment::pointwise(std::move(alphas));
}

}  // namespace ppdcpp
