// Compares the OpenMP kernels against the serial reference implementations
// and verifies that both produce identical results.

#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ppdcpp/congruence.hpp"
#include "ppdcpp/rng.hpp"
#include "ppdcpp/simharness.hpp"

using namespace ppdcpp;

namespace {

double seconds(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Dataset normal_sample(std::size_t n, double mu, double sigma, RngStream s) {
  Dataset d;
  d.y.resize(n);
  for (auto& v : d.y) v = s.next_normal(mu, sigma);
  return d;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("openmp not enabled; both paths run serially\n");
#endif

  RngStream gen(5150, 0);
  const Dataset hist = normal_sample(200, 20.0, 0.5, gen.substream(0));
  const Dataset curr = normal_sample(200, 20.0, 0.5, gen.substream(1));
  const EndpointModel model = EndpointModel::normal_known(0.25, 0.25);

  double p_par = 0.0, p_ser = 0.0;
  const int draws = 200000;
  const double t_par = seconds([&] {
    p_par = pcm_monte_carlo(hist, curr, model, Statistic::lik, draws, RngStream(1, 1)).value();
  });
  const double t_ser = seconds([&] {
    p_ser = pcm_monte_carlo_serial(hist, curr, model, Statistic::lik, draws, RngStream(1, 1))
                .value();
  });
  std::printf("monte carlo congruence, %d draws x 200 rows\n", draws);
  std::printf("  parallel %.3fs   serial %.3fs   speedup %.2fx   identical %s\n", t_par, t_ser,
              t_ser / t_par, p_par == p_ser ? "yes" : "NO");

  sim::ScenarioSpec spec;
  spec.endpoint = EndpointKind::normal_unknown_var;
  spec.mu_h = 20.0;
  spec.mu_c = 20.0;
  spec.sigma_h = 0.5;
  spec.sigma_c = 0.5;
  spec.m = 50;
  spec.n = 50;
  spec.method = sim::MethodVariant::thm_lik;
  spec.replicates = 300;
  spec.seed = 2;
  spec.name = "bench";

  sim::MetricsReport rep_par, rep_ser;
  const double s_par = seconds([&] { rep_par = sim::run_scenario(spec); });
  const double s_ser = seconds([&] { rep_ser = sim::run_scenario_serial(spec); });
  const bool same = rep_par.points[0].avg_power == rep_ser.points[0].avg_power &&
                    rep_par.points[0].params[0].avg_bias == rep_ser.points[0].params[0].avg_bias;
  std::printf("scenario runner, %d replicates (unknown variance, sampled posterior)\n",
              spec.replicates);
  std::printf("  parallel %.3fs   serial %.3fs   speedup %.2fx   identical %s\n", s_par, s_ser,
              s_ser / s_par, same ? "yes" : "NO");
  return same && p_par == p_ser ? 0 : 1;
}
