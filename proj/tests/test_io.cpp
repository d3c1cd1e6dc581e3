#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "ppdcpp/commands.hpp"
#include "ppdcpp/csv.hpp"
#include "ppdcpp/errors.hpp"
#include "ppdcpp/rng.hpp"
#include "ppdcpp/scenario_io.hpp"

using namespace ppdcpp;
using namespace ppdcpp::io;

namespace {

std::string tmp_path(const std::string& name) {
  return std::string("/tmp/ppdcpp_test_") + name;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("csv ingestion") {
  SUBCASE("response only") {
    const std::string p = tmp_path("y_only.csv");
    write_file(p, "y\n1.5\n2.5\n3.25\n");
    const Dataset d = ingest_csv(p, CsvSchema{}, DataRole::current);
    REQUIRE(d.size() == 3);
    CHECK_FALSE(d.has_covariates());
    CHECK(d.y[2] == 3.25);
  }
  SUBCASE("covariates get an intercept column") {
    const std::string p = tmp_path("xy.csv");
    write_file(p, "y,x1,x2\n1,0,40\n2,1,50\n3,0,60\n4,1,44\n");
    const Dataset d = ingest_csv(p, CsvSchema{"y", {"x1", "x2"}}, DataRole::historical);
    REQUIRE(d.has_covariates());
    CHECK(d.x->cols() == 3);
    CHECK((*d.x)(1, 0) == 1.0);
    CHECK((*d.x)(1, 1) == 1.0);
    CHECK((*d.x)(1, 2) == 50.0);
    CHECK(d.role == DataRole::historical);
  }
  SUBCASE("blank cell errors name the row and column") {
    const std::string p = tmp_path("blank.csv");
    write_file(p, "y,x1\n1,0\n2,1\n3,0\n4,1\n5,0\n6,1\n7,\n8,0\n");
    try {
      ingest_csv(p, CsvSchema{"y", {"x1"}}, DataRole::current);
      FAIL("expected IoError");
    } catch (const IoError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("row 7") != std::string::npos);
      CHECK(msg.find("x1") != std::string::npos);
    }
  }
  SUBCASE("missing column, empty file, non-numeric cell") {
    const std::string p = tmp_path("bad.csv");
    write_file(p, "a,b\n1,2\n");
    CHECK_THROWS_AS(ingest_csv(p, CsvSchema{}, DataRole::current), IoError);
    write_file(p, "");
    CHECK_THROWS_AS(ingest_csv(p, CsvSchema{}, DataRole::current), IoError);
    write_file(p, "y\nabc\n2\n");
    CHECK_THROWS_AS(ingest_csv(p, CsvSchema{}, DataRole::current), IoError);
    CHECK_THROWS_AS(ingest_csv("/nonexistent/file.csv", CsvSchema{}, DataRole::current), IoError);
  }
}

TEST_CASE("dataset round trip is exact") {
  RngStream r(2026, 1);
  Dataset d;
  d.role = DataRole::current;
  const std::size_t n = 40;
  d.y.resize(n);
  Matrix x(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    d.y[i] = (r.next_double() - 0.5) * std::pow(10.0, 20.0 * (r.next_double() - 0.5));
    x(i, 0) = 1.0;
    x(i, 1) = r.next_double() < 0.5 ? 0.0 : 1.0;
    x(i, 2) = r.next_normal(50.0, 9.0);
  }
  d.y[0] = 1.0 / 3.0;
  d.y[1] = 1e-300;
  d.y[2] = -0.1;
  d.x = x;
  const CsvSchema schema{"y", {"x1", "x2"}};
  const std::string p = tmp_path("roundtrip.csv");
  write_dataset_csv(p, d, schema);
  const Dataset back = ingest_csv(p, schema, DataRole::current);
  REQUIRE(back.size() == d.size());
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(back.y[i] == d.y[i]);
    for (std::size_t j = 0; j < 3; ++j) REQUIRE((*back.x)(i, j) == (*d.x)(i, j));
  }
}

TEST_CASE("shortest round-trip formatting") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("scenario json round trip and errors") {
  sim::ScenarioSpec s;
  s.name = "roundtrip";
  s.endpoint = EndpointKind::linear_regression;
  s.beta_h = {50.0, 8.0, 0.5};
  s.beta_c = {50.0, 8.0, 0.5};
  s.method = sim::MethodVariant::pw_lik;
  s.sweep_axis = sim::SweepAxis::bernoulli_p;
  s.sweep_grid = {0.3, 0.5, 0.7};
  s.seed = 99;
  const ordered_json j = scenario_to_json(s);
  const sim::ScenarioSpec back = scenario_from_json(j, "$");
  CHECK(back.name == s.name);
  CHECK(back.endpoint == s.endpoint);
  CHECK(back.method == s.method);
  CHECK(back.sweep_axis == s.sweep_axis);
  CHECK(back.sweep_grid == s.sweep_grid);
  CHECK(back.seed == 99);

  nlohmann::json bad = j;
  bad["calibration"]["tau"] = "two";
  try {
    scenario_from_json(bad, "$");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("$.calibration.tau") != std::string::npos);
  }
}

TEST_CASE("scenario files support batches and method fan-out") {
  const std::string p = tmp_path("batch.json");
  write_file(p, R"({
    "scenarios": [
      {"name": "a", "endpoint": "normal_known_var", "replicates": 5, "seed": 1,
       "methods": ["thm_lik", "no_borrow"]},
      {"name": "b", "endpoint": "normal_known_var", "replicates": 5, "seed": 2}
    ]})");
  const auto specs = scenarios_from_file(p);
  REQUIRE(specs.size() == 3);
  CHECK(specs[0].name == "a-thm_lik");
  CHECK(specs[1].name == "a-no_borrow");
  CHECK(specs[1].method == sim::MethodVariant::no_borrow);
  CHECK(specs[2].name == "b");

  write_file(p, "{ not json");
  CHECK_THROWS_AS(scenarios_from_file(p), IoError);
}

TEST_CASE("pcm command end to end") {
  const std::string hist = tmp_path("cmd_hist.csv");
  const std::string curr = tmp_path("cmd_curr.csv");
  RngStream r(6, 6);
  std::ostringstream h, c;
  h << "y\n";
  c << "y\n";
  for (int i = 0; i < 50; ++i) h << format_double(r.next_normal(20.0, 0.5)) << "\n";
  for (int i = 0; i < 50; ++i) c << format_double(r.next_normal(20.0, 0.5)) << "\n";
  write_file(hist, h.str());
  write_file(curr, c.str());

  AnalysisConfig cfg;
  cfg.endpoint = EndpointKind::normal_unknown_var;
  cfg.hist_path = hist;
  cfg.curr_path = curr;
  cfg.seed = 7;
  const ordered_json out = cmd_pcm(cfg);
  CHECK(out.contains("p_cm"));
  CHECK(out.contains("provenance"));
  CHECK(out["provenance"]["version"] == "0.1.0");
  CHECK(out["provenance"]["seed"] == 7);
  const double p = out["p_cm"].get<double>();
  CHECK(p > 0.2);
  CHECK(p < 0.8);

  SUBCASE("identical seeds give byte-identical output") {
    CHECK(cmd_pcm(cfg).dump() == out.dump());
  }
  SUBCASE("two copies of one file sit at exactly one half") {
    AnalysisConfig same = cfg;
    same.curr_path = hist;
    CHECK(std::fabs(cmd_pcm(same)["p_cm"].get<double>() - 0.5) < 1e-12);
  }
  SUBCASE("unsupported combination is rejected") {
    AnalysisConfig bad = cfg;
    bad.endpoint = EndpointKind::poisson_regression;
    bad.estimator = Estimator::thm;
    CHECK_THROWS_AS(cmd_pcm(bad), ValidationError);
  }
}

TEST_CASE("analyze command produces the full pipeline record") {
  const std::string hist = tmp_path("an_hist.csv");
  const std::string curr = tmp_path("an_curr.csv");
  RngStream r(8, 8);
  std::ostringstream h, c;
  h << "y,x1,x2\n";
  c << "y,x1,x2\n";
  for (int i = 0; i < 50; ++i) {
    const double x1 = r.next_double() < 0.5 ? 1.0 : 0.0;
    const double x2 = 40.0 + std::floor(r.next_double() * 31.0);
    h << format_double(50.0 + 8.0 * x1 + 0.5 * x2 + r.next_normal(0.0, 0.5)) << ","
      << format_double(x1) << "," << format_double(x2) << "\n";
  }
  for (int i = 0; i < 50; ++i) {
    const double x1 = r.next_double() < 0.5 ? 1.0 : 0.0;
    const double x2 = 40.0 + std::floor(r.next_double() * 31.0);
    c << format_double(50.0 + 8.0 * x1 + 0.5 * x2 + r.next_normal(0.0, 0.5)) << ","
      << format_double(x1) << "," << format_double(x2) << "\n";
  }
  write_file(hist, h.str());
  write_file(curr, c.str());

  AnalysisConfig cfg;
  cfg.endpoint = EndpointKind::linear_regression;
  cfg.hist_path = hist;
  cfg.curr_path = curr;
  cfg.schema.covariates = {"x1", "x2"};
  cfg.seed = 11;
  cfg.iters = 2500;
  cfg.burn_in = 500;

  const ordered_json out = cmd_analyze(cfg);
  CHECK(out.contains("p_cm"));
  CHECK(out.contains("curve"));
  CHECK(out.contains("power"));
  CHECK(out.contains("posterior"));
  CHECK(out["power"]["alpha"].get<double>() > 0.5);  // congruent arms
  CHECK(out["posterior"].size() == 4);               // three betas + sigma2

  SUBCASE("power override bypasses calibration") {
    AnalysisConfig ovr = cfg;
    ovr.power_override = 0.0;
    const ordered_json o = cmd_analyze(ovr);
    CHECK(o["power"]["source"] == "override");
    // Equal to the no-borrow fit driven by the same stream.
    AnalysisConfig ovr2 = cfg;
    ovr2.power_override = 0.0;
    CHECK(cmd_analyze(ovr2)["posterior"].dump() == o["posterior"].dump());
  }
  SUBCASE("pointwise mode emits the alpha vector") {
    AnalysisConfig pw = cfg;
    pw.mode = PowerMode::pointwise;
    const ordered_json o = cmd_analyze(pw);
    CHECK(o["power"]["kind"] == "pointwise");
    CHECK(o["power"]["alphas"].size() == 50);
  }
  SUBCASE("written file matches the returned json") {
    AnalysisConfig w = cfg;
    w.out_path = tmp_path("an_out.json");
    const ordered_json o = cmd_analyze(w);
    CHECK(read_file(w.out_path) == o.dump(2) + "\n");
  }
}

TEST_CASE("curve command writes both calibration modes") {
  CalibrationConfig cal;
  cal.n_current = 50;
  const std::string csv = tmp_path("curve.csv");
  const ordered_json out = cmd_curve(cal, 25, csv);
  CHECK(out["k_adjusted"]["b"].get<double>() > 0.0);
  CHECK(out["unadjusted"]["b"].get<double>() > 0.0);
  const std::string body = read_file(csv);
  CHECK(body.rfind("s,alpha_k_adjusted,alpha_unadjusted", 0) == 0);
  // 25 data rows + header.
  CHECK(std::count(body.begin(), body.end(), '\n') == 26);
}

TEST_CASE("uniformity command reports the ks summary") {
  const ordered_json out = cmd_uniformity(30, 30, 60, 200, 5, tmp_path("unif.csv"));
  CHECK(out["pairs"] == 60);
  CHECK(out["ks_naive"].get<double>() < 0.4);
  CHECK(out["marginal_sd"].get<double>() < 0.14);
  const std::string body = read_file(tmp_path("unif.csv"));
  CHECK(body.rfind("pair,naive_p,marginal_p", 0) == 0);
}

TEST_CASE("cli binary: exit codes and reproducible files") {
  const std::string hist = tmp_path("cli_hist.csv");
  const std::string curr = tmp_path("cli_curr.csv");
  RngStream r(10, 10);
  std::ostringstream h, c;
  h << "y\n";
  c << "y\n";
  for (int i = 0; i < 30; ++i) h << format_double(r.next_normal(20.0, 0.5)) << "\n";
  for (int i = 0; i < 30; ++i) c << format_double(r.next_normal(20.0, 0.5)) << "\n";
  write_file(hist, h.str());
  write_file(curr, c.str());

  const std::string cli = PPDCPP_CLI_PATH;
  const std::string out1 = tmp_path("cli_out1.json");
  const std::string out2 = tmp_path("cli_out2.json");
  const std::string cmd_base = cli + " pcm --hist " + hist + " --curr " + curr +
                               " --endpoint normal_unknown_var --seed 42 --out ";
  REQUIRE(std::system((cmd_base + out1 + " > /dev/null").c_str()) == 0);
  REQUIRE(std::system((cmd_base + out2 + " > /dev/null").c_str()) == 0);
  CHECK(read_file(out1) == read_file(out2));

  // Validation failure -> exit 2; missing file -> exit 4.
  const int bad = std::system((cli + " pcm --hist " + hist + " --curr " + curr +
                               " --endpoint poisson_regression --estimator thm --covariates y"
                               " > /dev/null")
                                  .c_str());
  CHECK(WEXITSTATUS(bad) == 2);
  const int missing = std::system((cli + " pcm --hist /nope.csv --curr " + curr +
                                   " --endpoint normal_unknown_var > /dev/null")
                                      .c_str());
  CHECK(WEXITSTATUS(missing) == 4);
}
