#include "doctest.h"

#include "support/temp_dir.hpp"

#include "swefinn/errors.hpp"
#include "swefinn/evaluation.hpp"
#include "swefinn/io.hpp"

#include <cmath>
#include <cstring>

using namespace swefinn;
using testing_support::TempDir;

namespace {

ExperimentConfig tiny_experiment() {
  ExperimentConfig cfg;
  cfg.sim.grid.nx = 8;
  cfg.sim.grid.ny = 8;
  cfg.sim.grid.side_length_m = 2.5e5;
  cfg.sim.steps = 4;
  cfg.train_count = 3;
  cfg.infer_count = 3;
  cfg.test_count = 2;
  cfg.train.epochs = 2;
  cfg.train.batch_size = 2;
  cfg.infer.iterations = 4;
  cfg.infer.batch_size = 2;
  cfg.eval_batch_size = 2;
  return cfg;
}

SeedResult fake_run(std::uint64_t seed, double base) {
  SeedResult r;
  r.seed = seed;
  r.params = 212;
  r.train_error = base;
  r.infer_error = base / 3.0;
  r.test_error = base * 1.7;
  r.full_rec_error = 0.1 * base;
  r.inner_rec_error = std::sqrt(base);
  return r;
}

double metric_of(const SeedResult &r, std::size_t m) {
  const double v[] = {r.params, r.train_error, r.infer_error, r.test_error, r.full_rec_error, r.inner_rec_error};
  return v[m];
}

} // namespace

TEST_SUITE("evaluation") {

TEST_CASE("metric rows follow the table order") {
  const std::vector<std::string> expected{"params",     "train_error",    "infer_error",
                                          "test_error", "full_rec_error", "inner_rec_error"};
  CHECK(metric_names() == expected);
}

TEST_CASE("population mean and std match a two-pass computation") {
  RunReport rep;
  const double bases[] = {1.3e-5, 0.7e-5, 2.9e-5, 1.1e-5};
  for (std::uint64_t s = 0; s < 4; ++s) rep.runs.push_back(fake_run(s, bases[s]));
  const std::vector<MetricRow> rows = rep.summary();
  REQUIRE(rows.size() == 6);
  for (std::size_t m = 0; m < 6; ++m) {
    double mean = 0.0;
    for (const SeedResult &r : rep.runs) mean += metric_of(r, m);
    mean /= 4.0;
    double var = 0.0;
    for (const SeedResult &r : rep.runs) var += (metric_of(r, m) - mean) * (metric_of(r, m) - mean);
    const double sd = std::sqrt(var / 4.0);
    CHECK(rows[m].mean == doctest::Approx(mean).epsilon(1e-12));
    if (sd > 0.0) {
      CHECK(rows[m].std == doctest::Approx(sd).epsilon(1e-12));
    } else {
      CHECK(rows[m].std == 0.0);
    }
  }
  CHECK(rows[0].unit == "count");
  CHECK(rows[1].unit == "m2");
  CHECK(rows[4].unit == "m");
}

TEST_CASE("failed runs are excluded and an empty report is refused") {
  RunReport rep;
  rep.runs.push_back(fake_run(0, 1e-5));
  SeedResult bad = fake_run(1, 5.0);
  bad.failure = "diverged";
  rep.runs.push_back(bad);
  CHECK(rep.completed() == 1);
  CHECK(rep.single_run());
  CHECK(rep.summary()[1].mean == 1e-5);
  CHECK(rep.summary()[1].std == 0.0);
  const std::string text = format_report(rep, ReportFormat::Text);
  CHECK(text.find("seed 1 failed: diverged") != std::string::npos);
  CHECK(text.find("single run") != std::string::npos);

  RunReport empty;
  CHECK_THROWS_AS(empty.summary(), ConfigError);
  CHECK_THROWS_AS(format_report(empty, ReportFormat::Csv), ConfigError);
  CHECK_THROWS_AS(mean_std({}), ConfigError);
}

TEST_CASE("csv report round-trips exactly") {
  RunReport rep;
  rep.runs.push_back(fake_run(3, 1.234567890123e-5));
  rep.runs.push_back(fake_run(4, 2.0 / 3.0 * 1e-5));
  const std::string csv = format_report(rep, ReportFormat::Csv);
  CHECK(csv.rfind("metric,mean,std,unit\n", 0) == 0);
  const std::vector<MetricRow> parsed = parse_report_csv(csv);
  const std::vector<MetricRow> rows = rep.summary();
  REQUIRE(parsed.size() == rows.size());
  for (std::size_t m = 0; m < rows.size(); ++m) {
    CHECK(parsed[m].metric == rows[m].metric);
    CHECK(std::memcmp(&parsed[m].mean, &rows[m].mean, sizeof(double)) == 0);
    CHECK(std::memcmp(&parsed[m].std, &rows[m].std, sizeof(double)) == 0);
    CHECK(parsed[m].unit == rows[m].unit);
  }
  CHECK_THROWS_AS(parse_report_csv("a,b\n"), FormatError);

  TempDir dir("report");
  emit_report(rep, ReportFormat::Csv, dir / "r.csv");
  const auto bytes = read_file_bytes(dir / "r.csv");
  CHECK(std::string(bytes.begin(), bytes.end()) == csv);
}

TEST_CASE("text table lists rows in table order") {
  RunReport rep;
  rep.runs.push_back(fake_run(0, 1e-5));
  rep.runs.push_back(fake_run(1, 2e-5));
  const std::string text = format_report(rep, ReportFormat::Text);
  std::size_t last = 0;
  for (const char *label : {"# params", "Train error", "Infer. error", "Test error", "Full rec. error",
                            "Inner rec. error"}) {
    const std::size_t at = text.find(label);
    REQUIRE(at != std::string::npos);
    CHECK(at > last);
    last = at;
  }
  CHECK(text.find("FINN") != std::string::npos);
  CHECK(text.find("seeds: 0 1") != std::string::npos);
  CHECK_THROWS_AS(report_format_from_string("xml"), ConfigError);
}

TEST_CASE("dataset seeds differ per role and per run") {
  CHECK(dataset_seed(1, DatasetRole::Train) != dataset_seed(1, DatasetRole::Infer));
  CHECK(dataset_seed(1, DatasetRole::Infer) != dataset_seed(1, DatasetRole::Test));
  CHECK(dataset_seed(1, DatasetRole::Train) != dataset_seed(2, DatasetRole::Train));
}

TEST_CASE("identical seeds give zero spread") {
  const ExperimentConfig cfg = tiny_experiment();
  const RunReport rep = run_experiment(cfg, {5, 5});
  REQUIRE(rep.completed() == 2);
  for (const MetricRow &row : rep.summary()) CHECK(row.std == 0.0);
  CHECK(rep.runs[0].params == 212.0);
  CHECK_THROWS_AS(run_experiment(cfg, {}), ConfigError);
}

TEST_CASE("concurrent seeds reproduce the sequential report") {
  ExperimentConfig cfg = tiny_experiment();
  const RunReport a = run_experiment(cfg, {1, 2});
  cfg.concurrent_seeds = true;
  const RunReport b = run_experiment(cfg, {1, 2});
  CHECK(format_report(a, ReportFormat::Csv) == format_report(b, ReportFormat::Csv));
}

TEST_CASE("oracle weights with a true-topography start give vanishing errors") {
  ExperimentConfig cfg = tiny_experiment();
  cfg.fixed_params = FinnParams::oracle(13, kDefaultGravity);
  cfg.infer_from_true_h = true;
  const SeedResult r = run_seed(cfg, 11);
  REQUIRE_FALSE(r.failure.has_value());
  CHECK(r.train_error < 1e-9);
  CHECK(r.infer_error < 1e-9);
  CHECK(r.test_error < 1e-9);
  CHECK(r.full_rec_error < 1e-9);
  CHECK(r.inner_rec_error < 1e-9);
}

TEST_CASE("stage failures are recorded per seed") {
  ExperimentConfig cfg = tiny_experiment();
  cfg.infer.iterations = 2;
  cfg.infer.h_init_m = 1e9;
  const RunReport rep = run_experiment(cfg, {0});
  REQUIRE(rep.runs.size() == 1);
  CHECK(rep.runs[0].failure.has_value());
  CHECK(rep.completed() == 0);
}

} // TEST_SUITE
