#pragma once

#include "swefinn/grid.hpp"
#include "swefinn/inversion.hpp"
#include "swefinn/scenario.hpp"
#include "swefinn/training.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace swefinn {

/// Metrics of one seeded train -> infer -> test run.
struct SeedResult {
  std::uint64_t seed = 0;
  double params = 0.0;
  double train_error = 0.0;
  double infer_error = 0.0;
  double test_error = 0.0;
  double full_rec_error = 0.0;
  double inner_rec_error = 0.0;
  /// Set when a stage failed; the other fields are then not meaningful.
  std::optional<std::string> failure;
};

struct MetricRow {
  std::string metric;
  double mean = 0.0;
  double std = 0.0;
  std::string unit;
};

struct RunReport {
  std::string model_label = "FINN";
  std::vector<SeedResult> runs;

  std::vector<std::uint64_t> seeds() const;
  std::size_t completed() const;
  /// One row per metric in table order; population std over completed runs.
  /// Throws ConfigError when no run completed.
  std::vector<MetricRow> summary() const;
  /// True when exactly one run completed (std is then 0 by construction).
  bool single_run() const { return completed() == 1; }
};

/// Table order: params, train, inference, test, full rec., inner rec.
const std::vector<std::string> &metric_names();

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Population mean and standard deviation; empty input is an error.
MeanStd mean_std(std::span<const double> values);

struct ExperimentConfig {
  SimConfig sim;
  DatasetOptions data;
  std::size_t train_count = 512;
  std::size_t infer_count = 256;
  std::size_t test_count = 256;
  TrainConfig train;
  InverseConfig infer;
  /// Batch size used for the test error.
  std::size_t eval_batch_size = 8;
  /// Start inversion from the true H instead of the flat field.
  bool infer_from_true_h = false;
  /// Skip training and use these parameters.
  std::optional<FinnParams> fixed_params;
  /// Run seeds on separate threads.
  bool concurrent_seeds = false;
};

/// Dataset master seeds derived from a run seed.
std::uint64_t dataset_seed(std::uint64_t run_seed, DatasetRole role);

SeedResult run_seed(const ExperimentConfig &cfg, std::uint64_t seed, std::ostream *log = nullptr);

RunReport run_experiment(const ExperimentConfig &cfg, const std::vector<std::uint64_t> &seeds,
                         std::ostream *log = nullptr);

enum class ReportFormat { Text, Csv };

ReportFormat report_format_from_string(const std::string &name);

/// Deterministic serialisation. Throws ConfigError for a report without
/// completed runs.
std::string format_report(const RunReport &report, ReportFormat format);
void emit_report(const RunReport &report, ReportFormat format, const std::filesystem::path &path);

/// Parses the csv produced by format_report.
std::vector<MetricRow> parse_report_csv(const std::string &text);

} // namespace swefinn
