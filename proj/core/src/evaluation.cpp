#include "swefinn/evaluation.hpp"

#include "swefinn/errors.hpp"
#include "swefinn/format.hpp"
#include "swefinn/io.hpp"
#include "swefinn/rng.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

namespace swefinn {

const std::vector<std::string> &metric_names() {
  static const std::vector<std::string> names = {"params",     "train_error",    "infer_error",
                                                 "test_error", "full_rec_error", "inner_rec_error"};
  return names;
}

namespace {

const std::vector<std::string> &metric_units() {
  static const std::vector<std::string> units = {"count", "m2", "m2", "m2", "m", "m"};
  return units;
}

const std::vector<std::string> &metric_labels() {
  static const std::vector<std::string> labels = {"# params",   "Train error",     "Infer. error",
                                                  "Test error", "Full rec. error", "Inner rec. error"};
  return labels;
}

std::vector<double> metric_values(const SeedResult &r) {
  return {r.params, r.train_error, r.infer_error, r.test_error, r.full_rec_error, r.inner_rec_error};
}

} // namespace

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw ConfigError("mean/std of an empty set");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

std::vector<std::uint64_t> RunReport::seeds() const {
  std::vector<std::uint64_t> out;
  for (const SeedResult &r : runs) out.push_back(r.seed);
  return out;
}

std::size_t RunReport::completed() const {
  std::size_t n = 0;
  for (const SeedResult &r : runs) n += r.failure ? 0 : 1;
  return n;
}

std::vector<MetricRow> RunReport::summary() const {
  if (completed() == 0) {
    throw ConfigError("report has no completed runs (R = 0); nothing to aggregate");
  }
  const auto &names = metric_names();
  std::vector<std::vector<double>> columns(names.size());
  for (const SeedResult &r : runs) {
    if (r.failure) continue;
    const std::vector<double> v = metric_values(r);
    for (std::size_t m = 0; m < names.size(); ++m) columns[m].push_back(v[m]);
  }
  std::vector<MetricRow> rows;
  for (std::size_t m = 0; m < names.size(); ++m) {
    const MeanStd s = mean_std(columns[m]);
    rows.push_back({names[m], s.mean, s.std, metric_units()[m]});
  }
  return rows;
}

std::uint64_t dataset_seed(std::uint64_t run_seed, DatasetRole role) {
  return stream_seed(run_seed, 0xDA7A0000 + static_cast<std::uint64_t>(role));
}

SeedResult run_seed(const ExperimentConfig &cfg, std::uint64_t seed, std::ostream *log) {
  SeedResult out;
  out.seed = seed;
  try {
    FinnParams params;
    {
      const std::vector<Sequence> train_data =
          make_dataset(DatasetRole::Train, cfg.train_count, dataset_seed(seed, DatasetRole::Train), cfg.sim,
                       cfg.data, false);
      if (cfg.fixed_params) {
        params = *cfg.fixed_params;
        out.train_error = evaluate(train_data, params, nullptr, cfg.train.batch_size, cfg.train.train_window_T,
                                   cfg.train.threads);
      } else {
        TrainConfig tc = cfg.train;
        tc.seed = seed;
        const TrainResult tr = train(train_data, tc, std::nullopt, log);
        if (tr.epoch_losses.empty()) throw NonFiniteError("training aborted: " + tr.abort_reason.value_or("?"));
        params = tr.best_params;
        out.train_error = tr.best_loss;
      }
    }
    out.params = static_cast<double>(params.param_count());

    const std::vector<Sequence> infer_data = make_dataset(
        DatasetRole::Infer, cfg.infer_count, dataset_seed(seed, DatasetRole::Infer), cfg.sim, cfg.data, false);
    const Field2D &H_true = infer_data.front().H;
    InverseConfig ic = cfg.infer;
    ic.seed = seed;
    const std::optional<Field2D> start = cfg.infer_from_true_h ? std::optional<Field2D>(H_true) : std::nullopt;
    const InverseResult inv = infer_topography(infer_data, params, ic, start, log);
    if (inv.log.empty()) throw NonFiniteError("inversion aborted: " + inv.abort_reason.value_or("?"));
    out.infer_error = inv.best_data;
    out.full_rec_error = reconstruction_error(inv.H_best, H_true, RecMode::Full);
    out.inner_rec_error = reconstruction_error(inv.H_best, H_true, RecMode::Inner);

    const std::vector<Sequence> test_data = make_dataset(
        DatasetRole::Test, cfg.test_count, dataset_seed(seed, DatasetRole::Test), cfg.sim, cfg.data, false);
    out.test_error = evaluate(test_data, params, &inv.H_best, cfg.eval_batch_size, ic.window_T, ic.threads);
  } catch (const Error &e) {
    out.failure = e.what();
    if (log != nullptr) *log << "seed " << seed << " failed: " << e.what() << '\n';
  }
  return out;
}

RunReport run_experiment(const ExperimentConfig &cfg, const std::vector<std::uint64_t> &seeds, std::ostream *log) {
  if (seeds.empty()) throw ConfigError("no seeds given");
  RunReport report;
  report.runs.resize(seeds.size());
  if (cfg.concurrent_seeds && seeds.size() > 1) {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      pool.emplace_back([&, k] { report.runs[k] = run_seed(cfg, seeds[k], nullptr); });
    }
    for (std::thread &t : pool) t.join();
  } else {
    for (std::size_t k = 0; k < seeds.size(); ++k) report.runs[k] = run_seed(cfg, seeds[k], log);
  }
  return report;
}

ReportFormat report_format_from_string(const std::string &name) {
  if (name == "text") return ReportFormat::Text;
  if (name == "csv") return ReportFormat::Csv;
  throw ConfigError("unknown report format '" + name + "' (expected text or csv)");
}

std::string format_report(const RunReport &report, ReportFormat format) {
  const std::vector<MetricRow> rows = report.summary();
  std::ostringstream os;
  if (format == ReportFormat::Csv) {
    os << "metric,mean,std,unit\n";
    for (const MetricRow &r : rows) {
      os << r.metric << ',' << format_double(r.mean) << ',' << format_double(r.std) << ',' << r.unit << '\n';
    }
  } else {
    char line[256];
    std::snprintf(line, sizeof(line), "%-18s %s\n", "", report.model_label.c_str());
    os << line;
    for (std::size_t m = 0; m < rows.size(); ++m) {
      const std::string cell = format_double(rows[m].mean) + " +/- " + format_double(rows[m].std);
      std::snprintf(line, sizeof(line), "%-18s %s\n", metric_labels()[m].c_str(), cell.c_str());
      os << line;
    }
    os << "\nruns: " << report.completed() << " of " << report.runs.size() << " completed; seeds:";
    for (std::uint64_t s : report.seeds()) os << ' ' << s;
    os << '\n';
    if (report.single_run()) os << "note: single run, std is 0 by construction\n";
    for (const SeedResult &r : report.runs) {
      if (r.failure) os << "seed " << r.seed << " failed: " << *r.failure << '\n';
    }
  }
  return os.str();
}

void emit_report(const RunReport &report, ReportFormat format, const std::filesystem::path &path) {
  const std::string text = format_report(report, format);
  write_file_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::vector<MetricRow> parse_report_csv(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  std::vector<MetricRow> rows;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!header) {
      if (trim(line) != "metric,mean,std,unit") throw FormatError("report csv: unexpected header '" + line + "'");
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) throw FormatError("report csv line " + std::to_string(lineno) + ": expected 4 columns");
    rows.push_back({cells[0], parse_double(cells[1]), parse_double(cells[2]), std::string(trim(cells[3]))});
  }
  if (!header) throw FormatError("report csv: missing header");
  return rows;
}

} // namespace swefinn
