// swefinn: dataset generation, reference simulation, training, topography
// inference, evaluation, reporting and rendering from one binary.

#include "swefinn/config.hpp"
#include "swefinn/errors.hpp"
#include "swefinn/evaluation.hpp"
#include "swefinn/format.hpp"
#include "swefinn/io.hpp"
#include "swefinn/render.hpp"
#include "swefinn/solver.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace swefinn;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct Globals {
  std::string config_file;
  std::vector<std::string> overrides;
  bool print_config = false;
};

AppConfig resolve_config(const Globals &g) {
  AppConfig cfg;
  if (!g.config_file.empty()) cfg.apply_file(g.config_file);
  for (const std::string &o : g.overrides) cfg.apply_override(o);
  return cfg;
}

// writes each line to stderr as it arrives and keeps a copy for the log file
class LineLog : public std::streambuf {
public:
  explicit LineLog(const std::string &path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw IoError("cannot open log file '" + path + "' for writing");
    }
  }

protected:
  int overflow(int ch) override {
    if (ch == traits_type::eof()) return 0;
    const char c = static_cast<char>(ch);
    std::cerr.put(c);
    if (file_.is_open()) file_.put(c);
    if (c == '\n') {
      std::cerr.flush();
      if (file_.is_open()) file_.flush();
    }
    return ch;
  }

private:
  std::ofstream file_;
};

std::pair<double, double> parse_pair(const std::string &text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError("expected x,y but got '" + text + "'");
  return {parse_double(text.substr(0, comma)), parse_double(text.substr(comma + 1))};
}

void print_path(const fs::path &p) { std::cout << p.string() << '\n'; }

std::vector<Sequence> load_checked(const std::string &dir) {
  std::vector<Sequence> data = load_dataset(dir);
  if (data.empty()) throw ConfigError("dataset '" + dir + "' is empty");
  return data;
}

std::string snapshot_name(std::size_t iteration) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "h_iter%05zu.bin", iteration);
  return buf;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Shallow-water simulation, FINN training and topography inference"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  Globals globals;
  app.add_option("--config", globals.config_file, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", globals.overrides, "override one key (key=value), repeatable")->take_all();
  app.add_flag("--print-config", globals.print_config, "print the resolved configuration and exit");

  // generate
  auto *gen = app.add_subcommand("generate", "simulate a dataset into a directory");
  std::string gen_role, gen_out;
  std::size_t gen_count = 0;
  std::uint64_t gen_seed = 0;
  gen->add_option("--role", gen_role, "train, infer or test")->required();
  gen->add_option("--count", gen_count, "number of sequences")->required();
  gen->add_option("--seed", gen_seed, "master seed")->required();
  gen->add_option("--out", gen_out, "output directory")->required();

  // simulate
  auto *sim = app.add_subcommand("simulate", "one reference rollout from rest");
  std::string sim_h, sim_ic, sim_out;
  double sim_flat = 0.0;
  auto *h_opt = sim->add_option("--h-file", sim_h, "depth field file");
  auto *flat_opt = sim->add_option("--flat-depth", sim_flat, "use a flat depth in metres instead of --h-file");
  h_opt->excludes(flat_opt);
  sim->add_option("--ic", sim_ic, "bump centre x0,y0 in metres")->required();
  sim->add_option("--out", sim_out, "output sequence file")->required();

  // train
  auto *trn = app.add_subcommand("train", "fit FINN parameters on a training dataset");
  std::string trn_data, trn_out, trn_log, trn_init;
  trn->add_option("--data", trn_data, "training dataset directory")->required();
  trn->add_option("--out", trn_out, "best checkpoint path")->required();
  trn->add_option("--log", trn_log, "also write the loss log here");
  trn->add_option("--init", trn_init, "start from this checkpoint");

  // infer
  auto *inf = app.add_subcommand("infer", "invert the topography with frozen parameters");
  std::string inf_data, inf_ckpt, inf_out, inf_log, inf_snap_dir, inf_start;
  std::size_t inf_snap_every = 0;
  inf->add_option("--data", inf_data, "inference dataset directory")->required();
  inf->add_option("--checkpoint", inf_ckpt, "trained parameters")->required();
  inf->add_option("--out", inf_out, "inferred depth field (lowest data loss)")->required();
  inf->add_option("--log", inf_log, "also write the iteration log here");
  inf->add_option("--snapshot-every", inf_snap_every, "write H every K iterations");
  inf->add_option("--snapshot-dir", inf_snap_dir, "snapshot directory (default: next to --out)");
  inf->add_option("--h-start", inf_start, "start from this depth field instead of a flat one");

  // eval
  auto *evl = app.add_subcommand("eval", "batch-averaged rollout MSE on a dataset");
  evl->set_help_flag("--help", "print this help message and exit");
  std::string evl_data, evl_ckpt, evl_h;
  evl->add_option("--data", evl_data, "dataset directory")->required();
  evl->add_option("--checkpoint", evl_ckpt, "trained parameters")->required();
  evl->add_option("--h", evl_h, "roll out every sequence on this depth field");

  // report
  auto *rep = app.add_subcommand("report", "seeded train -> infer -> test runs, aggregated");
  std::string rep_out, rep_fmt = "text", rep_ckpt;
  bool rep_true_h = false;
  rep->add_option("--out", rep_out, "report file")->required();
  rep->add_option("--fmt", rep_fmt, "text or csv")->check(CLI::IsMember({"text", "csv"}));
  rep->add_option("--checkpoint", rep_ckpt, "skip training and use these parameters");
  rep->add_flag("--from-true-h", rep_true_h, "start inversion from the true depth");

  // render
  auto *ren = app.add_subcommand("render", "write a field or sequence frame as pgm or csv");
  std::string ren_in, ren_out, ren_fmt = "pgm", ren_var = "eta";
  std::size_t ren_frame = 0;
  bool ren_negate = false;
  ren->add_option("--in", ren_in, "field or sequence file")->required();
  ren->add_option("--out", ren_out, "output path")->required();
  ren->add_option("--frame", ren_frame, "frame index for sequences");
  ren->add_option("--var", ren_var, "eta, u, v or H for sequences")->check(CLI::IsMember({"eta", "u", "v", "H"}));
  ren->add_option("--fmt", ren_fmt, "pgm or csv")->check(CLI::IsMember({"pgm", "csv"}));
  ren->add_flag("--negate-depth", ren_negate, "render -H for depth fields");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const AppConfig cfg = resolve_config(globals);
    if (globals.print_config) {
      std::cout << cfg.dump();
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return kExitUsage;
    }

    if (*gen) {
      const DatasetRole role = dataset_role_from_string(gen_role);
      const DatasetManifest m = generate_dataset(role, gen_count, gen_seed, cfg.sim, cfg.data, gen_out);
      std::cerr << "generated " << m.count << ' ' << to_string(role) << " sequences of " << m.entries.front().steps
                << " steps\n";
      print_path(fs::path(gen_out) / kManifestName);
    } else if (*sim) {
      const auto [x0, y0] = parse_pair(sim_ic);
      const Grid &grid = cfg.sim.grid;
      const double side = grid.side_length_m;
      if (!(x0 >= 0.0 && x0 <= side && y0 >= 0.0 && y0 <= side))
        throw ConfigError("--ic " + sim_ic + " lies outside the domain [0, " + format_double(side) + "]^2");
      Field2D H;
      TopoSpec topo;
      if (!sim_h.empty()) {
        H = read_field(sim_h);
        grid.check_field(H, "--h-file");
      } else if (*flat_opt) {
        if (!(sim_flat > 0.0)) throw ConfigError("--flat-depth must be positive");
        H = Field2D(grid.nx, grid.ny, sim_flat);
      } else {
        throw ConfigError("simulate needs --h-file or --flat-depth");
      }
      const Sequence s = simulate_sequence(H, topo, {x0, y0, cfg.data.sigma_m}, cfg.sim);
      const double s0 = field_sum(s.eta.front());
      double drift = 0.0;
      for (const Field2D &f : s.eta) drift = std::max(drift, std::abs(field_sum(f) - s0));
      std::cerr << "steps=" << s.steps() << " dt=" << format_double(s.dt_s)
                << " relative_mass_drift=" << format_double(drift / field_abs_sum(s.eta.front())) << '\n';
      write_sequence(sim_out, s);
      print_path(sim_out);
    } else if (*trn) {
      const std::vector<Sequence> data = load_checked(trn_data);
      TrainConfig tc = cfg.train;
      tc.checkpoint_path = trn_out;
      std::optional<FinnParams> init;
      if (!trn_init.empty()) init = read_checkpoint(trn_init, tc.hidden_width).params;
      LineLog buf(trn_log);
      std::ostream log(&buf);
      const TrainResult r = train(data, tc, init, &log);
      if (r.epoch_losses.empty()) {
        std::cerr << "training aborted before the first epoch: " << r.abort_reason.value_or("?") << '\n';
        return kExitRuntime;
      }
      std::cerr << "best epoch " << r.best_epoch << " loss " << format_double(r.best_loss) << '\n';
      print_path(trn_out);
      if (r.abort_reason) return kExitRuntime;
    } else if (*inf) {
      const std::vector<Sequence> data = load_checked(inf_data);
      const FinnParams params = read_checkpoint(inf_ckpt, cfg.train.hidden_width).params;
      std::optional<Field2D> start;
      if (!inf_start.empty()) start = read_field(inf_start);
      fs::path snap_dir = inf_snap_dir.empty() ? fs::path(inf_out).parent_path() / "snapshots" : fs::path(inf_snap_dir);
      SnapshotFn snap;
      if (inf_snap_every > 0) {
        fs::create_directories(snap_dir);
        const Grid grid = data.front().grid;
        snap = [&, grid](std::size_t it, const Field2D &H) {
          if (it % inf_snap_every == 0) write_field(snap_dir / snapshot_name(it), H, grid);
        };
      }
      LineLog buf(inf_log);
      std::ostream log(&buf);
      const InverseResult r = infer_topography(data, params, cfg.infer, start, &log, snap);
      write_field(inf_out, r.H_best, data.front().grid);
      const Field2D &truth = data.front().H;
      std::cerr << "best iteration " << r.best_iteration << " data " << format_double(r.best_data)
                << " full_rec " << format_double(reconstruction_error(r.H_best, truth, RecMode::Full));
      if (truth.rows() >= 5 && truth.cols() >= 5) {
        std::cerr << " inner_rec " << format_double(reconstruction_error(r.H_best, truth, RecMode::Inner));
      }
      std::cerr << '\n';
      print_path(inf_out);
      if (r.abort_reason) return kExitRuntime;
    } else if (*evl) {
      const std::vector<Sequence> data = load_checked(evl_data);
      const FinnParams params = read_checkpoint(evl_ckpt, cfg.train.hidden_width).params;
      std::optional<Field2D> H;
      if (!evl_h.empty()) H = read_field(evl_h);
      const double mse = evaluate(data, params, H ? &*H : nullptr, cfg.eval.batch_size, cfg.train.train_window_T,
                                  cfg.train.threads);
      std::cout << format_double(mse) << '\n';
    } else if (*rep) {
      ExperimentConfig ec = cfg.experiment();
      if (!rep_ckpt.empty()) ec.fixed_params = read_checkpoint(rep_ckpt, cfg.train.hidden_width).params;
      ec.infer_from_true_h = rep_true_h;
      RunReport report = run_experiment(ec, cfg.eval.seeds, &std::cerr);
      report.model_label = cfg.eval.label;
      if (report.completed() == 0) {
        for (const SeedResult &r : report.runs) std::cerr << "seed " << r.seed << ": " << r.failure.value_or("") << '\n';
        throw Error("no seed completed; report not written");
      }
      emit_report(report, report_format_from_string(rep_fmt), rep_out);
      print_path(rep_out);
    } else if (*ren) {
      Field2D field;
      if (is_field_file(ren_in)) {
        field = read_field(ren_in);
      } else {
        const Sequence s = read_sequence(ren_in);
        if (ren_var == "H") {
          field = s.H;
        } else {
          if (ren_frame > s.steps()) {
            throw ConfigError("frame " + std::to_string(ren_frame) + " out of range (sequence has frames 0.." +
                              std::to_string(s.steps()) + ")");
          }
          const std::vector<Field2D> &frames = ren_var == "u" ? s.u : ren_var == "v" ? s.v : s.eta;
          if (frames.size() <= ren_frame) throw FormatError("sequence file has no " + ren_var + " frames");
          field = frames[ren_frame];
        }
      }
      if (ren_negate) field = negated(field);
      if (ren_fmt == "pgm") {
        write_file_bytes(ren_out, render_pgm(field));
      } else {
        const std::string text = render_csv(field);
        write_file_bytes(ren_out, std::vector<std::uint8_t>(text.begin(), text.end()));
      }
      print_path(ren_out);
    }
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
