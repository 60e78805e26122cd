#include "swefinn/config.hpp"

#include "swefinn/errors.hpp"
#include "swefinn/format.hpp"
#include "swefinn/io.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace swefinn {

namespace {

struct Entry {
  std::function<std::string(const AppConfig &)> get;
  std::function<void(AppConfig &, const std::string &)> set;
};

std::string str(double v) { return format_double(v); }
std::string str(std::size_t v) { return std::to_string(v); }
std::string str(std::uint64_t v, int) { return std::to_string(v); }
std::string str(bool v) { return v ? "true" : "false"; }

bool parse_bool(const std::string &s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("cannot parse '" + s + "' as a boolean");
}

std::size_t parse_size(const std::string &s) { return static_cast<std::size_t>(parse_uint(s)); }

std::vector<std::uint64_t> parse_seed_list(const std::string &s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_uint(item));
  }
  if (out.empty()) throw ConfigError("seed list is empty");
  return out;
}

std::string seed_list(const std::vector<std::uint64_t> &seeds) {
  std::string out;
  for (std::size_t k = 0; k < seeds.size(); ++k) out += (k ? "," : "") + std::to_string(seeds[k]);
  return out;
}

#define REAL(key, field) \
  { key, {[](const AppConfig &c) { return str(c.field); }, [](AppConfig &c, const std::string &v) { c.field = parse_double(v); }} }
#define SIZE(key, field) \
  { key, {[](const AppConfig &c) { return str(c.field); }, [](AppConfig &c, const std::string &v) { c.field = parse_size(v); }} }
#define U64(key, field) \
  { key, {[](const AppConfig &c) { return str(c.field, 0); }, [](AppConfig &c, const std::string &v) { c.field = parse_uint(v); }} }
#define BOOL(key, field) \
  { key, {[](const AppConfig &c) { return str(c.field); }, [](AppConfig &c, const std::string &v) { c.field = parse_bool(v); }} }

const std::map<std::string, Entry> &registry() {
  static const std::map<std::string, Entry> entries = {
      SIZE("sim.nx", sim.grid.nx),
      SIZE("sim.ny", sim.grid.ny),
      REAL("sim.side_length_m", sim.grid.side_length_m),
      REAL("sim.g_m_s2", sim.g_m_s2),
      REAL("sim.cfl", sim.cfl),
      REAL("sim.duration_s", sim.duration_s),
      {"sim.dt_s",
       {[](const AppConfig &c) { return c.sim.dt_s ? str(*c.sim.dt_s) : std::string("auto"); },
        [](AppConfig &c, const std::string &v) {
          if (v == "auto") c.sim.dt_s.reset();
          else c.sim.dt_s = parse_double(v);
        }}},
      {"sim.steps",
       {[](const AppConfig &c) { return c.sim.steps ? str(*c.sim.steps) : std::string("auto"); },
        [](AppConfig &c, const std::string &v) {
          if (v == "auto") c.sim.steps.reset();
          else c.sim.steps = parse_size(v);
        }}},

      REAL("data.sigma_m", data.sigma_m),
      REAL("data.shared_beta", data.shared_beta),
      U64("data.shared_topo_seed", data.shared_topo_seed),
      SIZE("data.ic_margin_cells", data.ic_margin_cells),

      REAL("topo.base_depth_m", data.topo.base_depth_m),
      REAL("topo.arctan_amplitude_m", data.topo.arctan_amplitude_m),
      REAL("topo.arctan_steepness", data.topo.arctan_steepness),
      REAL("topo.bumpy_reference_beta", data.topo.bumpy_reference_beta),
      REAL("topo.bumpy_min_m", data.topo.bumpy_min_m),
      REAL("topo.bumpy_max_m", data.topo.bumpy_max_m),

      SIZE("finn.hidden_width", train.hidden_width),

      SIZE("train.epochs", train.epochs),
      SIZE("train.batch_size", train.batch_size),
      REAL("train.learning_rate", train.learning_rate),
      {"train.optimizer",
       {[](const AppConfig &c) { return to_string(c.train.optimizer); },
        [](AppConfig &c, const std::string &v) { c.train.optimizer = optimizer_from_string(v); }}},
      SIZE("train.window_T", train.train_window_T),
      U64("train.seed", train.seed),
      REAL("train.clip_norm", train.clip_norm),
      SIZE("train.checkpoint_every", train.checkpoint_every),
      SIZE("train.threads", train.threads),

      SIZE("infer.iterations", infer.iterations),
      REAL("infer.lambda_smooth", infer.lambda_smooth),
      REAL("infer.lambda_edge", infer.lambda_edge),
      REAL("infer.h_init_m", infer.h_init_m),
      REAL("infer.learning_rate", infer.learning_rate),
      SIZE("infer.batch_size", infer.batch_size),
      U64("infer.seed", infer.seed),
      REAL("infer.min_depth_m", infer.min_depth_m),
      SIZE("infer.window_T", infer.window_T),
      SIZE("infer.threads", infer.threads),

      SIZE("eval.batch_size", eval.batch_size),
      SIZE("eval.train_count", eval.train_count),
      SIZE("eval.infer_count", eval.infer_count),
      SIZE("eval.test_count", eval.test_count),
      {"eval.seeds",
       {[](const AppConfig &c) { return seed_list(c.eval.seeds); },
        [](AppConfig &c, const std::string &v) { c.eval.seeds = parse_seed_list(v); }}},
      BOOL("eval.concurrent_seeds", eval.concurrent_seeds),
      {"eval.label",
       {[](const AppConfig &c) { return c.eval.label; },
        [](AppConfig &c, const std::string &v) { c.eval.label = v; }}},
  };
  return entries;
}

#undef REAL
#undef SIZE
#undef U64
#undef BOOL

const Entry &lookup(const std::string &key) {
  const auto &reg = registry();
  const auto it = reg.find(key);
  if (it == reg.end()) throw ConfigError("unknown configuration key '" + key + "'");
  return it->second;
}

} // namespace

void AppConfig::set(const std::string &key, const std::string &value) {
  const Entry &e = lookup(key);
  try {
    e.set(*this, std::string(trim(value)));
  } catch (const ConfigError &err) {
    throw ConfigError(key + ": " + err.what());
  }
}

std::string AppConfig::get(const std::string &key) const { return lookup(key).get(*this); }

void AppConfig::apply_text(const std::string &text, const std::string &origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string_view t = trim(std::string_view(line).substr(0, hash));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    try {
      set(std::string(trim(t.substr(0, eq))), std::string(trim(t.substr(eq + 1))));
    } catch (const ConfigError &e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void AppConfig::apply_file(const std::filesystem::path &path) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  apply_text(std::string(bytes.begin(), bytes.end()), path.string());
}

void AppConfig::apply_override(const std::string &assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form key=value");
  set(std::string(trim(std::string_view(assignment).substr(0, eq))),
      std::string(trim(std::string_view(assignment).substr(eq + 1))));
}

std::string AppConfig::dump() const {
  std::string out;
  for (const auto &[key, entry] : registry()) out += key + " = " + entry.get(*this) + '\n';
  return out;
}

ExperimentConfig AppConfig::experiment() const {
  ExperimentConfig e;
  e.sim = sim;
  e.data = data;
  e.train = train;
  e.infer = infer;
  e.train_count = eval.train_count;
  e.infer_count = eval.infer_count;
  e.test_count = eval.test_count;
  e.eval_batch_size = eval.batch_size;
  e.concurrent_seeds = eval.concurrent_seeds;
  return e;
}

const std::vector<std::string> &AppConfig::keys() {
  static const std::vector<std::string> out = [] {
    std::vector<std::string> k;
    for (const auto &kv : registry()) k.push_back(kv.first);
    return k;
  }();
  return out;
}

} // namespace swefinn
