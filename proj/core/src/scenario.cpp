#include "swefinn/scenario.hpp"

#include "swefinn/errors.hpp"
#include "swefinn/format.hpp"
#include "swefinn/io.hpp"
#include "swefinn/rng.hpp"
#include "swefinn/solver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace swefinn {

Field2D gaussian_ic(const Grid &grid, double x0_m, double y0_m, double sigma_m) {
  grid.validate();
  const double L = grid.side_length_m;
  if (!(x0_m >= 0.0 && x0_m <= L && y0_m >= 0.0 && y0_m <= L)) {
    throw DomainError("initial condition centre (" + format_double(x0_m) + ", " +
                      format_double(y0_m) + ") lies outside the domain [0, " + format_double(L) + "]^2");
  }
  if (!(sigma_m > 0.0)) throw DomainError("sigma must be positive");
  const double two_s2 = 2.0 * sigma_m * sigma_m;
  Field2D eta(grid.nx, grid.ny);
  for (std::size_t i = 0; i < grid.nx; ++i) {
    const double dx = grid.x_center(i) - x0_m;
    for (std::size_t j = 0; j < grid.ny; ++j) {
      const double dy = grid.y_center(j) - y0_m;
      eta(i, j) = std::exp(-(dx * dx / two_s2 + dy * dy / two_s2));
    }
  }
  return eta;
}

Sequence simulate_sequence(const Field2D &H, const TopoSpec &topo, const InitialCondition &ic,
                           const SimConfig &cfg) {
  Sequence seq;
  seq.grid = cfg.grid;
  seq.g_m_s2 = cfg.g_m_s2;
  seq.ic = ic;
  seq.topo = topo;
  seq.H = H;
  Rollout r = reference_rollout(gaussian_ic(cfg.grid, ic.x0_m, ic.y0_m, ic.sigma_m), H, cfg);
  seq.dt_s = r.integration.dt_s;
  seq.eta = std::move(r.eta);
  seq.u = std::move(r.u);
  seq.v = std::move(r.v);
  return seq;
}

std::string to_string(DatasetRole role) {
  switch (role) {
  case DatasetRole::Train: return "train";
  case DatasetRole::Infer: return "infer";
  case DatasetRole::Test: return "test";
  }
  return "?";
}

DatasetRole dataset_role_from_string(const std::string &name) {
  if (name == "train") return DatasetRole::Train;
  if (name == "infer") return DatasetRole::Infer;
  if (name == "test") return DatasetRole::Test;
  throw ConfigError("unknown dataset role '" + name + "' (expected train, infer or test)");
}

namespace {

InitialCondition draw_ic(SplitMix64 &rng, const Grid &grid, const DatasetOptions &options) {
  const std::size_t m = options.ic_margin_cells;
  if (2 * m >= grid.nx || 2 * m >= grid.ny) throw ConfigError("initial-condition margin too wide for grid");
  const std::size_t i = m + rng.below(grid.nx - 2 * m);
  const std::size_t j = m + rng.below(grid.ny - 2 * m);
  return {grid.x_center(i), grid.y_center(j), options.sigma_m};
}

} // namespace

SequencePlan plan_sequence(DatasetRole role, std::size_t index, std::uint64_t master_seed,
                           const Grid &grid, const DatasetOptions &options) {
  SplitMix64 rng(stream_seed(master_seed, index));
  SequencePlan plan;
  if (role == DatasetRole::Train) {
    plan.topo.kind = TopoKind::ArctanSlope;
    plan.topo.rotation_rad = 2.0 * std::numbers::pi * rng.uniform();
    plan.topo.depth_scale = rng.uniform(0.5, 1.0);
    plan.topo.seed = 0;
  } else {
    plan.topo.kind = TopoKind::Bumpy;
    plan.topo.rotation_rad = 0.0;
    plan.topo.seed = options.shared_topo_seed;
    if (options.shared_beta > 0.0) {
      plan.topo.depth_scale = options.shared_beta;
    } else {
      SplitMix64 beta_rng(stream_seed(options.shared_topo_seed, 0xBE7A));
      plan.topo.depth_scale = beta_rng.uniform(0.5, 1.0);
    }
  }
  plan.ic = draw_ic(rng, grid, options);
  return plan;
}

namespace {

Sequence simulate_planned(DatasetRole role, std::size_t i, const SequencePlan &plan, const SimConfig &cfg,
                          const DatasetOptions &options, Field2D &shared_H) {
  Field2D H;
  if (role == DatasetRole::Train) {
    H = generate_topography(cfg.grid, plan.topo, options.topo);
  } else {
    if (shared_H.empty()) shared_H = generate_topography(cfg.grid, plan.topo, options.topo);
    H = shared_H;
  }
  try {
    return simulate_sequence(H, plan.topo, plan.ic, cfg);
  } catch (const DryingError &e) {
    throw DryingError("sequence " + std::to_string(i) + ": " + e.what());
  } catch (const InstabilityError &e) {
    throw InstabilityError("sequence " + std::to_string(i) + ": " + e.what());
  }
}

void check_count(std::size_t count, const SimConfig &cfg) {
  if (count < 1) throw ConfigError("dataset count must be >= 1");
  cfg.validate();
}

} // namespace

std::vector<Sequence> make_dataset(DatasetRole role, std::size_t count, std::uint64_t master_seed,
                                   const SimConfig &cfg, const DatasetOptions &options, bool keep_velocities) {
  check_count(count, cfg);
  std::vector<Sequence> out;
  out.reserve(count);
  Field2D shared_H;
  for (std::size_t i = 0; i < count; ++i) {
    const SequencePlan plan = plan_sequence(role, i, master_seed, cfg.grid, options);
    Sequence seq = simulate_planned(role, i, plan, cfg, options, shared_H);
    if (!keep_velocities) {
      seq.u.clear();
      seq.v.clear();
    }
    out.push_back(std::move(seq));
  }
  return out;
}

DatasetManifest generate_dataset(DatasetRole role, std::size_t count, std::uint64_t master_seed,
                                 const SimConfig &cfg, const DatasetOptions &options,
                                 const std::filesystem::path &out_dir) {
  check_count(count, cfg);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  DatasetManifest manifest;
  manifest.role = role;
  manifest.count = count;
  manifest.seed = master_seed;
  manifest.nx = cfg.grid.nx;
  manifest.ny = cfg.grid.ny;

  Field2D shared_H;
  for (std::size_t i = 0; i < count; ++i) {
    const SequencePlan plan = plan_sequence(role, i, master_seed, cfg.grid, options);
    const Sequence seq = simulate_planned(role, i, plan, cfg, options, shared_H);
    char name[32];
    std::snprintf(name, sizeof(name), "seq_%05zu.swe", i);
    write_sequence(out_dir / name, seq);
    manifest.entries.push_back({name, plan.topo, plan.ic, seq.steps(), seq.dt_s});
  }
  write_manifest(manifest, out_dir / kManifestName);
  return manifest;
}

void write_manifest(const DatasetManifest &m, const std::filesystem::path &path) {
  std::ostringstream os;
  os << "role = " << to_string(m.role) << '\n'
     << "count = " << m.count << '\n'
     << "seed = " << m.seed << '\n'
     << "nx = " << m.nx << '\n'
     << "ny = " << m.ny << '\n';
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    const ManifestEntry &e = m.entries[i];
    os << '\n'
       << "sequence = " << i << '\n'
       << "file = " << e.file << '\n'
       << "kind = " << to_string(e.topo.kind) << '\n'
       << "phi = " << format_double(e.topo.rotation_rad) << '\n'
       << "beta = " << format_double(e.topo.depth_scale) << '\n'
       << "topo_seed = " << e.topo.seed << '\n'
       << "x0_m = " << format_double(e.ic.x0_m) << '\n'
       << "y0_m = " << format_double(e.ic.y0_m) << '\n'
       << "sigma_m = " << format_double(e.ic.sigma_m) << '\n'
       << "steps = " << e.steps << '\n'
       << "dt_s = " << format_double(e.dt_s) << '\n';
  }
  const std::string text = os.str();
  write_file_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

DatasetManifest read_manifest(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  DatasetManifest m;
  ManifestEntry *cur = nullptr;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key(trim(t.substr(0, eq)));
    const std::string value(trim(t.substr(eq + 1)));
    try {
      if (key == "sequence") {
        if (parse_uint(value) != m.entries.size()) throw FormatError("sequence blocks out of order");
        m.entries.emplace_back();
        cur = &m.entries.back();
      } else if (cur == nullptr) {
        if (key == "role") m.role = dataset_role_from_string(value);
        else if (key == "count") m.count = parse_uint(value);
        else if (key == "seed") m.seed = parse_uint(value);
        else if (key == "nx") m.nx = parse_uint(value);
        else if (key == "ny") m.ny = parse_uint(value);
        else throw FormatError("unknown manifest key '" + key + "'");
      } else {
        if (key == "file") cur->file = value;
        else if (key == "kind") cur->topo.kind = topo_kind_from_string(value);
        else if (key == "phi") cur->topo.rotation_rad = parse_double(value);
        else if (key == "beta") cur->topo.depth_scale = parse_double(value);
        else if (key == "topo_seed") cur->topo.seed = parse_uint(value);
        else if (key == "x0_m") cur->ic.x0_m = parse_double(value);
        else if (key == "y0_m") cur->ic.y0_m = parse_double(value);
        else if (key == "sigma_m") cur->ic.sigma_m = parse_double(value);
        else if (key == "steps") cur->steps = parse_uint(value);
        else if (key == "dt_s") cur->dt_s = parse_double(value);
        else throw FormatError("unknown sequence key '" + key + "'");
      }
    } catch (const Error &e) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (m.entries.size() != m.count) {
    throw FormatError(path.string() + ": manifest lists " + std::to_string(m.entries.size()) +
                      " sequences but count = " + std::to_string(m.count));
  }
  return m;
}

std::vector<Sequence> load_dataset(const std::filesystem::path &dir, DatasetManifest *manifest_out) {
  DatasetManifest m = read_manifest(dir / kManifestName);
  std::vector<Sequence> out;
  out.reserve(m.entries.size());
  for (const ManifestEntry &e : m.entries) {
    Sequence s = read_sequence(dir / e.file);
    s.topo = e.topo;
    out.push_back(std::move(s));
  }
  if (manifest_out != nullptr) *manifest_out = std::move(m);
  return out;
}

} // namespace swefinn
