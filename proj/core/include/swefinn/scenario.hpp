#pragma once

#include "swefinn/array2d.hpp"
#include "swefinn/grid.hpp"
#include "swefinn/topography.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace swefinn {

struct InitialCondition {
  double x0_m = 0.0;
  double y0_m = 0.0;
  double sigma_m = kDefaultSigmaM;
};

/// One simulated episode. Frames hold steps + 1 snapshots; frame 0 is the
/// rest-state initial condition (u = v = 0).
struct Sequence {
  Grid grid;
  double dt_s = 0.0;
  double g_m_s2 = kDefaultGravity;
  InitialCondition ic;
  TopoSpec topo;
  Field2D H;
  std::vector<Field2D> eta;
  std::vector<Field2D> u;
  std::vector<Field2D> v;

  std::size_t steps() const noexcept { return eta.empty() ? 0 : eta.size() - 1; }
};

/// exp(-((x-x0)^2 + (y-y0)^2) / (2 sigma^2)) at cell centres.
Field2D gaussian_ic(const Grid &grid, double x0_m, double y0_m, double sigma_m);

/// Reference rollout packaged as a Sequence.
Sequence simulate_sequence(const Field2D &H, const TopoSpec &topo, const InitialCondition &ic,
                           const SimConfig &cfg);

enum class DatasetRole : std::uint8_t { Train, Infer, Test };

std::string to_string(DatasetRole role);
DatasetRole dataset_role_from_string(const std::string &name);

struct ManifestEntry {
  std::string file;
  TopoSpec topo;
  InitialCondition ic;
  std::size_t steps = 0;
  double dt_s = 0.0;
};

struct DatasetManifest {
  DatasetRole role = DatasetRole::Train;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<ManifestEntry> entries;
};

inline constexpr const char *kManifestName = "manifest.txt";

/// Knobs for dataset generation beyond the simulation config.
struct DatasetOptions {
  double sigma_m = kDefaultSigmaM;
  TopoParams topo;
  /// Depth scale shared by infer/test sequences; <= 0 draws it from the seed.
  double shared_beta = 0.68;
  /// Seed of the shared bumpy topography (identical for infer and test).
  std::uint64_t shared_topo_seed = 2024;
  /// Bump centres are drawn from cells at least this far from the walls.
  std::size_t ic_margin_cells = 2;
};

/// Deterministic in (role, count, master_seed, cfg, options): writes one
/// SWE1 file per sequence and the manifest (last) into `out_dir`.
DatasetManifest generate_dataset(DatasetRole role, std::size_t count, std::uint64_t master_seed,
                                 const SimConfig &cfg, const DatasetOptions &options,
                                 const std::filesystem::path &out_dir);

/// Same sequences as generate_dataset, kept in memory. Without velocities
/// only the eta frames are retained.
std::vector<Sequence> make_dataset(DatasetRole role, std::size_t count, std::uint64_t master_seed,
                                   const SimConfig &cfg, const DatasetOptions &options,
                                   bool keep_velocities = true);

/// The topography and initial condition of sequence `index`, without
/// simulating it.
struct SequencePlan {
  TopoSpec topo;
  InitialCondition ic;
};

SequencePlan plan_sequence(DatasetRole role, std::size_t index, std::uint64_t master_seed,
                           const Grid &grid, const DatasetOptions &options);

void write_manifest(const DatasetManifest &manifest, const std::filesystem::path &path);
DatasetManifest read_manifest(const std::filesystem::path &path);

/// Reads every sequence listed in `dir`/manifest.txt.
std::vector<Sequence> load_dataset(const std::filesystem::path &dir, DatasetManifest *manifest = nullptr);

} // namespace swefinn
