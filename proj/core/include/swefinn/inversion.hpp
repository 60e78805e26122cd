#pragma once

#include "swefinn/array2d.hpp"
#include "swefinn/autodiff.hpp"
#include "swefinn/finn.hpp"
#include "swefinn/scenario.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace swefinn {

struct InverseConfig {
  std::size_t iterations = 1600;
  double lambda_smooth = 5.0e-7;
  double lambda_edge = 5.0e-7;
  double h_init_m = 70.0;
  double learning_rate = 1.0e-2;
  std::size_t batch_size = 8;
  std::uint64_t seed = 0;
  double min_depth_m = 0.1;
  /// Rollout length used in the data term; 0 means the full sequence.
  std::size_t window_T = 0;
  std::size_t threads = 1;

  void validate() const;
};

/// Sum of squared differences over all horizontally and vertically adjacent
/// cell pairs.
ad::Var smoothness_penalty(ad::Tape &tape, ad::Var H);

/// Each border cell is pulled towards the nearest interior cell (indices
/// clamped to [1, n-2]). Rows 0 and nx-1 contribute one term per column,
/// columns 0 and ny-1 one term per row, so a corner enters twice, once per
/// edge, against its diagonal interior neighbour.
ad::Var edge_penalty(ad::Tape &tape, ad::Var H);

double smoothness_penalty(const Field2D &H);
double edge_penalty(const Field2D &H);

struct IterationRecord {
  std::size_t iteration = 0;
  double data = 0.0;
  double smooth = 0.0;
  double edge = 0.0;
  double objective = 0.0;
  std::size_t clamped = 0;
};

struct InverseResult {
  Field2D H_best;   // snapshot at the minimum data term
  Field2D H_final;  // after the last update
  double best_data = 0.0;
  std::size_t best_iteration = 0;
  std::vector<IterationRecord> log;
  std::optional<std::string> abort_reason;
};

/// Called with (iteration, H) before the update of that iteration, and once
/// more with (iterations, H_final).
using SnapshotFn = std::function<void(std::size_t, const Field2D &)>;

/// Gradient descent on H with frozen parameters. `h_start` replaces the flat
/// initialisation when given.
InverseResult infer_topography(const std::vector<Sequence> &dataset, const FinnParams &params,
                               const InverseConfig &cfg, const std::optional<Field2D> &h_start = std::nullopt,
                               std::ostream *log = nullptr, const SnapshotFn &snapshot = {});

/// Objective value and gradient for a fixed set of sequences.
struct InverseObjective {
  IterationRecord terms;
  Field2D grad;
};

InverseObjective inverse_objective(const std::vector<Sequence> &dataset, std::span<const std::size_t> batch,
                                   const FinnParams &params, const Field2D &H, const InverseConfig &cfg);

enum class RecMode { Full, Inner };

/// RMSE in metres. Inner drops 2 cells on each side.
double reconstruction_error(const Field2D &inferred, const Field2D &truth, RecMode mode);

/// `iter=<n> data=<v> smooth=<v> edge=<v>`
std::string iteration_log_line(const IterationRecord &rec);

} // namespace swefinn
