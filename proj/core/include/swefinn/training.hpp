#pragma once

#include "swefinn/array2d.hpp"
#include "swefinn/finn.hpp"
#include "swefinn/optim.hpp"
#include "swefinn/scenario.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace swefinn {

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 8;
  double learning_rate = 1.0e-3;
  OptimizerKind optimizer = OptimizerKind::Adam;
  /// Rollout length used in the loss; 0 means the full sequence.
  std::size_t train_window_T = 0;
  std::uint64_t seed = 0;
  /// Global-norm gradient clip; 0 disables it.
  double clip_norm = 1.0;
  std::size_t hidden_width = 13;
  /// Best-so-far checkpoint is rewritten whenever the epoch loss improves.
  std::filesystem::path checkpoint_path;
  /// Additionally write `<checkpoint_path>.epoch<n>` every n epochs (0: never).
  std::size_t checkpoint_every = 0;
  std::size_t threads = 1;

  void validate() const;
};

/// Loss of one sequence and its gradient with respect to the parameters
/// and/or H. Parameter gradients are flattened in FinnParams::flatten order.
struct SequenceGradient {
  double loss = 0.0;
  std::vector<double> params;
  Field2D H;
};

SequenceGradient sequence_gradient(const FinnParams &params, const Sequence &seq, const Field2D &H,
                                   std::size_t window_T, bool wrt_params, bool wrt_H);

/// Frames used for a window of `window_T` steps (0 = all).
std::size_t effective_window(const Sequence &seq, std::size_t window_T);

/// Runs `fn(k)` for k in [0, n) on up to `threads` workers. Exceptions are
/// rethrown for the smallest failing k.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)> &fn);

/// Deterministic Fisher-Yates permutation of [0, n).
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

struct TrainResult {
  FinnParams params;       // after the last completed epoch
  FinnParams best_params;  // lowest epoch loss
  double best_loss = 0.0;
  std::size_t best_epoch = 0;
  std::vector<double> epoch_losses;
  /// Set when training stopped on a non-finite loss or unstable rollout.
  std::optional<std::string> abort_reason;
};

/// `init` replaces the seeded initialisation when given.
TrainResult train(const std::vector<Sequence> &dataset, const TrainConfig &cfg,
                  const std::optional<FinnParams> &init = std::nullopt, std::ostream *log = nullptr);

/// Batch-averaged forward-only MSE. With `provided_H` every sequence is
/// rolled out on that field instead of its own.
double evaluate(const std::vector<Sequence> &dataset, const FinnParams &params,
                const Field2D *provided_H = nullptr, std::size_t batch_size = 8,
                std::size_t window_T = 0, std::size_t threads = 1);

/// `epoch=<n> loss=<value>`
std::string epoch_log_line(std::size_t epoch, double loss);

} // namespace swefinn
