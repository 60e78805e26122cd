#include "swefinn/training.hpp"

#include "swefinn/errors.hpp"
#include "swefinn/format.hpp"
#include "swefinn/io.hpp"
#include "swefinn/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

namespace swefinn {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be positive");
  if (!(clip_norm >= 0.0)) throw ConfigError("train.clip_norm must be >= 0");
  if (hidden_width < 1) throw ConfigError("finn.hidden_width must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

std::size_t effective_window(const Sequence &seq, std::size_t window_T) {
  const std::size_t T = seq.steps();
  if (T < 1) throw ShapeError("sequence has no steps after the initial condition");
  return window_T == 0 ? T : std::min(window_T, T);
}

SequenceGradient sequence_gradient(const FinnParams &params, const Sequence &seq, const Field2D &H,
                                   std::size_t window_T, bool wrt_params, bool wrt_H) {
  seq.grid.check_field(H, "H");
  const std::size_t T = effective_window(seq, window_T);
  ad::Tape tape;
  const FinnVars vars = bind_params(tape, params, wrt_params);
  const ad::Var h = wrt_H ? tape.variable(H) : tape.constant(H);
  const ad::Var eta0 = tape.constant(seq.eta[0]);
  const std::vector<ad::Var> frames = finn_rollout(tape, eta0, h, vars, seq.grid, seq.dt_s, T);
  const ad::Var loss = sequence_loss(tape, frames, std::span<const Field2D>(seq.eta.data(), T + 1));

  SequenceGradient out;
  out.loss = loss.value().item();
  std::vector<ad::Var> wrt;
  if (wrt_params) {
    const auto all = vars.all();
    wrt.assign(all.begin(), all.end());
  }
  if (wrt_H) wrt.push_back(h);
  if (wrt.empty()) return out;
  const ad::Grads grads = tape.backward(loss, wrt);
  if (wrt_params) {
    out.params.reserve(params.param_count());
    for (const ad::Var &v : vars.all()) {
      const auto span = grads.at(v).span();
      out.params.insert(out.params.end(), span.begin(), span.end());
    }
  }
  if (wrt_H) out.H = grads.at(h);
  return out;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)> &fn) {
  if (n == 0) return;
  const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), n);
  std::vector<std::exception_ptr> errors(n);
  if (workers == 1) {
    for (std::size_t k = 0; k < n; ++k) {
      try {
        fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < n; k = next++) {
          try {
            fn(k);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        }
      });
    }
    for (std::thread &t : pool) t.join();
  }
  for (const std::exception_ptr &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t k = 0; k < n; ++k) idx[k] = k;
  SplitMix64 rng(seed);
  for (std::size_t k = n; k > 1; --k) {
    const std::size_t j = static_cast<std::size_t>(rng.below(k));
    std::swap(idx[k - 1], idx[j]);
  }
  return idx;
}

std::string epoch_log_line(std::size_t epoch, double loss) {
  return "epoch=" + std::to_string(epoch) + " loss=" + format_double(loss);
}

namespace {

void check_dataset(const std::vector<Sequence> &dataset) {
  if (dataset.empty()) throw ConfigError("dataset is empty");
  const Grid &g = dataset.front().grid;
  for (std::size_t k = 0; k < dataset.size(); ++k) {
    const Sequence &s = dataset[k];
    if (s.grid.nx != g.nx || s.grid.ny != g.ny) {
      throw ShapeError("sequence " + std::to_string(k) + " grid " + shape_string(s.grid.nx, s.grid.ny) +
                       " differs from " + shape_string(g.nx, g.ny));
    }
  }
}

constexpr std::uint64_t kShuffleStream = 0x5EED0000;

} // namespace

TrainResult train(const std::vector<Sequence> &dataset, const TrainConfig &cfg,
                  const std::optional<FinnParams> &init, std::ostream *log) {
  cfg.validate();
  check_dataset(dataset);
  FinnParams params = init ? *init : FinnParams::init(cfg.hidden_width, cfg.seed);
  if (params.hidden_width != cfg.hidden_width) {
    throw ConfigError("initial parameters have hidden width " + std::to_string(params.hidden_width) +
                      " but finn.hidden_width = " + std::to_string(cfg.hidden_width));
  }
  std::vector<double> theta = params.flatten();
  Optimizer opt(cfg.optimizer, theta.size(), cfg.learning_rate);

  TrainResult result;
  result.params = params;
  result.best_params = params;
  const std::size_t n = dataset.size();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::vector<std::size_t> order = shuffled_indices(n, stream_seed(cfg.seed, kShuffleStream + epoch));
    double epoch_sum = 0.0;
    std::size_t batches = 0;
    try {
      for (std::size_t start = 0; start < n; start += cfg.batch_size) {
        const std::size_t b = std::min(cfg.batch_size, n - start);
        std::vector<SequenceGradient> parts(b);
        parallel_for(b, cfg.threads, [&](std::size_t k) {
          const Sequence &s = dataset[order[start + k]];
          parts[k] = sequence_gradient(params, s, s.H, cfg.train_window_T, true, false);
        });
        double batch_loss = 0.0;
        std::vector<double> grad(theta.size(), 0.0);
        for (const SequenceGradient &p : parts) {
          batch_loss += p.loss;
          for (std::size_t q = 0; q < grad.size(); ++q) grad[q] += p.params[q];
        }
        const double inv_b = 1.0 / static_cast<double>(b);
        batch_loss *= inv_b;
        for (double &g : grad) g *= inv_b;
        if (!std::isfinite(batch_loss) || !std::all_of(grad.begin(), grad.end(), [](double g) { return std::isfinite(g); })) {
          throw NonFiniteError("non-finite loss or gradient in epoch " + std::to_string(epoch));
        }
        clip_global_norm(grad, cfg.clip_norm);
        opt.step(theta, grad);
        params = FinnParams::unflatten(cfg.hidden_width, theta);
        epoch_sum += batch_loss;
        ++batches;
      }
    } catch (const NonFiniteError &e) {
      result.abort_reason = e.what();
    } catch (const InstabilityError &e) {
      result.abort_reason = e.what();
    } catch (const DryingError &e) {
      result.abort_reason = e.what();
    }
    if (result.abort_reason) {
      if (log != nullptr) *log << "aborted: " << *result.abort_reason << '\n';
      break;
    }

    const double epoch_loss = epoch_sum / static_cast<double>(batches);
    result.epoch_losses.push_back(epoch_loss);
    result.params = params;
    if (log != nullptr) *log << epoch_log_line(epoch, epoch_loss) << '\n' << std::flush;

    // stored with the parameters reached at the end of the epoch
    if (epoch == 0 || epoch_loss < result.best_loss) {
      result.best_loss = epoch_loss;
      result.best_epoch = epoch;
      result.best_params = params;
      if (!cfg.checkpoint_path.empty()) write_checkpoint(cfg.checkpoint_path, Checkpoint{params, std::nullopt});
    }
    if (!cfg.checkpoint_path.empty() && cfg.checkpoint_every > 0 && (epoch + 1) % cfg.checkpoint_every == 0) {
      std::filesystem::path p = cfg.checkpoint_path;
      p += ".epoch" + std::to_string(epoch + 1);
      write_checkpoint(p, Checkpoint{params, std::nullopt});
    }
  }
  return result;
}

double evaluate(const std::vector<Sequence> &dataset, const FinnParams &params, const Field2D *provided_H,
                std::size_t batch_size, std::size_t window_T, std::size_t threads) {
  check_dataset(dataset);
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (provided_H != nullptr) dataset.front().grid.check_field(*provided_H, "provided H");
  const std::size_t n = dataset.size();
  std::vector<double> losses(n);
  parallel_for(n, threads, [&](std::size_t k) {
    const Sequence &s = dataset[k];
    const Field2D &H = provided_H != nullptr ? *provided_H : s.H;
    const std::size_t T = effective_window(s, window_T);
    losses[k] = finn_sequence_mse(params, std::span<const Field2D>(s.eta.data(), T + 1), H, s.grid, s.dt_s);
  });
  double total = 0.0;
  std::size_t batches = 0;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t b = std::min(batch_size, n - start);
    double s = 0.0;
    for (std::size_t k = 0; k < b; ++k) s += losses[start + k];
    total += s * (1.0 / static_cast<double>(b));
    ++batches;
  }
  return total / static_cast<double>(batches);
}

} // namespace swefinn
