#include "swefinn/inversion.hpp"

#include "swefinn/errors.hpp"
#include "swefinn/format.hpp"
#include "swefinn/optim.hpp"
#include "swefinn/rng.hpp"
#include "swefinn/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace swefinn {

void InverseConfig::validate() const {
  if (iterations < 1) throw ConfigError("infer.iterations must be >= 1");
  if (!(lambda_smooth >= 0.0)) throw ConfigError("infer.lambda_smooth must be >= 0");
  if (!(lambda_edge >= 0.0)) throw ConfigError("infer.lambda_edge must be >= 0");
  if (!(h_init_m > 0.0)) throw ConfigError("infer.h_init_m must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("infer.learning_rate must be positive");
  if (batch_size < 1) throw ConfigError("infer.batch_size must be >= 1");
  if (!(min_depth_m > 0.0)) throw ConfigError("infer.min_depth_m must be positive");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

namespace {

ad::Var squared_sum(ad::Tape &tape, ad::Var a, ad::Var b) {
  ad::Var d = tape.sub(a, b);
  return tape.sum(tape.mul(d, d));
}

void check_edge_shape(std::size_t nx, std::size_t ny) {
  if (nx < 3 || ny < 3) {
    throw ShapeError("edge penalty needs at least a 3x3 grid, got " + shape_string(nx, ny));
  }
}

std::size_t clamp_interior(std::size_t k, std::size_t n) { return std::clamp<std::size_t>(k, 1, n - 2); }

} // namespace

ad::Var smoothness_penalty(ad::Tape &tape, ad::Var H) {
  const std::size_t nx = H.rows();
  const std::size_t ny = H.cols();
  ad::Var total = tape.constant_scalar(0.0);
  if (nx >= 2) total = tape.add(total, squared_sum(tape, tape.slice(H, 1, nx, 0, ny), tape.slice(H, 0, nx - 1, 0, ny)));
  if (ny >= 2) total = tape.add(total, squared_sum(tape, tape.slice(H, 0, nx, 1, ny), tape.slice(H, 0, nx, 0, ny - 1)));
  return total;
}

ad::Var edge_penalty(ad::Tape &tape, ad::Var H) {
  const std::size_t nx = H.rows();
  const std::size_t ny = H.cols();
  check_edge_shape(nx, ny);
  ad::Var total = tape.constant_scalar(0.0);
  // rows 0 and nx-1: interior columns, then the two corners
  for (const auto [edge, inner] : {std::pair{std::size_t{0}, std::size_t{1}}, std::pair{nx - 1, nx - 2}}) {
    total = tape.add(total, squared_sum(tape, tape.slice(H, edge, edge + 1, 1, ny - 1),
                                        tape.slice(H, inner, inner + 1, 1, ny - 1)));
    total = tape.add(total, squared_sum(tape, tape.slice(H, edge, edge + 1, 0, 1), tape.slice(H, inner, inner + 1, 1, 2)));
    total = tape.add(total, squared_sum(tape, tape.slice(H, edge, edge + 1, ny - 1, ny),
                                        tape.slice(H, inner, inner + 1, ny - 2, ny - 1)));
  }
  // columns 0 and ny-1
  for (const auto [edge, inner] : {std::pair{std::size_t{0}, std::size_t{1}}, std::pair{ny - 1, ny - 2}}) {
    total = tape.add(total, squared_sum(tape, tape.slice(H, 1, nx - 1, edge, edge + 1),
                                        tape.slice(H, 1, nx - 1, inner, inner + 1)));
    total = tape.add(total, squared_sum(tape, tape.slice(H, 0, 1, edge, edge + 1), tape.slice(H, 1, 2, inner, inner + 1)));
    total = tape.add(total, squared_sum(tape, tape.slice(H, nx - 1, nx, edge, edge + 1),
                                        tape.slice(H, nx - 2, nx - 1, inner, inner + 1)));
  }
  return total;
}

double smoothness_penalty(const Field2D &H) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < H.rows(); ++i)
    for (std::size_t j = 0; j < H.cols(); ++j) s += (H(i + 1, j) - H(i, j)) * (H(i + 1, j) - H(i, j));
  for (std::size_t i = 0; i < H.rows(); ++i)
    for (std::size_t j = 0; j + 1 < H.cols(); ++j) s += (H(i, j + 1) - H(i, j)) * (H(i, j + 1) - H(i, j));
  return s;
}

double edge_penalty(const Field2D &H) {
  const std::size_t nx = H.rows();
  const std::size_t ny = H.cols();
  check_edge_shape(nx, ny);
  double s = 0.0;
  for (std::size_t j = 0; j < ny; ++j) {
    const std::size_t jj = clamp_interior(j, ny);
    s += (H(0, j) - H(1, jj)) * (H(0, j) - H(1, jj));
    s += (H(nx - 1, j) - H(nx - 2, jj)) * (H(nx - 1, j) - H(nx - 2, jj));
  }
  for (std::size_t i = 0; i < nx; ++i) {
    const std::size_t ii = clamp_interior(i, nx);
    s += (H(i, 0) - H(ii, 1)) * (H(i, 0) - H(ii, 1));
    s += (H(i, ny - 1) - H(ii, ny - 2)) * (H(i, ny - 1) - H(ii, ny - 2));
  }
  return s;
}

InverseObjective inverse_objective(const std::vector<Sequence> &dataset, std::span<const std::size_t> batch,
                                   const FinnParams &params, const Field2D &H, const InverseConfig &cfg) {
  if (batch.empty()) throw ConfigError("inversion batch is empty");
  std::vector<SequenceGradient> parts(batch.size());
  parallel_for(batch.size(), cfg.threads, [&](std::size_t k) {
    parts[k] = sequence_gradient(params, dataset.at(batch[k]), H, cfg.window_T, false, true);
  });
  InverseObjective out;
  out.grad = Field2D(H.rows(), H.cols());
  // reduce in dataset-index order so a full batch sums exactly like evaluate()
  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return batch[a] < batch[b]; });
  double data = 0.0;
  for (std::size_t k : order) {
    const SequenceGradient &p = parts[k];
    data += p.loss;
    for (std::size_t q = 0; q < H.size(); ++q) out.grad[q] += p.H[q];
  }
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  data *= inv_b;
  for (std::size_t q = 0; q < H.size(); ++q) out.grad[q] *= inv_b;

  ad::Tape tape;
  const ad::Var h = tape.variable(H);
  const ad::Var smooth = smoothness_penalty(tape, h);
  const ad::Var edge = edge_penalty(tape, h);
  const ad::Var reg = tape.add(tape.scale(smooth, cfg.lambda_smooth), tape.scale(edge, cfg.lambda_edge));
  const ad::Var wrt[] = {h};
  const ad::Grads g = tape.backward(reg, wrt);
  const Array2D &rg = g.at(h);
  for (std::size_t q = 0; q < H.size(); ++q) out.grad[q] += rg[q];

  out.terms.data = data;
  out.terms.smooth = smooth.value().item();
  out.terms.edge = edge.value().item();
  out.terms.objective = data + reg.value().item();
  return out;
}

std::string iteration_log_line(const IterationRecord &rec) {
  return "iter=" + std::to_string(rec.iteration) + " data=" + format_double(rec.data) +
         " smooth=" + format_double(rec.smooth) + " edge=" + format_double(rec.edge);
}

namespace {

constexpr std::uint64_t kBatchStream = 0xBA7C0000;

bool all_finite(const Field2D &f) { return f.all_finite(); }

} // namespace

InverseResult infer_topography(const std::vector<Sequence> &dataset, const FinnParams &params,
                               const InverseConfig &cfg, const std::optional<Field2D> &h_start,
                               std::ostream *log, const SnapshotFn &snapshot) {
  cfg.validate();
  if (dataset.empty()) throw ConfigError("inference dataset is empty");
  const Grid &grid = dataset.front().grid;
  Field2D H = h_start ? *h_start : Field2D(grid.nx, grid.ny, cfg.h_init_m);
  grid.check_field(H, "initial H");

  InverseResult result;
  result.H_best = H;
  Optimizer opt(OptimizerKind::Adam, H.size(), cfg.learning_rate);
  const std::size_t n = dataset.size();
  const std::size_t batch = std::min(cfg.batch_size, n);
  std::vector<std::size_t> order;
  std::size_t cursor = n;
  std::size_t epoch = 0;

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    // without-replacement batches; a fresh permutation once the current one runs out
    if (cursor + batch > n) {
      order = shuffled_indices(n, stream_seed(cfg.seed, kBatchStream + epoch++));
      cursor = 0;
    }
    const std::span<const std::size_t> members(order.data() + cursor, batch);
    cursor += batch;

    if (snapshot) snapshot(it, H);
    InverseObjective obj;
    try {
      obj = inverse_objective(dataset, members, params, H, cfg);
    } catch (const NonFiniteError &e) {
      result.abort_reason = e.what();
    } catch (const InstabilityError &e) {
      result.abort_reason = e.what();
    } catch (const DryingError &e) {
      result.abort_reason = e.what();
    }
    if (!result.abort_reason && (!std::isfinite(obj.terms.objective) || !all_finite(obj.grad))) {
      result.abort_reason = "non-finite objective at iteration " + std::to_string(it);
    }
    if (result.abort_reason) {
      if (log != nullptr) *log << "aborted: " << *result.abort_reason << '\n';
      break;
    }
    obj.terms.iteration = it;
    if (it == 0 || obj.terms.data < result.best_data) {
      result.best_data = obj.terms.data;
      result.best_iteration = it;
      result.H_best = H;
    }

    opt.step(H.span(), obj.grad.span());
    for (double &h : H.span()) {
      if (h < cfg.min_depth_m) {
        h = cfg.min_depth_m;
        ++obj.terms.clamped;
      }
    }
    if (log != nullptr) {
      *log << iteration_log_line(obj.terms);
      if (obj.terms.clamped > 0) *log << " clamped=" << obj.terms.clamped;
      *log << '\n';
    }
    result.log.push_back(obj.terms);
  }
  if (!result.abort_reason && snapshot) snapshot(cfg.iterations, H);
  result.H_final = H;
  return result;
}

double reconstruction_error(const Field2D &inferred, const Field2D &truth, RecMode mode) {
  if (!inferred.same_shape(truth)) {
    throw ShapeError("reconstruction_error: " + inferred.shape_string() + " vs " + truth.shape_string());
  }
  std::size_t strip = 0;
  if (mode == RecMode::Inner) {
    if (truth.rows() < 5 || truth.cols() < 5) {
      throw ShapeError("inner reconstruction error needs at least a 5x5 grid, got " + truth.shape_string());
    }
    strip = 2;
  }
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t i = strip; i + strip < truth.rows(); ++i) {
    for (std::size_t j = strip; j + strip < truth.cols(); ++j) {
      const double d = inferred(i, j) - truth(i, j);
      s += d * d;
      ++count;
    }
  }
  return std::sqrt(s / static_cast<double>(count));
}

} // namespace swefinn
