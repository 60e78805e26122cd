#include "swefinn/finn.hpp"

#include "swefinn/errors.hpp"
#include "swefinn/rng.hpp"

#include <cmath>
#include <string>

namespace swefinn {

using ad::Tape;
using ad::Var;

StencilMlp StencilMlp::zeros(std::size_t hidden_width) {
  return {Array2D(2, hidden_width), Array2D(1, hidden_width), Array2D(hidden_width, 1),
          Array2D(1, 1)};
}

StencilMlp StencilMlp::linear_sum(std::size_t hidden_width, double slope, double eps) {
  if (hidden_width < 3) throw ConfigError("closed-form stencil weights need hidden width >= 3");
  // slope * (a + b) from tanh at scales eps, 2 eps, 3 eps; the combination
  // cancels the cubic and quintic Taylor terms, leaving O(eps^6).
  StencilMlp m = zeros(hidden_width);
  const double coeff[3] = {1.5, -0.3, 1.0 / 30.0};
  for (std::size_t k = 0; k < 3; ++k) {
    const double scale = static_cast<double>(k + 1) * eps;
    m.w1(0, k) = scale;
    m.w1(1, k) = scale;
    m.w2(k, 0) = coeff[k] * slope / eps;
  }
  return m;
}

FinnParams FinnParams::zeros(std::size_t hidden_width) {
  if (hidden_width == 0) throw ConfigError("hidden width must be positive");
  FinnParams p;
  p.hidden_width = hidden_width;
  p.velo_x = StencilMlp::zeros(hidden_width);
  p.velo_y = StencilMlp::zeros(hidden_width);
  p.eta_x = StencilMlp::zeros(hidden_width);
  p.eta_y = StencilMlp::zeros(hidden_width);
  return p;
}

FinnParams FinnParams::init(std::size_t hidden_width, std::uint64_t seed) {
  FinnParams p = zeros(hidden_width);
  SplitMix64 rng(stream_seed(seed, 0xF1));
  const double bound1 = 1.0 / std::sqrt(2.0);
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden_width));
  for (StencilMlp *m : {&p.velo_x, &p.velo_y, &p.eta_x, &p.eta_y}) {
    for (double &w : m->w1.span()) w = rng.uniform(-bound1, bound1);
    for (double &b : m->b1.span()) b = rng.uniform(-bound1, bound1);
    for (double &w : m->w2.span()) w = rng.uniform(-bound2, bound2);
    for (double &b : m->b2.span()) b = rng.uniform(-bound2, bound2);
  }
  return p;
}

FinnParams FinnParams::oracle(std::size_t hidden_width, double g, double eps) {
  FinnParams p;
  p.hidden_width = hidden_width;
  p.velo_x = StencilMlp::linear_sum(hidden_width, -0.5 * g, eps);
  p.velo_y = p.velo_x;
  p.eta_x = StencilMlp::linear_sum(hidden_width, 0.5, eps);
  p.eta_y = p.eta_x;
  return p;
}

std::array<const Array2D *, 16> FinnParams::tensors() const {
  return {&velo_x.w1, &velo_x.b1, &velo_x.w2, &velo_x.b2, &velo_y.w1, &velo_y.b1,
          &velo_y.w2, &velo_y.b2, &eta_x.w1,  &eta_x.b1,  &eta_x.w2,  &eta_x.b2,
          &eta_y.w1,  &eta_y.b1,  &eta_y.w2,  &eta_y.b2};
}

std::array<Array2D *, 16> FinnParams::tensors() {
  return {&velo_x.w1, &velo_x.b1, &velo_x.w2, &velo_x.b2, &velo_y.w1, &velo_y.b1,
          &velo_y.w2, &velo_y.b2, &eta_x.w1,  &eta_x.b1,  &eta_x.w2,  &eta_x.b2,
          &eta_y.w1,  &eta_y.b1,  &eta_y.w2,  &eta_y.b2};
}

std::vector<double> FinnParams::flatten() const {
  std::vector<double> out;
  out.reserve(param_count());
  for (const Array2D *t : tensors()) out.insert(out.end(), t->values().begin(), t->values().end());
  return out;
}

FinnParams FinnParams::unflatten(std::size_t hidden_width, std::span<const double> values) {
  FinnParams p = zeros(hidden_width);
  if (values.size() != p.param_count()) {
    throw FormatError("parameter count mismatch: got " + std::to_string(values.size()) +
                      ", architecture with hidden width " + std::to_string(hidden_width) +
                      " needs " + std::to_string(p.param_count()));
  }
  std::size_t k = 0;
  for (Array2D *t : p.tensors()) {
    for (double &x : t->span()) x = values[k++];
  }
  return p;
}

bool FinnParams::bit_equal(const FinnParams &other) const {
  if (hidden_width != other.hidden_width) return false;
  const auto a = tensors();
  const auto b = other.tensors();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!a[k]->bit_equal(*b[k])) return false;
  }
  return true;
}

std::array<Var, 16> FinnVars::all() const {
  return {velo_x.w1, velo_x.b1, velo_x.w2, velo_x.b2, velo_y.w1, velo_y.b1, velo_y.w2, velo_y.b2,
          eta_x.w1,  eta_x.b1,  eta_x.w2,  eta_x.b2,  eta_y.w1,  eta_y.b1,  eta_y.w2,  eta_y.b2};
}

FinnVars bind_params(Tape &tape, const FinnParams &params, bool trainable) {
  auto leaf = [&](const Array2D &a) { return trainable ? tape.variable(a) : tape.constant(a); };
  auto bind = [&](const StencilMlp &m) {
    return MlpVars{leaf(m.w1), leaf(m.b1), leaf(m.w2), leaf(m.b2)};
  };
  return FinnVars{bind(params.velo_x), bind(params.velo_y), bind(params.eta_x), bind(params.eta_y)};
}

Var stencil_mlp(Tape &tape, const MlpVars &mlp, Var pairs) {
  Var hidden = tape.tanh(tape.affine(pairs, mlp.w1, mlp.b1));
  return tape.affine(hidden, mlp.w2, mlp.b2);
}

namespace {

void check_grid(const Var &f, const Grid &grid, const char *name) {
  if (f.rows() != grid.nx || f.cols() != grid.ny) {
    throw ShapeError(std::string(name) + " has shape " + f.value().shape_string() + ", grid is " +
                     shape_string(grid.nx, grid.ny));
  }
}

} // namespace

VelocityTendency finn_velo(Tape &tape, Var eta, const FinnVars &params, const Grid &grid) {
  check_grid(eta, grid, "eta");
  const std::size_t nx = grid.nx, ny = grid.ny;

  Var px = tape.reshape(stencil_mlp(tape, params.velo_x, tape.stack_adjacent_x(eta)), nx - 1, ny);
  Var dx_rows = tape.scale(tape.sub(tape.slice(px, 1, nx - 1, 0, ny), tape.slice(px, 0, nx - 2, 0, ny)),
                           1.0 / grid.dx());
  Var du = tape.pad_zero(tape.slice(dx_rows, 0, nx - 2, 1, ny - 1), 1, 1, 1, 1);

  Var py = tape.reshape(stencil_mlp(tape, params.velo_y, tape.stack_adjacent_y(eta)), nx, ny - 1);
  Var dy_cols = tape.scale(tape.sub(tape.slice(py, 0, nx, 1, ny - 1), tape.slice(py, 0, nx, 0, ny - 2)),
                           1.0 / grid.dy());
  Var dv = tape.pad_zero(tape.slice(dy_cols, 1, nx - 1, 0, ny - 2), 1, 1, 1, 1);
  return {du, dv};
}

InterfaceDepth interface_depth(Tape &tape, Var H, const Grid &grid) {
  check_grid(H, grid, "H");
  const std::size_t nx = grid.nx, ny = grid.ny;
  Var hx = tape.scale(tape.add(tape.slice(H, 0, nx - 1, 0, ny), tape.slice(H, 1, nx, 0, ny)), 0.5);
  Var hy = tape.scale(tape.add(tape.slice(H, 0, nx, 0, ny - 1), tape.slice(H, 0, nx, 1, ny)), 0.5);
  return {hx, hy};
}

namespace {

void check_depth(const Array2D &depth, const char *axis) {
  for (std::size_t k = 0; k < depth.size(); ++k) {
    if (!(depth[k] > 0.0)) {
      throw DryingError(std::string("interface water column <= 0 on ") + axis +
                        " interface " + std::to_string(k / depth.cols()) + "," +
                        std::to_string(k % depth.cols()));
    }
  }
}

} // namespace

Var finn_eta(Tape &tape, Var eta, Var u, Var v, const InterfaceDepth &depth,
             const FinnVars &params, const Grid &grid) {
  check_grid(eta, grid, "eta");
  check_grid(u, grid, "u");
  check_grid(v, grid, "v");
  const std::size_t nx = grid.nx, ny = grid.ny;

  Var ex = tape.reshape(stencil_mlp(tape, params.eta_x, tape.stack_adjacent_x(eta)), nx - 1, ny);
  Var ubar = tape.scale(tape.add(tape.slice(u, 0, nx - 1, 0, ny), tape.slice(u, 1, nx, 0, ny)), 0.5);
  Var col_x = tape.add(depth.hx, ex);
  check_depth(col_x.value(), "x");
  Var fx = tape.pad_zero(tape.mul(ubar, col_x), 1, 1, 0, 0);
  Var div_x = tape.scale(tape.sub(tape.slice(fx, 1, nx + 1, 0, ny), tape.slice(fx, 0, nx, 0, ny)),
                         1.0 / grid.dx());

  Var ey = tape.reshape(stencil_mlp(tape, params.eta_y, tape.stack_adjacent_y(eta)), nx, ny - 1);
  Var vbar = tape.scale(tape.add(tape.slice(v, 0, nx, 0, ny - 1), tape.slice(v, 0, nx, 1, ny)), 0.5);
  Var col_y = tape.add(depth.hy, ey);
  check_depth(col_y.value(), "y");
  Var fy = tape.pad_zero(tape.mul(vbar, col_y), 0, 0, 1, 1);
  Var div_y = tape.scale(tape.sub(tape.slice(fy, 0, nx, 1, ny + 1), tape.slice(fy, 0, nx, 0, ny)),
                         1.0 / grid.dy());

  return tape.neg(tape.add(div_x, div_y));
}

Var finn_eta(Tape &tape, Var eta, Var u, Var v, Var H, const FinnVars &params, const Grid &grid) {
  return finn_eta(tape, eta, u, v, interface_depth(tape, H, grid), params, grid);
}

RolloutState finn_step(Tape &tape, const RolloutState &state, const InterfaceDepth &depth,
                       const FinnVars &params, const Grid &grid, double dt_s) {
  const VelocityTendency dvel = finn_velo(tape, state.eta, params, grid);
  RolloutState next;
  next.u = tape.add(state.u, tape.scale(dvel.du_dt, dt_s));
  next.v = tape.add(state.v, tape.scale(dvel.dv_dt, dt_s));
  Var deta = finn_eta(tape, state.eta, next.u, next.v, depth, params, grid);
  next.eta = tape.add(state.eta, tape.scale(deta, dt_s));
  next.t = state.t + 1;
  for (double x : next.eta.value().values()) {
    if (!(std::abs(x) <= kBlowUpThresholdM)) {
      throw InstabilityError("FINN rollout blew up at step " + std::to_string(next.t));
    }
  }
  return next;
}

std::vector<Var> finn_rollout(Tape &tape, Var eta0, Var H, const FinnVars &params, const Grid &grid,
                              double dt_s, std::size_t steps) {
  check_grid(eta0, grid, "eta0");
  const InterfaceDepth depth = interface_depth(tape, H, grid);
  RolloutState state{eta0, tape.constant(grid.zeros()), tape.constant(grid.zeros()), 0};
  std::vector<Var> frames;
  frames.reserve(steps + 1);
  frames.push_back(eta0);
  for (std::size_t t = 0; t < steps; ++t) {
    state = finn_step(tape, state, depth, params, grid, dt_s);
    frames.push_back(state.eta);
  }
  return frames;
}

Var sequence_loss(Tape &tape, std::span<const Var> predicted, std::span<const Field2D> data) {
  if (predicted.size() != data.size()) {
    throw ShapeError("sequence_loss: " + std::to_string(predicted.size()) + " predicted frames vs " +
                     std::to_string(data.size()) + " data frames");
  }
  if (predicted.size() < 2) throw ShapeError("sequence_loss: need at least one frame after the initial condition");
  Var total;
  std::size_t cells = 0;
  for (std::size_t t = 1; t < predicted.size(); ++t) {
    if (!predicted[t].value().same_shape(data[t])) {
      throw ShapeError("sequence_loss: frame " + std::to_string(t) + " shapes " +
                       predicted[t].value().shape_string() + " vs " + data[t].shape_string());
    }
    Var diff = tape.sub(predicted[t], tape.constant(data[t]));
    Var sq = tape.sum(tape.mul(diff, diff));
    total = t == 1 ? sq : tape.add(total, sq);
    cells += data[t].size();
  }
  return tape.scale(total, 1.0 / static_cast<double>(cells));
}

FinnPrediction finn_predict(const FinnParams &params, const Field2D &eta0, const Field2D &H,
                            const Grid &grid, double dt_s, std::size_t steps) {
  grid.check_field(eta0, "eta0");
  grid.check_field(H, "H");
  FinnPrediction out;
  out.eta.push_back(eta0);
  out.u.push_back(grid.zeros());
  out.v.push_back(grid.zeros());
  Tape tape;
  for (std::size_t t = 0; t < steps; ++t) {
    tape.clear();
    const FinnVars vars = bind_params(tape, params, false);
    const InterfaceDepth depth = interface_depth(tape, tape.constant(H), grid);
    RolloutState state{tape.constant(out.eta.back()), tape.constant(out.u.back()),
                       tape.constant(out.v.back()), t};
    const RolloutState next = finn_step(tape, state, depth, vars, grid, dt_s);
    out.eta.push_back(next.eta.value());
    out.u.push_back(next.u.value());
    out.v.push_back(next.v.value());
  }
  return out;
}

double finn_sequence_mse(const FinnParams &params, std::span<const Field2D> data, const Field2D &H,
                         const Grid &grid, double dt_s) {
  if (data.size() < 2) throw ShapeError("finn_sequence_mse: need at least two frames");
  const FinnPrediction pred = finn_predict(params, data[0], H, grid, dt_s, data.size() - 1);
  double total = 0.0;
  std::size_t cells = 0;
  for (std::size_t t = 1; t < data.size(); ++t) {
    if (!pred.eta[t].same_shape(data[t])) throw ShapeError("finn_sequence_mse: frame shape mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < data[t].size(); ++k) {
      const double d = pred.eta[t][k] - data[t][k];
      s += d * d;
    }
    total += s;
    cells += data[t].size();
  }
  return total * (1.0 / static_cast<double>(cells));
}

} // namespace swefinn
