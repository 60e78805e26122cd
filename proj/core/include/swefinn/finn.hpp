#pragma once

// Finite-volume neural surrogate for the shallow-water system.
//
// Four stencil MLPs (2 -> hidden -> 1, tanh hidden, linear output) read pairs
// of adjacent cells. The momentum networks produce one value per interface;
// the cell-centred velocity tendency is the difference of the two flanking
// interface values over the cell width, with zero on the domain border. The
// continuity networks reconstruct the interface surface height; the interface
// flux is mean(u) * (mean(H) + eta_interface), closed at the walls, and the
// surface tendency is minus its finite-difference divergence. Border velocity
// and wall closure live outside the learned part, so no-slip and mass
// conservation hold for any parameters.

#include "swefinn/array2d.hpp"
#include "swefinn/autodiff.hpp"
#include "swefinn/grid.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace swefinn {

struct StencilMlp {
  Array2D w1;  // 2 x hidden
  Array2D b1;  // 1 x hidden
  Array2D w2;  // hidden x 1
  Array2D b2;  // 1 x 1

  static StencilMlp zeros(std::size_t hidden_width);
  /// f(a, b) ~= slope * (a + b) from three tanh units whose cubic and
  /// quintic terms cancel; residual relative error is about 1.94 (eps (a+b))^6.
  static StencilMlp linear_sum(std::size_t hidden_width, double slope, double eps);
};

struct FinnParams {
  std::size_t hidden_width = 13;
  StencilMlp velo_x;
  StencilMlp velo_y;
  StencilMlp eta_x;
  StencilMlp eta_y;

  static std::size_t count_for(std::size_t hidden_width) { return 4 * (4 * hidden_width + 1); }
  std::size_t param_count() const { return count_for(hidden_width); }

  static FinnParams zeros(std::size_t hidden_width);
  /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
  static FinnParams init(std::size_t hidden_width, std::uint64_t seed);
  /// Closed-form weights reproducing the reference solver: momentum
  /// interface value -g (a+b)/2, continuity interface height (a+b)/2.
  static FinnParams oracle(std::size_t hidden_width, double g, double eps = 1.0e-3);

  /// Order: velo_x, velo_y, eta_x, eta_y; each w1, b1, w2, b2 row-major.
  std::vector<double> flatten() const;
  static FinnParams unflatten(std::size_t hidden_width, std::span<const double> values);

  std::array<const Array2D *, 16> tensors() const;
  std::array<Array2D *, 16> tensors();
  bool bit_equal(const FinnParams &other) const;
};

struct MlpVars {
  ad::Var w1, b1, w2, b2;
};

struct FinnVars {
  MlpVars velo_x, velo_y, eta_x, eta_y;
  std::array<ad::Var, 16> all() const;
};

/// Put the parameters on the tape as variables (trainable) or constants.
FinnVars bind_params(ad::Tape &tape, const FinnParams &params, bool trainable);

/// pairs (N x 2) -> N x 1
ad::Var stencil_mlp(ad::Tape &tape, const MlpVars &mlp, ad::Var pairs);

struct VelocityTendency {
  ad::Var du_dt;
  ad::Var dv_dt;
};

VelocityTendency finn_velo(ad::Tape &tape, ad::Var eta, const FinnVars &params, const Grid &grid);

ad::Var finn_eta(ad::Tape &tape, ad::Var eta, ad::Var u, ad::Var v, ad::Var H,
                 const FinnVars &params, const Grid &grid);

/// Interface means of H, computed once per rollout.
struct InterfaceDepth {
  ad::Var hx;  // (nx-1) x ny
  ad::Var hy;  // nx x (ny-1)
};

InterfaceDepth interface_depth(ad::Tape &tape, ad::Var H, const Grid &grid);

ad::Var finn_eta(ad::Tape &tape, ad::Var eta, ad::Var u, ad::Var v, const InterfaceDepth &depth,
                 const FinnVars &params, const Grid &grid);

struct RolloutState {
  ad::Var eta;
  ad::Var u;
  ad::Var v;
  std::size_t t = 0;
};

/// One Euler step: velocities from FINN_velo(eta_t), then eta from
/// FINN_eta(eta_t, u_{t+1}, v_{t+1}).
RolloutState finn_step(ad::Tape &tape, const RolloutState &state, const InterfaceDepth &depth,
                       const FinnVars &params, const Grid &grid, double dt_s);

/// Closed-loop rollout from rest. Returns steps + 1 frames, frame 0 = eta0.
std::vector<ad::Var> finn_rollout(ad::Tape &tape, ad::Var eta0, ad::Var H, const FinnVars &params,
                                  const Grid &grid, double dt_s, std::size_t steps);

/// Mean squared error over frames 1..T and all cells.
ad::Var sequence_loss(ad::Tape &tape, std::span<const ad::Var> predicted,
                      std::span<const Field2D> data);

/// Forward-only rollout (one short-lived tape per step).
struct FinnPrediction {
  std::vector<Field2D> eta;
  std::vector<Field2D> u;
  std::vector<Field2D> v;
};

FinnPrediction finn_predict(const FinnParams &params, const Field2D &eta0, const Field2D &H,
                            const Grid &grid, double dt_s, std::size_t steps);

/// Forward-only sequence MSE against data frames 0..steps.
double finn_sequence_mse(const FinnParams &params, std::span<const Field2D> data,
                         const Field2D &H, const Grid &grid, double dt_s);

} // namespace swefinn
