#pragma once

#include "swefinn/array2d.hpp"

#include <cstddef>
#include <optional>

namespace swefinn {

/// Square physical domain discretised into nx x ny cells. Row index i runs
/// along x, column index j along y; cell centres sit at ((i+1/2)dx, (j+1/2)dy).
struct Grid {
  std::size_t nx = 32;
  std::size_t ny = 32;
  double side_length_m = 1.0e6;

  double dx() const noexcept { return side_length_m / static_cast<double>(nx); }
  double dy() const noexcept { return side_length_m / static_cast<double>(ny); }
  double x_center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * dx(); }
  double y_center(std::size_t j) const noexcept { return (static_cast<double>(j) + 0.5) * dy(); }
  std::size_t cells() const noexcept { return nx * ny; }

  Field2D zeros() const { return Field2D(nx, ny); }
  void validate() const;
  void check_field(const Field2D &f, const char *name) const;
};

inline constexpr double kDefaultGravity = 9.81;
inline constexpr double kDefaultCfl = 0.7;
inline constexpr double kDefaultDurationS = 19.71 * 3600.0;
inline constexpr double kDefaultSigmaM = 5.0e4;
/// |eta| above this is treated as a numerical blow-up.
inline constexpr double kBlowUpThresholdM = 1.0e6;

struct SimConfig {
  Grid grid;
  double g_m_s2 = kDefaultGravity;
  double cfl = kDefaultCfl;
  std::optional<double> dt_s;          // derived from cfl when unset
  std::optional<std::size_t> steps;    // derived from duration_s when unset
  double duration_s = kDefaultDurationS;

  void validate() const;
};

/// Time step and step count actually used for a rollout.
struct Integration {
  double dt_s = 0.0;
  std::size_t steps = 0;
};

/// dt = cfl * min(dx, dy) / max sqrt(g H) unless overridden; steps =
/// round(duration / dt) unless overridden.
Integration resolve_integration(const SimConfig &cfg, const Field2D &H);

/// CFL-limited time step for a given maximum depth.
double cfl_time_step(const SimConfig &cfg, double max_depth_m);

} // namespace swefinn
