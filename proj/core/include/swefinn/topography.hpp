#pragma once

#include "swefinn/array2d.hpp"
#include "swefinn/grid.hpp"

#include <cstdint>
#include <string>

namespace swefinn {

enum class TopoKind : std::uint8_t { ArctanSlope = 0, Bumpy = 1 };

std::string to_string(TopoKind kind);
TopoKind topo_kind_from_string(const std::string &name);

struct TopoSpec {
  TopoKind kind = TopoKind::ArctanSlope;
  double rotation_rad = 0.0;  // phi in [0, 2 pi)
  double depth_scale = 1.0;   // beta in [0.5, 1]
  std::uint64_t seed = 0;     // bump placement (bumpy only)

  void validate() const;
};

/// Shape constants of the generators. Depths in metres.
struct TopoParams {
  double base_depth_m = 100.0;
  /// arctan profile: H1 = base + A (2/pi) atan(k xi), xi in [-1/2, 1/2]
  double arctan_amplitude_m = 28.2;
  double arctan_steepness = 4.0;
  /// bumpy field is renormalised so that beta = reference_beta spans [lo, hi]
  double bumpy_reference_beta = 0.68;
  double bumpy_min_m = 63.0;
  double bumpy_max_m = 74.0;
};

/// Smooth slope along the rotated axis. The profile coordinate is the cell
/// centre projected onto (cos phi, sin phi) about the domain centre and
/// normalised by the largest projection on the grid, so min/max/mean do not
/// depend on phi and no resampling is involved.
Field2D gen_arctan(const Grid &grid, const TopoSpec &spec, const TopoParams &params = {});

/// Seeded mixture of 4-8 Gaussian bumps on a gentle tilt, affinely
/// renormalised before depth scaling.
Field2D gen_bumpy(const Grid &grid, const TopoSpec &spec, const TopoParams &params = {});

/// Dispatch on spec.kind.
Field2D generate_topography(const Grid &grid, const TopoSpec &spec, const TopoParams &params = {});

struct TopoStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double range = 0.0;
};

TopoStats topo_metadata(const Field2D &H);

} // namespace swefinn
