#include "swefinn/topography.hpp"

#include "swefinn/errors.hpp"
#include "swefinn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace swefinn {

std::string to_string(TopoKind kind) {
  return kind == TopoKind::Bumpy ? "bumpy" : "arctan_slope";
}

TopoKind topo_kind_from_string(const std::string &name) {
  if (name == "arctan_slope") return TopoKind::ArctanSlope;
  if (name == "bumpy") return TopoKind::Bumpy;
  throw ConfigError("unknown topography kind '" + name + "'");
}

void TopoSpec::validate() const {
  if (!(depth_scale >= 0.5 && depth_scale <= 1.0)) {
    throw ConfigError("depth scale beta must lie in [0.5, 1.0], got " + std::to_string(depth_scale));
  }
  if (!(rotation_rad >= 0.0 && rotation_rad < 2.0 * std::numbers::pi)) {
    throw ConfigError("rotation phi must lie in [0, 2pi), got " + std::to_string(rotation_rad));
  }
}

Field2D gen_arctan(const Grid &grid, const TopoSpec &spec, const TopoParams &params) {
  grid.validate();
  spec.validate();
  const double half = 0.5 * grid.side_length_m;
  const double c = std::cos(spec.rotation_rad);
  const double s = std::sin(spec.rotation_rad);

  Field2D proj(grid.nx, grid.ny);
  double pmax = 0.0;
  for (std::size_t i = 0; i < grid.nx; ++i) {
    for (std::size_t j = 0; j < grid.ny; ++j) {
      const double p = (grid.x_center(i) - half) * c + (grid.y_center(j) - half) * s;
      proj(i, j) = p;
      pmax = std::max(pmax, std::abs(p));
    }
  }

  const double amp = params.arctan_amplitude_m * 2.0 / std::numbers::pi;
  Field2D H(grid.nx, grid.ny);
  for (std::size_t k = 0; k < H.size(); ++k) {
    const double xi = proj[k] / (2.0 * pmax);
    const double unit = params.base_depth_m + amp * std::atan(params.arctan_steepness * xi);
    H[k] = spec.depth_scale * unit;
  }
  return H;
}

Field2D gen_bumpy(const Grid &grid, const TopoSpec &spec, const TopoParams &params) {
  grid.validate();
  spec.validate();
  SplitMix64 rng(stream_seed(spec.seed, 0xB0B0));

  struct Bump {
    double x, y, amplitude, width;
  };
  const std::size_t count = 4 + rng.below(5);
  std::vector<Bump> bumps(count);
  for (Bump &b : bumps) {
    b.x = rng.uniform(0.1, 0.9);
    b.y = rng.uniform(0.1, 0.9);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    b.amplitude = sign * rng.uniform(2.0, 8.0);
    b.width = rng.uniform(0.08, 0.2);
  }
  const double tilt_x = rng.uniform(-3.0, 3.0);
  const double tilt_y = rng.uniform(-3.0, 3.0);

  const double L = grid.side_length_m;
  Field2D raw(grid.nx, grid.ny);
  for (std::size_t i = 0; i < grid.nx; ++i) {
    for (std::size_t j = 0; j < grid.ny; ++j) {
      const double x = grid.x_center(i) / L;
      const double y = grid.y_center(j) / L;
      double h = params.base_depth_m + tilt_x * (x - 0.5) + tilt_y * (y - 0.5);
      for (const Bump &b : bumps) {
        const double r2 = (x - b.x) * (x - b.x) + (y - b.y) * (y - b.y);
        h += b.amplitude * std::exp(-r2 / (2.0 * b.width * b.width));
      }
      raw(i, j) = h;
    }
  }

  const auto [lo_it, hi_it] = std::minmax_element(raw.values().begin(), raw.values().end());
  const double rlo = *lo_it, rhi = *hi_it;
  const double lo = params.bumpy_min_m / params.bumpy_reference_beta;
  const double hi = params.bumpy_max_m / params.bumpy_reference_beta;
  Field2D H(grid.nx, grid.ny);
  for (std::size_t k = 0; k < H.size(); ++k) {
    const double unit = rhi > rlo ? lo + (raw[k] - rlo) / (rhi - rlo) * (hi - lo) : 0.5 * (lo + hi);
    H[k] = spec.depth_scale * unit;
  }
  return H;
}

Field2D generate_topography(const Grid &grid, const TopoSpec &spec, const TopoParams &params) {
  return spec.kind == TopoKind::Bumpy ? gen_bumpy(grid, spec, params)
                                      : gen_arctan(grid, spec, params);
}

TopoStats topo_metadata(const Field2D &H) {
  if (H.empty()) throw ShapeError("topo_metadata: empty field");
  TopoStats st;
  st.min = H[0];
  st.max = H[0];
  double total = 0.0;
  for (double h : H.values()) {
    st.min = std::min(st.min, h);
    st.max = std::max(st.max, h);
    total += h;
  }
  st.mean = total / static_cast<double>(H.size());
  st.range = st.max - st.min;
  return st;
}

} // namespace swefinn
