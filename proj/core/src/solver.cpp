#include "swefinn/solver.hpp"

#include "swefinn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace swefinn {

void Grid::validate() const {
  if (nx < 4 || ny < 4) {
    throw ConfigError("grid must be at least 4x4, got " + shape_string(nx, ny));
  }
  if (!(side_length_m > 0.0) || !std::isfinite(side_length_m)) {
    throw ConfigError("grid side length must be positive and finite");
  }
}

void Grid::check_field(const Field2D &f, const char *name) const {
  if (f.rows() != nx || f.cols() != ny) {
    throw ShapeError(std::string(name) + " has shape " + f.shape_string() + ", grid is " +
                     shape_string(nx, ny));
  }
}

void SimConfig::validate() const {
  grid.validate();
  if (!(g_m_s2 > 0.0)) throw ConfigError("gravity must be positive");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  if (dt_s && !(*dt_s > 0.0)) throw ConfigError("dt override must be positive");
  if (steps && *steps < 1) throw ConfigError("steps must be >= 1");
  if (!(duration_s > 0.0)) throw ConfigError("duration must be positive");
}

double cfl_time_step(const SimConfig &cfg, double max_depth_m) {
  if (!(max_depth_m > 0.0)) throw DomainError("maximum depth must be positive");
  return cfg.cfl * std::min(cfg.grid.dx(), cfg.grid.dy()) / std::sqrt(cfg.g_m_s2 * max_depth_m);
}

Integration resolve_integration(const SimConfig &cfg, const Field2D &H) {
  cfg.validate();
  Integration out;
  if (cfg.dt_s) {
    out.dt_s = *cfg.dt_s;
  } else {
    const auto [lo, hi] = std::minmax_element(H.values().begin(), H.values().end());
    if (H.empty() || !(*lo > 0.0)) throw DomainError("topography must be strictly positive");
    out.dt_s = cfl_time_step(cfg, *hi);
  }
  out.steps = cfg.steps ? *cfg.steps
                        : static_cast<std::size_t>(std::max(1.0, std::round(cfg.duration_s / out.dt_s)));
  return out;
}

std::pair<Field2D, Field2D> apply_no_slip(Field2D u, Field2D v) {
  if (!u.same_shape(v)) {
    throw ShapeError("no-slip: u " + u.shape_string() + " and v " + v.shape_string() + " differ");
  }
  const std::size_t nx = u.rows(), ny = u.cols();
  for (Field2D *f : {&u, &v}) {
    for (std::size_t j = 0; j < ny; ++j) {
      (*f)(0, j) = 0.0;
      (*f)(nx - 1, j) = 0.0;
    }
    for (std::size_t i = 0; i < nx; ++i) {
      (*f)(i, 0) = 0.0;
      (*f)(i, ny - 1) = 0.0;
    }
  }
  return {std::move(u), std::move(v)};
}

InterfaceFluxes apply_wall_eta(InterfaceFluxes fluxes, const Grid &grid) {
  const std::size_t nx = grid.nx, ny = grid.ny;
  if (fluxes.fx.rows() != nx + 1 || fluxes.fx.cols() != ny) {
    throw ShapeError("wall closure: x fluxes " + fluxes.fx.shape_string() + ", expected " +
                     shape_string(nx + 1, ny));
  }
  if (fluxes.fy.rows() != nx || fluxes.fy.cols() != ny + 1) {
    throw ShapeError("wall closure: y fluxes " + fluxes.fy.shape_string() + ", expected " +
                     shape_string(nx, ny + 1));
  }
  for (std::size_t j = 0; j < ny; ++j) {
    fluxes.fx(0, j) = 0.0;
    fluxes.fx(nx, j) = 0.0;
  }
  for (std::size_t i = 0; i < nx; ++i) {
    fluxes.fy(i, 0) = 0.0;
    fluxes.fy(i, ny) = 0.0;
  }
  return fluxes;
}

std::pair<Field2D, Field2D> momentum_step(const Field2D &eta, const Field2D &u, const Field2D &v,
                                          const SimConfig &cfg, double dt_s) {
  const Grid &grid = cfg.grid;
  grid.check_field(eta, "eta");
  grid.check_field(u, "u");
  grid.check_field(v, "v");
  const double g = cfg.g_m_s2;
  const double two_dx = 2.0 * grid.dx();
  const double two_dy = 2.0 * grid.dy();
  Field2D un = u;
  Field2D vn = v;
  for (std::size_t i = 1; i + 1 < grid.nx; ++i) {
    for (std::size_t j = 1; j + 1 < grid.ny; ++j) {
      const double deta_dx = (eta(i + 1, j) - eta(i - 1, j)) / two_dx;
      const double deta_dy = (eta(i, j + 1) - eta(i, j - 1)) / two_dy;
      un(i, j) = u(i, j) + dt_s * (-g * deta_dx);
      vn(i, j) = v(i, j) + dt_s * (-g * deta_dy);
    }
  }
  return apply_no_slip(std::move(un), std::move(vn));
}

InterfaceFluxes continuity_fluxes(const Field2D &eta, const Field2D &u, const Field2D &v,
                                  const Field2D &H, const Grid &grid) {
  grid.check_field(eta, "eta");
  grid.check_field(u, "u");
  grid.check_field(v, "v");
  grid.check_field(H, "H");
  const std::size_t nx = grid.nx, ny = grid.ny;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      if (!(H(i, j) + eta(i, j) > 0.0)) {
        throw DryingError("water column H + eta <= 0 at cell (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")");
      }
    }
  }
  InterfaceFluxes f{Array2D(nx + 1, ny), Array2D(nx, ny + 1)};
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const double ubar = 0.5 * (u(i, j) + u(i + 1, j));
      const double depth = 0.5 * (H(i, j) + H(i + 1, j)) + 0.5 * (eta(i, j) + eta(i + 1, j));
      f.fx(i + 1, j) = ubar * depth;
    }
  }
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      const double vbar = 0.5 * (v(i, j) + v(i, j + 1));
      const double depth = 0.5 * (H(i, j) + H(i, j + 1)) + 0.5 * (eta(i, j) + eta(i, j + 1));
      f.fy(i, j + 1) = vbar * depth;
    }
  }
  return apply_wall_eta(std::move(f), grid);
}

Field2D continuity_step(const Field2D &eta, const Field2D &u, const Field2D &v, const Field2D &H,
                        const SimConfig &cfg, double dt_s) {
  const Grid &grid = cfg.grid;
  const InterfaceFluxes f = continuity_fluxes(eta, u, v, H, grid);
  const double dx = grid.dx(), dy = grid.dy();
  Field2D next(grid.nx, grid.ny);
  for (std::size_t i = 0; i < grid.nx; ++i) {
    for (std::size_t j = 0; j < grid.ny; ++j) {
      const double div = (f.fx(i + 1, j) - f.fx(i, j)) / dx + (f.fy(i, j + 1) - f.fy(i, j)) / dy;
      next(i, j) = eta(i, j) - dt_s * div;
    }
  }
  return next;
}

Rollout reference_rollout(const Field2D &eta0, const Field2D &H, const SimConfig &cfg) {
  cfg.grid.check_field(eta0, "eta0");
  cfg.grid.check_field(H, "H");
  Rollout out;
  out.integration = resolve_integration(cfg, H);
  const double dt = out.integration.dt_s;
  const std::size_t steps = out.integration.steps;
  out.eta.reserve(steps + 1);
  out.u.reserve(steps + 1);
  out.v.reserve(steps + 1);
  out.eta.push_back(eta0);
  out.u.push_back(cfg.grid.zeros());
  out.v.push_back(cfg.grid.zeros());
  for (std::size_t t = 0; t < steps; ++t) {
    auto [un, vn] = momentum_step(out.eta[t], out.u[t], out.v[t], cfg, dt);
    Field2D en = continuity_step(out.eta[t], un, vn, H, cfg, dt);
    const double peak = max_abs(en);
    if (!en.all_finite() || !(peak <= kBlowUpThresholdM)) {
      throw InstabilityError("reference rollout blew up at step " + std::to_string(t + 1) +
                             " (max |eta| = " + std::to_string(peak) + ")");
    }
    out.eta.push_back(std::move(en));
    out.u.push_back(std::move(un));
    out.v.push_back(std::move(vn));
  }
  return out;
}

double field_sum(const Field2D &f) {
  double s = 0.0;
  for (double x : f.values()) s += x;
  return s;
}

double field_abs_sum(const Field2D &f) {
  double s = 0.0;
  for (double x : f.values()) s += std::abs(x);
  return s;
}

double max_abs(const Field2D &f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

} // namespace swefinn
