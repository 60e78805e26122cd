#pragma once

// Reference shallow-water integrator on a collocated grid.
//
//   du/dt = -g d(eta)/dx,  dv/dt = -g d(eta)/dy          (linear momentum)
//   d(eta)/dt + d/dx[u (H + eta)] + d/dy[v (H + eta)] = 0 (nonlinear continuity)
//
// Momentum uses centred differences at interior cells followed by no-slip
// borders. Continuity builds interface fluxes from arithmetic means of the
// two adjacent cells and closes the outermost interfaces (walls), so the cell
// sum of eta is conserved. Time integration is explicit Euler, velocities
// first, then eta from the updated velocities.

#include "swefinn/array2d.hpp"
#include "swefinn/grid.hpp"

#include <utility>
#include <vector>

namespace swefinn {

/// Zero the outermost rows and columns of u and v.
std::pair<Field2D, Field2D> apply_no_slip(Field2D u, Field2D v);

/// Interface fluxes: fx is (nx+1) x ny, fy is nx x (ny+1).
struct InterfaceFluxes {
  Array2D fx;
  Array2D fy;
};

/// Close the domain: zero every flux through an outer interface.
InterfaceFluxes apply_wall_eta(InterfaceFluxes fluxes, const Grid &grid);

std::pair<Field2D, Field2D> momentum_step(const Field2D &eta, const Field2D &u, const Field2D &v,
                                          const SimConfig &cfg, double dt_s);

/// Throws DryingError when H + eta <= 0 anywhere.
Field2D continuity_step(const Field2D &eta, const Field2D &u, const Field2D &v, const Field2D &H,
                        const SimConfig &cfg, double dt_s);

/// Wall-closed interface fluxes u(H+eta), v(H+eta) used by continuity_step.
InterfaceFluxes continuity_fluxes(const Field2D &eta, const Field2D &u, const Field2D &v,
                                  const Field2D &H, const Grid &grid);

struct Rollout {
  Integration integration;
  std::vector<Field2D> eta;  // steps + 1 frames
  std::vector<Field2D> u;
  std::vector<Field2D> v;
};

/// Rollout from rest. Throws InstabilityError when |eta| exceeds the blow-up
/// threshold and DryingError when the water column vanishes.
Rollout reference_rollout(const Field2D &eta0, const Field2D &H, const SimConfig &cfg);

double field_sum(const Field2D &f);
double field_abs_sum(const Field2D &f);
double max_abs(const Field2D &f);

} // namespace swefinn
