#pragma once

// Finite-volume building blocks shared by the NSK and BN steppers.

#include <vector>

#include "phasekit/state.hpp"

namespace phasekit::scheme {

/// Face fluxes F_{i+1/2} of rho u: central average minus s |u_face| (rho_{i+1} - rho_i).
std::vector<double> mass_flux(const GridField& rho, const GridField& u, double upwind);

/// -(F_{i+1/2} - F_{i-1/2}) / h.
GridField flux_divergence(const std::vector<double>& flux, const PeriodicGrid& grid);

GridField continuity_rhs(const GridField& rho, const GridField& u, double upwind);

/// Explicit momentum tendency -d(F u_face) - d(pressure) + gamma rho d(target), central stencils.
GridField momentum_explicit(const GridField& rho, const GridField& u, const GridField& pressure,
                            const GridField& target, double gamma, double upwind);

/// Solves (rho - mu dt/2 D2) u = rhs with the three-point Laplacian D2.
GridField viscous_solve(const GridField& rho, const GridField& rhs, double mu, double dt);

/// Throws BoundsError when rho leaves [lower, upper] or is not finite.
void check_bounds(const GridField& rho, double lower, double upper, const char* what, double t);

/// Throws BoundsError on any non-finite entry.
void check_finite(const GridField& f, const char* what, double t);

}  // namespace phasekit::scheme
