#include "scheme.hpp"

#include <cmath>
#include <sstream>

#include "phasekit/error.hpp"

namespace phasekit::scheme {

std::vector<double> mass_flux(const GridField& rho, const GridField& u, double upwind) {
  const std::size_t n = rho.size();
  std::vector<double> flux(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const double u_face = 0.5 * (u[i] + u[j]);
    flux[i] = 0.5 * (rho[i] * u[i] + rho[j] * u[j]) - upwind * std::abs(u_face) * (rho[j] - rho[i]);
  }
  return flux;
}

GridField flux_divergence(const std::vector<double>& flux, const PeriodicGrid& grid) {
  const std::size_t n = grid.size();
  const double inv_h = 1.0 / grid.spacing();
  GridField out(grid);
  for (std::size_t i = 0; i < n; ++i) out[i] = -(flux[i] - flux[(i + n - 1) % n]) * inv_h;
  return out;
}

GridField continuity_rhs(const GridField& rho, const GridField& u, double upwind) {
  return flux_divergence(mass_flux(rho, u, upwind), rho.grid());
}

GridField momentum_explicit(const GridField& rho, const GridField& u, const GridField& pressure,
                            const GridField& target, double gamma, double upwind) {
  const std::size_t n = rho.size();
  const double inv_2h = 0.5 / rho.grid().spacing();
  auto flux = mass_flux(rho, u, upwind);
  for (std::size_t i = 0; i < n; ++i) flux[i] *= 0.5 * (u[i] + u[(i + 1) % n]);
  GridField out = flux_divergence(flux, rho.grid());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n;
    const std::size_t im = (i + n - 1) % n;
    out[i] += -(pressure[ip] - pressure[im]) * inv_2h + gamma * rho[i] * (target[ip] - target[im]) * inv_2h;
  }
  return out;
}

GridField viscous_solve(const GridField& rho, const GridField& rhs, double mu, double dt) {
  const std::size_t n = rho.size();
  const double h = rho.grid().spacing();
  const double off = -0.5 * mu * dt / (h * h);
  std::vector<double> lower(n, off), upper(n, off), diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = rho[i] - 2.0 * off;
  return GridField(rho.grid(), solve_cyclic_tridiagonal(lower, diag, upper, rhs.values()));
}

void check_finite(const GridField& f, const char* what, double t) {
  if (!f.all_finite()) {
    std::ostringstream os;
    os << what << " became non-finite near t = " << t;
    throw BoundsError(os.str());
  }
}

void check_bounds(const GridField& rho, double lower, double upper, const char* what, double t) {
  check_finite(rho, what, t);
  const double lo = rho.min();
  const double hi = rho.max();
  if (lo < lower || hi > upper) {
    std::ostringstream os;
    os << what << " left the guard rails [" << lower << ", " << upper << "] near t = " << t
       << " (min " << lo << ", max " << hi << ")";
    throw BoundsError(os.str());
  }
}

}  // namespace phasekit::scheme
