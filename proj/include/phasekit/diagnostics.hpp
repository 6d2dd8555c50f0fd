#pragma once

#include <optional>
#include <vector>

#include "phasekit/state.hpp"

namespace phasekit {

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double momentum = 0.0;
  double energy = 0.0;
  double dissipation = 0.0;
  double bd_entropy = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double sigma_grad_l2 = 0.0;
  double c_h2 = 0.0;
  double inv_sqrt_rho_grad = 0.0;
  /// max |dc/dx|; kept in memory for the entropy envelope, not written to CSV.
  double c_grad_max = 0.0;
};

// Energy-type functionals default to the central backend used by the solver.
double energy(const FluidState& s, const PhysicalParams& p, Backend b = Backend::central);
double dissipation(const FluidState& s, const PhysicalParams& p, Backend b = Backend::central);
double bd_entropy(const FluidState& s, const PhysicalParams& p, Backend b = Backend::central);

/// Mixture versions: kinetic energy of the mixture, sum of alpha W(rho) over the phases.
double energy(const BNState& s, const PhysicalParams& p, Backend b = Backend::central);
double dissipation(const BNState& s, const PhysicalParams& p, Backend b = Backend::central);

/// Sigma = mu u_x - Pt(rho).
GridField effective_viscous_flux(const FluidState& s, const PhysicalParams& p, Backend b = Backend::central);
/// Sigma = mu u_x - Pbar.
GridField effective_viscous_flux(const BNState& s, const PhysicalParams& p, Backend b = Backend::central);

DiagnosticsRecord diagnose(const FluidState& s, const PhysicalParams& p);
DiagnosticsRecord diagnose(const BNState& s, const PhysicalParams& p);

/// Nodal max of |rho (d phi(rho))^2 - 4 mu^2 (d rho^{-1/2})^2| with phi(r) = mu (1 - 1/r),
/// both sides differentiated independently.
double bd_identity_gap(const GridField& rho, double mu, Backend b = Backend::spectral);

struct BalanceTolerances {
  double mass = 1e-12;
  double momentum = 1e-12;
  /// Relative to |E(0)|.
  double energy = 0.01;
};

struct BalanceReport {
  double mass_drift = 0.0;
  double momentum_drift = 0.0;
  /// max_k |E(t_k) - E(0) + int_0^{t_k} D| with trapezoid time quadrature.
  double energy_residual = 0.0;
  double energy_residual_final = 0.0;
  double energy0 = 0.0;
  double max_bd_entropy = 0.0;
  /// int ||d Sigma||^2 dt.
  double sigma_grad_l2l2 = 0.0;
  /// Largest eta(t) / envelope(t); present when gamma was supplied.
  std::optional<double> envelope_ratio;
  bool mass_ok = false;
  bool momentum_ok = false;
  bool energy_ok = false;
  bool envelope_ok = true;
  bool passed = false;
};

/// Requires at least two records. When gamma is given, also checks
/// eta(t) <= (eta(0) + mass/2) exp(4 gamma sup|c_x| t) using the records' c_grad_max.
BalanceReport balance_check(const std::vector<DiagnosticsRecord>& records,
                            const BalanceTolerances& tol = {},
                            std::optional<double> gamma = std::nullopt);

}  // namespace phasekit
