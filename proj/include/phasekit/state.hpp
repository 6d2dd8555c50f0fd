#pragma once

#include "phasekit/eos.hpp"
#include "phasekit/torus.hpp"

namespace phasekit {

/// Viscosity, capillarity and the equation of state; gamma is read from the eos.
struct PhysicalParams {
  PhysicalParams(double mu, double kappa, EquationOfState eos);

  double mu;
  double kappa;
  double gamma;
  EquationOfState eos;
};

enum class CapillarityForm {
  artificial_pressure,  // -d(Pt) + gamma rho dc
  original,             // -dP - gamma rho d(rho - c)
};

struct SchemeOptions {
  /// Diffusive flux coefficient s: flux -= s |u| (rho_{i+1} - rho_i). Zero for order studies.
  double upwind = 0.5;
  CapillarityForm capillarity = CapillarityForm::artificial_pressure;
  HelmholtzBackend helmholtz = HelmholtzBackend::fourier;
};

struct SolverConfig {
  double dt = 1e-3;
  double cfl = 0.5;
  double t_end = 0.1;
  /// Density guard rails.
  double lower = 0.0;
  double upper = 0.0;
  /// Steps between stored snapshots; 0 keeps only the first and last state.
  int snapshot_every = 0;
  /// When > 0, steps are shortened to land on multiples of snapshot_dt and snapshots are taken
  /// there instead of every snapshot_every steps.
  double snapshot_dt = 0.0;
  SchemeOptions scheme;

  void validate() const;
};

struct FluidState {
  double t = 0.0;
  GridField rho;
  GridField u;
  GridField c;
};

struct BNState {
  double t = 0.0;
  GridField alpha_p;
  GridField alpha_m;
  GridField rho_p;
  GridField rho_m;
  GridField u;
  GridField c;
};

struct MixtureFields {
  GridField rho;
  GridField p_bar;
};

/// rho = alpha_p rho_p + alpha_m rho_m and Pbar = alpha_p Pt(rho_p) + alpha_m Pt(rho_m).
MixtureFields mixture_fields(const BNState& s, const EquationOfState& eos);

/// Builds a state with c solved from rho.
FluidState make_fluid_state(double t, GridField rho, GridField u, const PhysicalParams& params,
                            HelmholtzBackend backend = HelmholtzBackend::fourier);

BNState make_bn_state(double t, GridField alpha_p, GridField rho_p, GridField rho_m, GridField u,
                      const PhysicalParams& params,
                      HelmholtzBackend backend = HelmholtzBackend::fourier);

}  // namespace phasekit
