#pragma once

#include <functional>
#include <string>
#include <vector>

#include "phasekit/diagnostics.hpp"
#include "phasekit/error.hpp"
#include "phasekit/state.hpp"

namespace phasekit {

/// One period of the reference profile: v_minus on [0, theta), v_plus on [theta, 1), joined by
/// quintic smoothstep ramps of width delta (in profile units) centred on both jumps.
struct TwoValueProfile {
  double v_minus = 1.0;
  double v_plus = 1.0;
  double theta = 0.5;
  double delta = 0.1;

  double operator()(double y) const;
  void validate() const;
};

/// u0(x) = mean + sum_m sin_amp[m-1] sin(2 pi m x) + cos_amp[m-1] cos(2 pi m x).
struct VelocityProfile {
  double mean = 0.0;
  std::vector<double> sin_amp;
  std::vector<double> cos_amp;

  double operator()(double x) const;
};

/// rho(x) = profile(n x mod 1). Throws DomainError when delta / n < 4h or the values leave
/// [lower, upper].
GridField make_oscillating_initial(const TwoValueProfile& profile, int n, const PeriodicGrid& grid,
                                   double lower, double upper);

GridField make_velocity(const VelocityProfile& profile, const PeriodicGrid& grid);

/// min(dt, cfl h / (max|u| + max sqrt(Pt'(rho)))).
double stable_dt(const FluidState& state, const PhysicalParams& params, const SolverConfig& config);

/// Advances by exactly dt (callers pick dt <= stable_dt). Heun predictor-corrector for the
/// explicit terms, Crank-Nicolson viscosity. Throws BoundsError on guard-rail violation or NaN.
FluidState nsk_step(const FluidState& state, const PhysicalParams& params, const SolverConfig& config,
                    double dt);

/// One step of size stable_dt.
FluidState nsk_step(const FluidState& state, const PhysicalParams& params, const SolverConfig& config);

struct NskTrajectory {
  explicit NskTrajectory(FluidState initial) : final_state(std::move(initial)) {}

  std::vector<FluidState> snapshots;
  std::vector<DiagnosticsRecord> records;
  /// Step sizes; records[k+1] follows records[k] after steps[k].
  std::vector<double> steps;
  FluidState final_state;
  ExitCode status = ExitCode::ok;
  std::string failure;

  bool ok() const noexcept { return status == ExitCode::ok; }
};

using NskObserver = std::function<void(const FluidState&)>;

/// Integrates to config.t_end, recording diagnostics after every step. A guard-rail or NaN
/// failure stops the run and is reported through status/failure with the partial series kept.
/// Throws AdmissibilityError when Pt is not monotone on [lower, upper].
NskTrajectory nsk_run(const FluidState& initial, const PhysicalParams& params, const SolverConfig& config,
                      const NskObserver& observer = {});

/// Throws AdmissibilityError unless check_admissibility passes on the guard-rail interval.
void require_admissible(const EquationOfState& eos, double lower, double upper);

}  // namespace phasekit
