#include "phasekit/nsk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "scheme.hpp"

namespace phasekit {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double smoothstep5(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

struct Forcing {
  GridField pressure;
  GridField target;
};

Forcing forcing(const GridField& rho, const GridField& c, const PhysicalParams& p, CapillarityForm form) {
  if (form == CapillarityForm::artificial_pressure) {
    return {rho.map([&](double r) { return p.eos.artificial_pressure(r); }), c};
  }
  return {rho.map([&](double r) { return p.eos.pressure(r); }), c - rho};
}

}  // namespace

double TwoValueProfile::operator()(double y) const {
  y = wrap_unit(y);
  const auto ramp = [this](double z) { return smoothstep5(z / delta + 0.5); };
  const double indicator = ramp(y - theta) - ramp(y - 1.0) + (1.0 - ramp(y));
  return v_minus + (v_plus - v_minus) * indicator;
}

void TwoValueProfile::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("profile fraction theta must lie in (0, 1)");
  if (!(delta > 0.0) || delta >= std::min(theta, 1.0 - theta)) {
    throw DomainError("profile smoothing delta must be > 0 and below min(theta, 1 - theta)");
  }
  if (!(v_minus > 0.0 && v_plus > 0.0)) throw DomainError("profile values must be > 0");
}

double VelocityProfile::operator()(double x) const {
  double v = mean;
  for (std::size_t m = 0; m < sin_amp.size(); ++m) v += sin_amp[m] * std::sin(two_pi * (m + 1) * x);
  for (std::size_t m = 0; m < cos_amp.size(); ++m) v += cos_amp[m] * std::cos(two_pi * (m + 1) * x);
  return v;
}

GridField make_oscillating_initial(const TwoValueProfile& profile, int n, const PeriodicGrid& grid,
                                   double lower, double upper) {
  profile.validate();
  if (n < 1) throw DomainError("oscillation count n must be >= 1");
  if (profile.delta / n < 4.0 * grid.spacing()) {
    std::ostringstream os;
    os << "transition width delta/n = " << profile.delta / n << " is below 4h = " << 4.0 * grid.spacing();
    throw DomainError(os.str());
  }
  for (double v : {profile.v_minus, profile.v_plus}) {
    if (v < lower || v > upper) throw DomainError("profile values outside the guard rails");
  }
  return GridField::from_function(grid, [&](double x) { return profile(static_cast<double>(n) * x); });
}

GridField make_velocity(const VelocityProfile& profile, const PeriodicGrid& grid) {
  return GridField::from_function(grid, [&](double x) { return profile(x); });
}

void require_admissible(const EquationOfState& eos, double lower, double upper) {
  const auto report = check_admissibility(eos, std::max(0.0, lower), std::min(upper, eos.domain_max()));
  if (!report.admissible) {
    std::ostringstream os;
    os << "artificial pressure is not monotone on [" << lower << ", " << upper << "] for " << eos.name()
       << " (min slope " << report.min_artificial_slope << ")";
    throw AdmissibilityError(os.str());
  }
}

double stable_dt(const FluidState& state, const PhysicalParams& params, const SolverConfig& config) {
  double speed = 0.0;
  for (std::size_t i = 0; i < state.rho.size(); ++i) {
    const double slope = std::max(0.0, params.eos.d_artificial_pressure(state.rho[i]));
    speed = std::max(speed, std::abs(state.u[i]) + std::sqrt(slope));
  }
  const double h = state.rho.grid().spacing();
  return speed > 0.0 ? std::min(config.dt, config.cfl * h / speed) : config.dt;
}

FluidState nsk_step(const FluidState& state, const PhysicalParams& params, const SolverConfig& config,
                    double dt) {
  const auto& opt = config.scheme;
  const double t_new = state.t + dt;
  const auto& rho0 = state.rho;
  const auto& u0 = state.u;

  const GridField momentum0 = hadamard(rho0, u0);
  const GridField visc0 = derivative(u0, 2, Backend::central) * (0.5 * params.mu * dt);
  const GridField r0 = scheme::continuity_rhs(rho0, u0, opt.upwind);
  const Forcing f0 = forcing(rho0, state.c, params, opt.capillarity);
  const GridField e0 = scheme::momentum_explicit(rho0, u0, f0.pressure, f0.target, params.gamma, opt.upwind);

  GridField rho1 = rho0 + dt * r0;
  scheme::check_bounds(rho1, config.lower, config.upper, "density", t_new);
  GridField c1 = helmholtz_solve(rho1, params.kappa, params.gamma, opt.helmholtz);
  GridField u1 = scheme::viscous_solve(rho1, momentum0 + dt * e0 + visc0, params.mu, dt);
  scheme::check_finite(u1, "velocity", t_new);

  const GridField r1 = scheme::continuity_rhs(rho1, u1, opt.upwind);
  const Forcing f1 = forcing(rho1, c1, params, opt.capillarity);
  const GridField e1 = scheme::momentum_explicit(rho1, u1, f1.pressure, f1.target, params.gamma, opt.upwind);

  GridField rho2 = rho0 + (0.5 * dt) * (r0 + r1);
  scheme::check_bounds(rho2, config.lower, config.upper, "density", t_new);
  GridField c2 = helmholtz_solve(rho2, params.kappa, params.gamma, opt.helmholtz);
  GridField u2 = scheme::viscous_solve(rho2, momentum0 + (0.5 * dt) * (e0 + e1) + visc0, params.mu, dt);
  scheme::check_finite(u2, "velocity", t_new);
  return FluidState{t_new, std::move(rho2), std::move(u2), std::move(c2)};
}

FluidState nsk_step(const FluidState& state, const PhysicalParams& params, const SolverConfig& config) {
  return nsk_step(state, params, config, stable_dt(state, params, config));
}

NskTrajectory nsk_run(const FluidState& initial, const PhysicalParams& params, const SolverConfig& config,
                      const NskObserver& observer) {
  config.validate();
  if (!(config.upper < params.eos.domain_max())) {
    throw DomainError("upper guard rail must stay below the eos domain limit");
  }
  require_admissible(params.eos, config.lower, config.upper);

  NskTrajectory traj(initial);
  try {
    scheme::check_bounds(initial.rho, config.lower, config.upper, "initial density", initial.t);
  } catch (const BoundsError& e) {
    traj.status = e.code();
    traj.failure = e.what();
    return traj;
  }

  FluidState state = initial;
  traj.records.push_back(diagnose(state, params));
  traj.snapshots.push_back(state);
  if (observer) observer(state);

  const double t_end = config.t_end;
  const double eps = 1e-12 * t_end;
  long next_snap = config.snapshot_dt > 0.0 ? std::lround(std::floor(state.t / config.snapshot_dt + 1e-9)) + 1 : 0;
  long step = 0;
  try {
    while (state.t < t_end - eps) {
      double dt = stable_dt(state, params, config);
      double t_target = t_end;
      bool land_snapshot = false;
      if (config.snapshot_dt > 0.0) {
        const double t_snap = next_snap * config.snapshot_dt;
        if (t_snap < t_end - eps) {
          t_target = t_snap;
          land_snapshot = true;
        }
      }
      bool landed = false;
      if (state.t + dt >= t_target - eps) {
        dt = t_target - state.t;
        landed = true;
      }
      state = nsk_step(state, params, config, dt);
      if (landed) state.t = t_target;
      ++step;
      traj.steps.push_back(dt);
      traj.records.push_back(diagnose(state, params));
      if (observer) observer(state);

      const bool at_end = state.t >= t_end - eps;
      bool take = false;
      if (config.snapshot_dt > 0.0) {
        if (landed && land_snapshot) {
          take = true;
          ++next_snap;
        }
      } else if (config.snapshot_every > 0) {
        take = step % config.snapshot_every == 0;
      }
      if (take || at_end) traj.snapshots.push_back(state);
    }
  } catch (const BoundsError& e) {
    traj.status = e.code();
    traj.failure = e.what();
  } catch (const DomainError& e) {
    traj.status = ExitCode::bounds;
    traj.failure = e.what();
  }
  traj.final_state = state;
  return traj;
}

}  // namespace phasekit
