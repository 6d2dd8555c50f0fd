#include "phasekit/bn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scheme.hpp"

namespace phasekit {

namespace {

// Below this volume fraction the partial mass carries no information about the phase density.
constexpr double alpha_floor = 1e-8;
constexpr double closure_tol = 1e-10;
constexpr double clip_tol = 1e-12;

struct NodeRates {
  double alpha;
  double rho_p;
  double rho_m;
};

NodeRates node_rates(double ap, double am, double rp, double rm, const PhysicalParams& p) {
  const double dp = p.eos.artificial_pressure(rp) - p.eos.artificial_pressure(rm);
  return {ap * am / p.mu * dp, -rp * am / p.mu * dp, rm * ap / p.mu * dp};
}

std::vector<double> feet_first_order(const GridField& u, double dt) {
  const auto& g = u.grid();
  std::vector<double> feet(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) feet[i] = wrap_unit(g.node(i) - dt * u[i]);
  return feet;
}

// Backward Heun along dX/ds = u: k1 = u_new(x), k2 = u_old(x - dt k1).
std::vector<double> feet_rk2(const GridField& u_old, const GridField& u_new, double dt) {
  const auto& g = u_new.grid();
  std::vector<double> feet(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.node(i);
    const double k1 = u_new[i];
    const double k2 = interpolate_cubic(u_old, x - dt * k1);
    feet[i] = wrap_unit(x - 0.5 * dt * (k1 + k2));
  }
  return feet;
}

GridField sample_at(const GridField& f, const std::vector<double>& feet) {
  GridField out(f.grid());
  for (std::size_t i = 0; i < feet.size(); ++i) out[i] = interpolate_cubic(f, feet[i]);
  return out;
}

GridField mixture_density(const GridField& ap, const GridField& am, const GridField& rp, const GridField& rm) {
  return hadamard(ap, rp) + hadamard(am, rm);
}

GridField mixture_pressure(const GridField& ap, const GridField& am, const GridField& rp, const GridField& rm,
                           const EquationOfState& eos) {
  GridField out(ap.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = ap[i] * eos.artificial_pressure(rp[i]) + am[i] * eos.artificial_pressure(rm[i]);
  }
  return out;
}

BNState transport(const BNState& s, const PhysicalParams& p, const SolverConfig& config, double dt) {
  const double t_new = s.t + dt;
  const double up = config.scheme.upwind;
  const double mu = p.mu;

  const GridField mix0 = mixture_density(s.alpha_p, s.alpha_m, s.rho_p, s.rho_m);
  const GridField pbar0 = mixture_pressure(s.alpha_p, s.alpha_m, s.rho_p, s.rho_m, p.eos);
  const GridField momentum0 = hadamard(mix0, s.u);
  const GridField visc0 = derivative(s.u, 2, Backend::central) * (0.5 * mu * dt);
  const GridField rp0 = scheme::continuity_rhs(s.rho_p, s.u, up);
  const GridField rm0 = scheme::continuity_rhs(s.rho_m, s.u, up);
  const GridField e0 = scheme::momentum_explicit(mix0, s.u, pbar0, s.c, p.gamma, up);

  GridField rho_p1 = s.rho_p + dt * rp0;
  GridField rho_m1 = s.rho_m + dt * rm0;
  scheme::check_bounds(rho_p1, config.lower, config.upper, "rho_p", t_new);
  scheme::check_bounds(rho_m1, config.lower, config.upper, "rho_m", t_new);
  const auto feet1 = feet_first_order(s.u, dt);
  GridField ap1 = sample_at(s.alpha_p, feet1);
  GridField am1 = sample_at(s.alpha_m, feet1);
  const GridField mix1 = mixture_density(ap1, am1, rho_p1, rho_m1);
  const GridField c1 = helmholtz_solve(mix1, p.kappa, p.gamma, config.scheme.helmholtz);
  GridField u1 = scheme::viscous_solve(mix1, momentum0 + dt * e0 + visc0, mu, dt);
  scheme::check_finite(u1, "velocity", t_new);

  const GridField pbar1 = mixture_pressure(ap1, am1, rho_p1, rho_m1, p.eos);
  const GridField rp1 = scheme::continuity_rhs(rho_p1, u1, up);
  const GridField rm1 = scheme::continuity_rhs(rho_m1, u1, up);
  const GridField e1 = scheme::momentum_explicit(mix1, u1, pbar1, c1, p.gamma, up);

  BNState out{t_new, GridField(s.u.grid()), GridField(s.u.grid()), s.rho_p + (0.5 * dt) * (rp0 + rp1),
              s.rho_m + (0.5 * dt) * (rm0 + rm1), GridField(s.u.grid()), GridField(s.u.grid())};
  scheme::check_bounds(out.rho_p, config.lower, config.upper, "rho_p", t_new);
  scheme::check_bounds(out.rho_m, config.lower, config.upper, "rho_m", t_new);
  const auto feet2 = feet_rk2(s.u, u1, dt);
  out.alpha_p = sample_at(s.alpha_p, feet2);
  out.alpha_m = sample_at(s.alpha_m, feet2);
  const GridField mix2 = mixture_density(out.alpha_p, out.alpha_m, out.rho_p, out.rho_m);
  out.c = helmholtz_solve(mix2, p.kappa, p.gamma, config.scheme.helmholtz);
  out.u = scheme::viscous_solve(mix2, momentum0 + (0.5 * dt) * (e0 + e1) + visc0, mu, dt);
  scheme::check_finite(out.u, "velocity", t_new);
  return out;
}

void finish_alpha(BNState& s, BNStepInfo& info) {
  for (std::size_t i = 0; i < s.alpha_p.size(); ++i) {
    info.closure_drift = std::max(info.closure_drift, std::abs(s.alpha_p[i] + s.alpha_m[i] - 1.0));
  }
  if (!(info.closure_drift < closure_tol)) {
    std::ostringstream os;
    os << "volume fraction closure drifted by " << info.closure_drift << " near t = " << s.t;
    throw BoundsError(os.str());
  }
  for (std::size_t i = 0; i < s.alpha_p.size(); ++i) {
    for (double* a : {&s.alpha_p[i], &s.alpha_m[i]}) {
      if (*a < 0.0) {
        if (*a < -clip_tol) {
          std::ostringstream os;
          os << "negative volume fraction " << *a << " near t = " << s.t;
          throw BoundsError(os.str());
        }
        info.clipped = std::max(info.clipped, -*a);
        *a = 0.0;
      }
    }
    s.alpha_m[i] = 1.0 - s.alpha_p[i];
  }
}

}  // namespace

RelaxationSources relaxation_rhs(const BNState& s, const PhysicalParams& p) {
  const auto& g = s.u.grid();
  RelaxationSources out{GridField(g), GridField(g), GridField(g), GridField(g)};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto r = node_rates(s.alpha_p[i], s.alpha_m[i], s.rho_p[i], s.rho_m[i], p);
    out.alpha_p[i] = r.alpha;
    out.alpha_m[i] = -r.alpha;
    out.rho_p[i] = r.rho_p;
    out.rho_m[i] = r.rho_m;
  }
  return out;
}

RelaxationSources relaxation_rhs_mixture(const BNState& s, const PhysicalParams& p) {
  const auto& g = s.u.grid();
  const GridField pbar = mixture_fields(s, p.eos).p_bar;
  RelaxationSources out{GridField(g), GridField(g), GridField(g), GridField(g)};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double pp = p.eos.artificial_pressure(s.rho_p[i]);
    const double pm = p.eos.artificial_pressure(s.rho_m[i]);
    out.alpha_p[i] = s.alpha_p[i] / p.mu * (pp - pbar[i]);
    out.alpha_m[i] = s.alpha_m[i] / p.mu * (pm - pbar[i]);
    out.rho_p[i] = s.rho_p[i] / p.mu * (pbar[i] - pp);
    out.rho_m[i] = s.rho_m[i] / p.mu * (pbar[i] - pm);
  }
  return out;
}

void relax(BNState& s, const PhysicalParams& p, double tau) {
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    const double ap = s.alpha_p[i];
    const double am = s.alpha_m[i];
    const double rp = s.rho_p[i];
    const double rm = s.rho_m[i];
    const auto k1 = node_rates(ap, am, rp, rm, p);
    const double ap1 = ap + tau * k1.alpha;
    const double am1 = am - tau * k1.alpha;
    const double rp1 = ap > alpha_floor && ap1 > alpha_floor ? rp * (ap / ap1) : rp + tau * k1.rho_p;
    const double rm1 = am > alpha_floor && am1 > alpha_floor ? rm * (am / am1) : rm + tau * k1.rho_m;
    const auto k2 = node_rates(ap1, am1, rp1, rm1, p);
    const double da = 0.5 * tau * (k1.alpha + k2.alpha);
    const double ap2 = ap + da;
    const double am2 = am - da;
    s.rho_p[i] = ap > alpha_floor && ap2 > alpha_floor ? rp * (ap / ap2) : rp + 0.5 * tau * (k1.rho_p + k2.rho_p);
    s.rho_m[i] = am > alpha_floor && am2 > alpha_floor ? rm * (am / am2) : rm + 0.5 * tau * (k1.rho_m + k2.rho_m);
    s.alpha_p[i] = ap2;
    s.alpha_m[i] = am2;
  }
}

double stable_dt(const BNState& s, const PhysicalParams& p, const SolverConfig& config) {
  double speed = 0.0;
  double rate = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    const double sp = std::max(0.0, p.eos.d_artificial_pressure(s.rho_p[i]));
    const double sm = std::max(0.0, p.eos.d_artificial_pressure(s.rho_m[i]));
    speed = std::max(speed, std::abs(s.u[i]) + std::sqrt(std::max(sp, sm)));
    rate = std::max(rate, (s.alpha_m[i] * s.rho_p[i] * sp + s.alpha_p[i] * s.rho_m[i] * sm) / p.mu);
  }
  double dt = config.dt;
  if (speed > 0.0) dt = std::min(dt, config.cfl * s.u.grid().spacing() / speed);
  if (rate > 0.0) dt = std::min(dt, config.cfl / rate);
  return dt;
}

BNState bn_step(const BNState& s, const PhysicalParams& p, const SolverConfig& config, double dt,
                BNStepInfo* info) {
  BNState half = s;
  relax(half, p, 0.5 * dt);
  scheme::check_bounds(half.rho_p, config.lower, config.upper, "rho_p", s.t);
  scheme::check_bounds(half.rho_m, config.lower, config.upper, "rho_m", s.t);
  BNState out = transport(half, p, config, dt);
  relax(out, p, 0.5 * dt);
  scheme::check_bounds(out.rho_p, config.lower, config.upper, "rho_p", out.t);
  scheme::check_bounds(out.rho_m, config.lower, config.upper, "rho_m", out.t);
  BNStepInfo local;
  finish_alpha(out, info ? *info : local);
  out.c = helmholtz_solve(mixture_density(out.alpha_p, out.alpha_m, out.rho_p, out.rho_m), p.kappa, p.gamma,
                          config.scheme.helmholtz);
  return out;
}

BNState bn_step(const BNState& s, const PhysicalParams& p, const SolverConfig& config) {
  return bn_step(s, p, config, stable_dt(s, p, config));
}

BNTrajectory bn_run(const BNState& initial, const PhysicalParams& p, const SolverConfig& config,
                    const BNObserver& observer) {
  config.validate();
  if (!(config.upper < p.eos.domain_max())) {
    throw DomainError("upper guard rail must stay below the eos domain limit");
  }
  const auto report = check_admissibility(p.eos, config.lower, config.upper);
  if (!report.admissible) throw AdmissibilityError("artificial pressure is not monotone on the guard rails");

  BNTrajectory traj(initial);
  BNState state = initial;
  try {
    scheme::check_bounds(state.rho_p, config.lower, config.upper, "initial rho_p", state.t);
    scheme::check_bounds(state.rho_m, config.lower, config.upper, "initial rho_m", state.t);
    traj.records.push_back(diagnose(state, p));
    traj.snapshots.push_back(state);
    if (observer) observer(state);

    const double t_end = config.t_end;
    const double eps = 1e-12 * t_end;
    long next_snap =
        config.snapshot_dt > 0.0 ? std::lround(std::floor(state.t / config.snapshot_dt + 1e-9)) + 1 : 0;
    long step = 0;
    while (state.t < t_end - eps) {
      double dt = stable_dt(state, p, config);
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
      BNStepInfo info;
      state = bn_step(state, p, config, dt, &info);
      if (landed) state.t = t_target;
      ++step;
      traj.max_closure_drift = std::max(traj.max_closure_drift, info.closure_drift);
      traj.max_clipped = std::max(traj.max_clipped, info.clipped);
      traj.steps.push_back(dt);
      traj.records.push_back(diagnose(state, p));
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

TransportResult transport_with_source(const GridField& a0, std::span<const GridField> u,
                                      std::span<const GridField> f, std::span<const double> times,
                                      bool conservative) {
  const std::size_t steps = times.size();
  if (steps == 0 || u.size() != steps || f.size() != steps) {
    throw DomainError("transport_with_source: u, f and times must have matching lengths");
  }
  for (const auto& v : u) require_finite(v, "transport velocity");
  TransportResult out;
  out.values.reserve(steps);
  out.values.push_back(a0);
  std::vector<GridField> rate;
  rate.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    rate.push_back(conservative ? f[k] - derivative(u[k], 1, Backend::central) : f[k]);
  }
  const auto& g = a0.grid();
  for (std::size_t k = 0; k + 1 < steps; ++k) {
    const double dt = times[k + 1] - times[k];
    if (!(dt > 0.0)) throw DomainError("transport_with_source: times must increase");
    auto feet = feet_rk2(u[k], u[k + 1], dt);
    GridField next(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double g_old = interpolate_cubic(rate[k], feet[i]);
      next[i] = interpolate_cubic(out.values[k], feet[i]) * std::exp(0.5 * dt * (rate[k + 1][i] + g_old));
    }
    out.values.push_back(std::move(next));
    out.flow.feet.push_back(std::move(feet));
  }
  return out;
}

namespace {

struct PicardContext {
  std::span<const GridField> u;
  std::span<const GridField> pi;
  std::span<const double> times;
  const EquationOfState& eos;
  const PicardOptions& opt;
  PicardResult& result;
};

double l1_distance(const GridField& a, const GridField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s * a.grid().spacing();
}

// Tries the slab [a, b]; on success writes result.alpha/rho[a..b] and returns true.
bool picard_slab(PicardContext& ctx, std::size_t a, std::size_t b) {
  const std::size_t len = b - a + 1;
  std::vector<GridField> alpha(len, ctx.result.alpha[a]);
  std::vector<GridField> rho(len, ctx.result.rho[a]);
  const auto u = ctx.u.subspan(a, len);
  const auto times = ctx.times.subspan(a, len);
  PicardSlab log{ctx.times[a], ctx.times[b], 0, 0.0, {}};
  double prev = 0.0;
  for (int it = 1; it <= ctx.opt.max_iter; ++it) {
    std::vector<GridField> f, g;
    f.reserve(len);
    g.reserve(len);
    try {
      for (std::size_t k = 0; k < len; ++k) {
        GridField pt = rho[k].map([&](double r) { return ctx.eos.artificial_pressure(r); });
        GridField fk = (pt - ctx.pi[a + k]) * ctx.opt.rate;
        g.push_back(fk * -1.0);
        f.push_back(std::move(fk));
      }
    } catch (const DomainError&) {
      return false;
    }
    auto new_alpha = transport_with_source(alpha.front(), u, f, times, false).values;
    auto new_rho = transport_with_source(rho.front(), u, g, times, true).values;
    double diff = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      diff = std::max(diff, l1_distance(new_alpha[k], alpha[k]) + l1_distance(new_rho[k], rho[k]));
    }
    alpha = std::move(new_alpha);
    rho = std::move(new_rho);
    log.iterations = it;
    log.final_diff = diff;
    if (it > 1 && prev > 0.0) log.ratios.push_back(diff / prev);
    if (!std::isfinite(diff)) return false;
    if (diff < ctx.opt.tol) {
      for (std::size_t k = 0; k < len; ++k) {
        ctx.result.alpha[a + k] = std::move(alpha[k]);
        ctx.result.rho[a + k] = std::move(rho[k]);
      }
      ctx.result.slabs.push_back(std::move(log));
      return true;
    }
    if (it > 1 && diff >= prev) return false;
    prev = diff;
  }
  return false;
}

void picard_solve(PicardContext& ctx, std::size_t a, std::size_t b) {
  if (picard_slab(ctx, a, b)) return;
  if (b - a <= 1) {
    std::ostringstream os;
    os << "fixed-point iteration did not contract on a single step [" << ctx.times[a] << ", " << ctx.times[b]
       << "]";
    throw ConvergenceError(os.str());
  }
  const std::size_t mid = a + (b - a) / 2;
  picard_solve(ctx, a, mid);
  picard_solve(ctx, mid, b);
}

}  // namespace

PicardResult picard_bn(const GridField& alpha0, const GridField& rho0, std::span<const GridField> u,
                       std::span<const GridField> pi, std::span<const double> times,
                       const EquationOfState& eos, const PicardOptions& opt) {
  if (times.size() < 2 || u.size() != times.size() || pi.size() != times.size()) {
    throw DomainError("picard_bn: u, pi and times must have matching lengths >= 2");
  }
  if (!(opt.tol > 0.0) || opt.max_iter < 1) throw DomainError("picard_bn: tol > 0 and max_iter >= 1 required");
  if (!(opt.lower > 0.0 && opt.lower < opt.upper)) throw DomainError("picard_bn: invalid guard rails");
  if (alpha0.min() < 0.0) throw DomainError("picard_bn: alpha0 must be >= 0");
  if (rho0.min() < opt.lower || rho0.max() > opt.upper) throw DomainError("picard_bn: rho0 outside guard rails");
  for (const auto& p : pi) require_finite(p, "pi");

  PicardResult result;
  result.alpha.assign(times.size(), alpha0);
  result.rho.assign(times.size(), rho0);
  PicardContext ctx{u, pi, times, eos, opt, result};
  picard_solve(ctx, 0, times.size() - 1);

  for (std::size_t k = 0; k < times.size(); ++k) {
    if (result.alpha[k].min() < -clip_tol) throw BoundsError("picard_bn produced a negative volume fraction");
    scheme::check_bounds(result.rho[k], opt.lower, opt.upper, "picard density", times[k]);
  }
  return result;
}

TwoPhasePicardResult picard_two_phase(const BNState& initial, std::span<const GridField> u,
                                      std::span<const double> times, const PhysicalParams& p,
                                      PicardOptions opt, int max_outer) {
  opt.rate = 1.0 / p.mu;
  const std::size_t steps = times.size();
  std::vector<GridField> pi(steps, mixture_fields(initial, p.eos).p_bar);
  TwoPhasePicardResult out;
  double prev_change = INFINITY;
  for (int pass = 1; pass <= max_outer; ++pass) {
    auto plus = picard_bn(initial.alpha_p, initial.rho_p, u, pi, times, p.eos, opt);
    auto minus = picard_bn(initial.alpha_m, initial.rho_m, u, pi, times, p.eos, opt);
    double change = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      GridField next = mixture_pressure(plus.alpha[k], minus.alpha[k], plus.rho[k], minus.rho[k], p.eos);
      change = std::max(change, (next - pi[k]).max_abs());
      pi[k] = std::move(next);
    }
    out.alpha_p = std::move(plus.alpha);
    out.rho_p = std::move(plus.rho);
    out.alpha_m = std::move(minus.alpha);
    out.rho_m = std::move(minus.rho);
    out.slabs = std::move(plus.slabs);
    out.slabs.insert(out.slabs.end(), minus.slabs.begin(), minus.slabs.end());
    out.outer_passes = pass;
    out.pi_change = change;
    if (change < opt.tol) return out;
    if (change >= prev_change) break;
    prev_change = change;
  }
  std::ostringstream os;
  os << "outer pressure iteration stalled at change " << out.pi_change << " after " << out.outer_passes
     << " passes";
  throw ConvergenceError(os.str());
}

}  // namespace phasekit
