#include "phasekit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <thread>

#include "phasekit/error.hpp"

namespace phasekit {

LimitData limit_initial_data(const TwoValueProfile& profile) {
  profile.validate();
  return {1.0 - profile.theta, profile.theta, profile.v_plus, profile.v_minus};
}

void FamilyConfig::validate() const {
  if (n_list.empty()) throw ConfigError("n_list must not be empty");
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    if (n_list[k] < 1) throw ConfigError("n_list entries must be >= 1");
    if (k > 0 && n_list[k] <= n_list[k - 1]) throw ConfigError("n_list must be strictly increasing");
  }
  if (grid_n < 64 * static_cast<std::size_t>(n_list.back())) {
    throw ConfigError("grid N must be at least 64 * max(n_list)");
  }
  profile.validate();
  for (double v : {profile.v_minus, profile.v_plus}) {
    if (v < solver.lower || v > solver.upper) throw ConfigError("profile values must lie inside the guard rails");
  }
  if (snapshots < 1) throw ConfigError("snapshots must be >= 1");
  if (dict_modes < 0 || dict_powers < 0) throw ConfigError("dictionary sizes must be >= 0");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  solver.validate();
}

int harness_threads(int requested, int jobs) {
  int n = requested > 0 ? requested : jobs;
  if (const char* env = std::getenv("PHASEKIT_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min(n, static_cast<int>(cap));
  }
  return std::clamp(n, 1, std::max(jobs, 1));
}

bool monotone_with_slack(const std::vector<double>& values, double slack) {
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > (1.0 + slack) * values[k - 1]) return false;
  }
  return true;
}

namespace {

struct MemberRun {
  std::optional<NskTrajectory> traj;
  std::string error;
  ExitCode code = ExitCode::ok;
};

}  // namespace

ConvergenceReport run_family(const FamilyConfig& cfg, const MemberSink& member_sink, const BNSink& bn_sink) {
  cfg.validate();
  require_admissible(cfg.params.eos, cfg.solver.lower, cfg.solver.upper);

  PeriodicGrid grid(cfg.grid_n);
  SolverConfig solver = cfg.solver;
  solver.snapshot_every = 0;
  solver.snapshot_dt = solver.t_end / cfg.snapshots;
  const GridField u0 = make_velocity(cfg.u0, grid);
  const double lo = solver.lower, hi = solver.upper;

  // Build every initial state up front so profile errors surface before any thread starts.
  std::vector<FluidState> initial;
  for (int n : cfg.n_list) {
    initial.push_back(make_fluid_state(0.0, make_oscillating_initial(cfg.profile, n, grid, lo, hi), u0, cfg.params,
                                       solver.scheme.helmholtz));
  }
  const LimitData lim = limit_initial_data(cfg.profile);
  const BNState bn0 = make_bn_state(0.0, GridField(grid, lim.alpha_p), GridField(grid, lim.rho_p),
                                    GridField(grid, lim.rho_m), u0, cfg.params, solver.scheme.helmholtz);

  // Job 0 is the BN run, job k the k-th member.
  const std::size_t members = cfg.n_list.size();
  std::vector<MemberRun> runs(members);
  std::optional<BNTrajectory> bn;
  std::string bn_error;
  ExitCode bn_code = ExitCode::ok;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job <= members; job = next++) {
      if (job == 0) {
        try {
          bn.emplace(bn_run(bn0, cfg.params, solver));
          if (bn_sink) bn_sink(*bn);
        } catch (const Error& e) {
          bn_error = e.what();
          bn_code = e.code();
        }
        continue;
      }
      auto& r = runs[job - 1];
      try {
        r.traj.emplace(nsk_run(initial[job - 1], cfg.params, solver));
        if (member_sink) member_sink(cfg.n_list[job - 1], *r.traj);
      } catch (const Error& e) {
        r.error = e.what();
        r.code = e.code();
      }
    }
  };
  const int threads = harness_threads(cfg.threads, static_cast<int>(members + 1));
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ConvergenceReport report;
  for (int k = 0; k <= cfg.snapshots; ++k) report.times.push_back(k * solver.snapshot_dt);
  report.complete = true;
  if (!bn) {
    report.bn_status = bn_code;
    report.bn_failure = bn_error;
    report.complete = false;
  } else {
    report.bn_status = bn->status;
    report.bn_failure = bn->failure;
    if (!bn->ok()) report.complete = false;
  }

  const TestDictionary dict(cfg.dict_modes, cfg.dict_powers, hi);
  std::vector<ParamMeasure> bn_measures;
  if (bn) {
    for (const auto& s : bn->snapshots) bn_measures.push_back(two_dirac_from_bn(s, lo, hi));
  }
  const double floor = grid.spacing() * grid.spacing();
  for (std::size_t m = 0; m < members; ++m) {
    MemberResult res;
    res.n = cfg.n_list[m];
    const auto& run = runs[m];
    if (!run.traj) {
      res.status = run.code;
      res.failure = run.error;
    } else {
      res.status = run.traj->status;
      res.failure = run.traj->failure;
      const auto& snaps = run.traj->snapshots;
      const std::size_t shared = std::min(snaps.size(), bn_measures.size());
      for (std::size_t k = 0; k < shared; ++k) {
        const auto theta_n = empirical_from_state(snaps[k].rho, lo, hi);
        res.distance.push_back(distance(theta_n, bn_measures[k], dict));
        res.wasserstein.push_back(wasserstein_average(theta_n, bn_measures[k]));
        res.u_error.push_back((snaps[k].u - bn->snapshots[k].u).max_abs());
      }
    }
    if (res.status != ExitCode::ok || res.distance.size() != report.times.size()) report.complete = false;
    if (!res.distance.empty()) {
      res.sup_distance = *std::max_element(res.distance.begin(), res.distance.end());
      res.sup_u_error = *std::max_element(res.u_error.begin(), res.u_error.end());
      res.sup_wasserstein = *std::max_element(res.wasserstein.begin(), res.wasserstein.end());
      report.propagation_constant =
          std::max(report.propagation_constant, res.sup_distance / (res.distance.front() + floor));
    }
    report.members.push_back(std::move(res));
  }

  std::vector<double> sup_d, sup_u;
  for (const auto& r : report.members) {
    sup_d.push_back(r.sup_distance);
    sup_u.push_back(r.sup_u_error);
  }
  report.distance_monotone = report.complete && monotone_with_slack(sup_d);
  report.u_error_monotone = report.complete && monotone_with_slack(sup_u);
  return report;
}

namespace {

template <class Snapshot, class ToMeasure>
KineticReport kinetic_report(const std::vector<Snapshot>& snaps, const PhysicalParams& params, ToMeasure to_measure) {
  if (snaps.size() < 2) throw DomainError("kinetic consistency needs at least two stored snapshots");
  std::vector<ParamMeasure> ms;
  std::vector<GridField> us, sigmas;
  std::vector<double> times;
  for (const auto& s : snaps) {
    ms.push_back(to_measure(s));
    us.push_back(s.u);
    sigmas.push_back(effective_viscous_flux(s, params));
    times.push_back(s.t);
  }
  KineticReport rep;
  for (const auto& phi : smoke_test_functions(times.front(), times.back(), ms.front().xi_hi())) {
    rep.names.push_back(phi.name);
    rep.residuals.push_back(kinetic_residual(ms, us, sigmas, times, phi, params.mu, params.eos));
  }
  return rep;
}

}  // namespace

KineticReport kinetic_consistency(const NskTrajectory& run, const PhysicalParams& params, double xi_lo,
                                  double xi_hi) {
  return kinetic_report(run.snapshots, params,
                        [&](const FluidState& s) { return empirical_from_state(s.rho, xi_lo, xi_hi); });
}

KineticReport kinetic_consistency(const BNTrajectory& run, const PhysicalParams& params, double xi_lo,
                                  double xi_hi) {
  return kinetic_report(run.snapshots, params,
                        [&](const BNState& s) { return two_dirac_from_bn(s, xi_lo, xi_hi); });
}

std::vector<std::vector<double>> refinement_orders(const std::vector<KineticReport>& levels) {
  std::vector<std::vector<double>> out;
  for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
    const auto& a = levels[l].residuals;
    const auto& b = levels[l + 1].residuals;
    if (a.size() != b.size()) throw DomainError("refinement levels use different test sets");
    std::vector<double> ord;
    for (std::size_t j = 0; j < a.size(); ++j) ord.push_back(std::log2(std::abs(a[j]) / std::abs(b[j])));
    out.push_back(std::move(ord));
  }
  return out;
}

}  // namespace phasekit
