#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>

#include <CLI11.hpp>

#include "phasekit/io.hpp"

using namespace phasekit;
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

GridField fourier_field(const PeriodicGrid& g, double mean, const std::vector<double>& sin_amp,
                        const std::vector<double>& cos_amp = {}) {
  return make_velocity(VelocityProfile{mean, sin_amp, cos_amp}, g);
}

FluidState nsk_initial(const RunConfig& cfg, const PeriodicGrid& g, const PhysicalParams& p) {
  const GridField u = make_velocity(cfg.velocity(), g);
  GridField rho = cfg.init.profile == "two_value"
                      ? make_oscillating_initial(cfg.profile(), cfg.init.n_osc, g, cfg.lower(), cfg.upper())
                      : fourier_field(g, cfg.init.rho_mean, cfg.init.rho_sin, cfg.init.rho_cos);
  return make_fluid_state(0.0, std::move(rho), u, p, cfg.solver().scheme.helmholtz);
}

BNState bn_initial(const RunConfig& cfg, const PeriodicGrid& g, const PhysicalParams& p) {
  const GridField u = make_velocity(cfg.velocity(), g);
  const auto backend = cfg.solver().scheme.helmholtz;
  if (cfg.bn.initial == "limit") {
    const auto lim = limit_initial_data(cfg.profile());
    return make_bn_state(0.0, GridField(g, lim.alpha_p), GridField(g, lim.rho_p), GridField(g, lim.rho_m), u, p,
                         backend);
  }
  return make_bn_state(0.0, fourier_field(g, cfg.bn.alpha_p, cfg.bn.alpha_p_sin),
                       fourier_field(g, cfg.bn.rho_p, cfg.bn.rho_p_sin), fourier_field(g, cfg.bn.rho_m, cfg.bn.rho_m_sin),
                       u, p, backend);
}

ojson balance_json(const BalanceReport& b) {
  ojson j{{"mass_drift", b.mass_drift},
          {"momentum_drift", b.momentum_drift},
          {"energy_residual", b.energy_residual},
          {"energy_residual_final", b.energy_residual_final},
          {"energy0", b.energy0},
          {"max_bd_entropy", b.max_bd_entropy},
          {"sigma_grad_l2l2", b.sigma_grad_l2l2},
          {"mass_ok", b.mass_ok},
          {"momentum_ok", b.momentum_ok},
          {"energy_ok", b.energy_ok},
          {"envelope_ok", b.envelope_ok},
          {"passed", b.passed}};
  j["envelope_ratio"] = b.envelope_ratio ? ojson(*b.envelope_ratio) : ojson(nullptr);
  return j;
}

ojson record_json(const DiagnosticsRecord& r) {
  return {{"t", r.t},
          {"mass", r.mass},
          {"momentum", r.momentum},
          {"energy", r.energy},
          {"dissipation", r.dissipation},
          {"bd_entropy", r.bd_entropy},
          {"rho_min", r.rho_min},
          {"rho_max", r.rho_max},
          {"sigma_grad_l2", r.sigma_grad_l2},
          {"c_h2", r.c_h2},
          {"inv_sqrt_rho_grad", r.inv_sqrt_rho_grad}};
}

ojson status_json(ExitCode status, const std::string& failure) {
  return {{"status", static_cast<int>(status)}, {"failure", failure}};
}

template <class Traj, class ToMeasure>
void write_measures(const fs::path& path, const Traj& traj, const TestDictionary& dict, ToMeasure to_measure) {
  std::vector<double> times;
  std::vector<ParamMeasure> ms;
  for (const auto& s : traj.snapshots) {
    times.push_back(s.t);
    ms.push_back(to_measure(s));
  }
  write_measure_summary_csv(path, times, ms, dict);
}

void write_nsk_run(const fs::path& dir, const RunConfig& cfg, const NskTrajectory& traj) {
  write_diagnostics_csv(dir / "diagnostics.csv", traj.records);
  write_snapshots(dir / "snapshots", traj.snapshots);
  const TestDictionary dict(cfg.harness.dict_modes, cfg.harness.dict_powers, cfg.upper());
  write_measures(dir / "measures.csv", traj, dict,
                 [&](const FluidState& s) { return empirical_from_state(s.rho, cfg.lower(), cfg.upper()); });
}

void write_bn_run(const fs::path& dir, const RunConfig& cfg, const BNTrajectory& traj) {
  write_diagnostics_csv(dir / "diagnostics.csv", traj.records);
  write_snapshots(dir / "snapshots", traj.snapshots);
  const TestDictionary dict(cfg.harness.dict_modes, cfg.harness.dict_powers, cfg.upper());
  write_measures(dir / "measures.csv", traj, dict,
                 [&](const BNState& s) { return two_dirac_from_bn(s, cfg.lower(), cfg.upper()); });
}

fs::path out_dir(const RunConfig& cfg, const std::string& flag) {
  return flag.empty() ? fs::path(cfg.output.directory) : fs::path(flag);
}

int simulate_nsk(const RunConfig& cfg, const fs::path& out) {
  const auto p = cfg.physical();
  PeriodicGrid g(static_cast<std::size_t>(cfg.N));
  const auto traj = nsk_run(nsk_initial(cfg, g, p), p, cfg.solver());
  write_nsk_run(out, cfg, traj);
  ojson run = status_json(traj.status, traj.failure);
  run["command"] = "simulate-nsk";
  run["steps"] = traj.steps.size();
  run["t_final"] = traj.final_state.t;
  if (traj.records.size() >= 2) run["balance"] = balance_json(balance_check(traj.records, {}, p.gamma));
  write_meta_json(out / "meta.json", cfg, run);
  if (!traj.ok()) std::cerr << "phasekit: " << traj.failure << "\n";
  return static_cast<int>(traj.status);
}

int simulate_bn(const RunConfig& cfg, const fs::path& out, bool picard_check) {
  const auto p = cfg.physical();
  PeriodicGrid g(static_cast<std::size_t>(cfg.N));
  const BNState initial = bn_initial(cfg, g, p);
  std::vector<GridField> us;
  std::vector<double> times;
  BNObserver obs;
  if (picard_check) {
    obs = [&](const BNState& s) {
      us.push_back(s.u);
      times.push_back(s.t);
    };
  }
  const auto traj = bn_run(initial, p, cfg.solver(), obs);
  write_bn_run(out, cfg, traj);
  ojson run = status_json(traj.status, traj.failure);
  run["command"] = "simulate-bn";
  run["steps"] = traj.steps.size();
  run["t_final"] = traj.final_state.t;
  run["max_closure_drift"] = traj.max_closure_drift;
  run["max_clipped"] = traj.max_clipped;
  int code = static_cast<int>(traj.status);
  if (picard_check && traj.ok()) {
    PicardOptions opt;
    opt.lower = cfg.lower();
    opt.upper = cfg.upper();
    ojson pc;
    try {
      const auto res = picard_two_phase(initial, us, times, p, opt);
      auto f = std::fopen((out / "picard.csv").string().c_str(), "wb");
      if (!f) throw ConfigError("cannot write picard.csv");
      std::fprintf(f, "t0,t1,iterations,final_diff,max_ratio\n");
      double worst_ratio = 0.0;
      for (const auto& s : res.slabs) {
        double r = 0.0;
        for (double v : s.ratios) r = std::max(r, v);
        worst_ratio = std::max(worst_ratio, r);
        std::fprintf(f, "%s,%s,%d,%s,%s\n", format_double(s.t0).c_str(), format_double(s.t1).c_str(), s.iterations,
                     format_double(s.final_diff).c_str(), format_double(r).c_str());
      }
      std::fclose(f);
      pc["slabs"] = res.slabs.size();
      pc["outer_passes"] = res.outer_passes;
      pc["pi_change"] = res.pi_change;
      pc["max_ratio"] = worst_ratio;
      pc["alpha_p_gap"] = (res.alpha_p.back() - traj.final_state.alpha_p).max_abs();
      pc["rho_p_gap"] = (res.rho_p.back() - traj.final_state.rho_p).max_abs();
      pc["rho_m_gap"] = (res.rho_m.back() - traj.final_state.rho_m).max_abs();
    } catch (const ConvergenceError& e) {
      pc["error"] = e.what();
      code = static_cast<int>(e.code());
      std::cerr << "phasekit: " << e.what() << "\n";
    }
    run["picard_check"] = pc;
  }
  write_meta_json(out / "meta.json", cfg, run);
  if (!traj.ok()) std::cerr << "phasekit: " << traj.failure << "\n";
  return code;
}

int homogenize(const RunConfig& cfg, const fs::path& out) {
  const FamilyConfig fam = cfg.family();
  auto member_dir = [&](int n) { return out / ("n_" + std::to_string(n)); };
  const auto report = run_family(
      fam, [&](int n, const NskTrajectory& t) { write_nsk_run(member_dir(n), cfg, t); },
      [&](const BNTrajectory& t) { write_bn_run(out / "bn", cfg, t); });
  write_convergence_csv(out / "convergence.csv", report);
  ojson members = ojson::array();
  int code = static_cast<int>(report.bn_status);
  for (const auto& m : report.members) {
    write_distances_csv(member_dir(m.n) / "distances.csv", report.times, m.distance, m.wasserstein);
    ojson mj = status_json(m.status, m.failure);
    mj["n"] = m.n;
    mj["sup_t_measure_dist"] = m.sup_distance;
    mj["sup_t_u_err"] = m.sup_u_error;
    mj["sup_t_wasserstein"] = m.sup_wasserstein;
    members.push_back(mj);
    if (code == 0 && m.status != ExitCode::ok) code = static_cast<int>(m.status);
  }
  ojson run{{"command", "homogenize"},
            {"complete", report.complete},
            {"distance_monotone", report.distance_monotone},
            {"u_error_monotone", report.u_error_monotone},
            {"propagation_constant", report.propagation_constant},
            {"times", report.times},
            {"bn", status_json(report.bn_status, report.bn_failure)},
            {"members", members}};
  write_meta_json(out / "meta.json", cfg, run);
  if (report.complete && !report.distance_monotone) std::cerr << "phasekit: distances are not monotone in n\n";
  return code;
}

int check_eos(const RunConfig& cfg, std::optional<double> lo, std::optional<double> hi) {
  const auto eos = cfg.make_eos();
  const double a = lo.value_or(cfg.lower());
  const double b = hi.value_or(cfg.upper());
  if (!(a >= 0.0 && a < b)) throw ConfigError("check-eos interval must satisfy 0 <= lo < hi");
  const auto r = check_admissibility(eos, a, std::min(b, eos.domain_max()));
  ojson j{{"eos", eos.name()},
          {"gamma", eos.gamma()},
          {"interval", {a, b}},
          {"scan", {r.scan_lo, r.scan_hi}},
          {"admissible", r.admissible},
          {"min_artificial_slope", r.min_artificial_slope}};
  j["spinodal"] = r.spinodal ? ojson{{"lower", r.spinodal->lower}, {"upper", r.spinodal->upper}} : ojson(nullptr);
  std::cout << j.dump(2) << "\n";
  return r.admissible ? 0 : static_cast<int>(ExitCode::admissibility);
}

int diagnose_cmd(const RunConfig& cfg, const std::string& snapshot, const std::string& run_dir) {
  const auto p = cfg.physical();
  ojson j;
  if (!snapshot.empty()) {
    auto s = read_fluid_snapshot(snapshot);
    // The stored c is replaced by a fresh Helmholtz solve so the record is self-consistent.
    s = make_fluid_state(0.0, s.rho, s.u, p, cfg.solver().scheme.helmholtz);
    j["record"] = record_json(diagnose(s, p));
    j["bd_identity_gap"] = bd_identity_gap(s.rho, p.mu);
  }
  if (!run_dir.empty()) {
    const auto records = read_diagnostics_csv(fs::path(run_dir) / "diagnostics.csv");
    if (records.size() < 2) throw ConfigError("diagnostics.csv needs at least two rows");
    j["balance"] = balance_json(balance_check(records));
  }
  if (j.empty()) throw ConfigError("diagnose needs --snapshot or --run");
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phasekit: NSK / Baer-Nunziato liquid-vapour toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version_string()));

  std::string config, out, snapshot, run_dir;
  bool picard = false;
  std::optional<double> lo, hi;

  auto* nsk = app.add_subcommand("simulate-nsk", "run the non-local NSK solver");
  auto* bn = app.add_subcommand("simulate-bn", "run the Baer-Nunziato solver");
  auto* hom = app.add_subcommand("homogenize", "run an oscillating family against its BN limit");
  auto* eos = app.add_subcommand("check-eos", "print the admissibility report of the configured eos");
  auto* diag = app.add_subcommand("diagnose", "diagnostics of a snapshot or a finished run");
  for (auto* sc : {nsk, bn, hom, eos, diag}) sc->add_option("--config", config, "config file")->required();
  for (auto* sc : {nsk, bn, hom}) sc->add_option("--out", out, "output directory");
  bn->add_flag("--picard-check", picard, "cross-check against the fixed-point construction");
  eos->add_option("--lo", lo, "lower end of the checked interval");
  eos->add_option("--hi", hi, "upper end of the checked interval");
  diag->add_option("--snapshot", snapshot, "snapshot CSV (x, rho, u, c)");
  diag->add_option("--run", run_dir, "run directory holding diagnostics.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::config);
  }

  try {
    const RunConfig cfg = load_config(config);
    if (*nsk) return simulate_nsk(cfg, out_dir(cfg, out));
    if (*bn) return simulate_bn(cfg, out_dir(cfg, out), picard);
    if (*hom) return homogenize(cfg, out_dir(cfg, out));
    if (*eos) return check_eos(cfg, lo, hi);
    return diagnose_cmd(cfg, snapshot, run_dir);
  } catch (const Error& e) {
    std::cerr << "phasekit: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "phasekit: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config);
  }
}
