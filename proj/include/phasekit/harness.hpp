#pragma once

#include <functional>
#include <string>
#include <vector>

#include "phasekit/bn.hpp"
#include "phasekit/measures.hpp"
#include "phasekit/nsk.hpp"

namespace phasekit {

/// Constant BN initial data carried by the weak limit of the oscillating profile.
struct LimitData {
  double alpha_p;
  double alpha_m;
  double rho_p;
  double rho_m;
};

/// alpha_+ = 1 - theta, rho_+- = v_+-. The symmetric ramps of TwoValueProfile leave the
/// mean at theta v_- + (1 - theta) v_+, so no smoothing correction is needed.
LimitData limit_initial_data(const TwoValueProfile& profile);

struct FamilyConfig {
  explicit FamilyConfig(PhysicalParams p) : params(std::move(p)) {}

  std::vector<int> n_list{4, 8, 16, 32};
  TwoValueProfile profile;
  VelocityProfile u0;
  PhysicalParams params;
  /// lower/upper are the guard rails and the measure support box.
  SolverConfig solver;
  std::size_t grid_n = 2048;
  int dict_modes = 4;
  int dict_powers = 4;
  /// Snapshot intervals over [0, t_end].
  int snapshots = 10;
  /// 0: one worker per member, still capped by PHASEKIT_THREADS.
  int threads = 0;

  void validate() const;
};

struct MemberResult {
  int n = 0;
  double sup_distance = 0.0;
  double sup_u_error = 0.0;
  double sup_wasserstein = 0.0;
  std::vector<double> distance;
  std::vector<double> u_error;
  std::vector<double> wasserstein;
  ExitCode status = ExitCode::ok;
  std::string failure;
};

struct ConvergenceReport {
  std::vector<double> times;
  std::vector<MemberResult> members;
  ExitCode bn_status = ExitCode::ok;
  std::string bn_failure;
  /// Non-increasing in n up to 20% slack.
  bool distance_monotone = false;
  bool u_error_monotone = false;
  /// max_n sup_t distance / (distance at t = 0 + h^2 floor).
  double propagation_constant = 0.0;
  bool complete = false;
};

/// Called from worker threads for every finished member run; must be safe under concurrency.
using MemberSink = std::function<void(int n, const NskTrajectory&)>;
using BNSink = std::function<void(const BNTrajectory&)>;

/// Runs NSK for every n and BN once from the limit data, comparing their measures and velocities
/// at the shared snapshot times. A failing run marks the report incomplete; its series stop at the
/// last snapshot it reached.
ConvergenceReport run_family(const FamilyConfig& config, const MemberSink& member_sink = {},
                             const BNSink& bn_sink = {});

/// Worker count for n jobs: requested (or n when 0), capped by PHASEKIT_THREADS.
int harness_threads(int requested, int jobs);

bool monotone_with_slack(const std::vector<double>& values, double slack = 0.2);

struct KineticReport {
  std::vector<std::string> names;
  std::vector<double> residuals;
};

/// Kinetic residual over the smoke-test set on the stored snapshots (store every step for
/// time-quadrature accuracy).
KineticReport kinetic_consistency(const NskTrajectory& run, const PhysicalParams& params, double xi_lo,
                                  double xi_hi);
KineticReport kinetic_consistency(const BNTrajectory& run, const PhysicalParams& params, double xi_lo,
                                  double xi_hi);

/// log2 of successive residual ratios, per level pair and test function; levels are ordered coarse
/// to fine with h halving.
std::vector<std::vector<double>> refinement_orders(const std::vector<KineticReport>& levels);

}  // namespace phasekit
