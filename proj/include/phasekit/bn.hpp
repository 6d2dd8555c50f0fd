#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "phasekit/diagnostics.hpp"
#include "phasekit/error.hpp"
#include "phasekit/state.hpp"

namespace phasekit {

struct RelaxationSources {
  GridField alpha_p;
  GridField alpha_m;
  GridField rho_p;
  GridField rho_m;
};

/// Pointwise sources in pressure-difference form, e.g.
/// src(alpha_p) = alpha_p alpha_m / mu (Pt(rho_p) - Pt(rho_m)).
RelaxationSources relaxation_rhs(const BNState& s, const PhysicalParams& p);

/// Same sources written against the mixture pressure:
/// src(alpha) = alpha / mu (Pt(rho) - Pbar), src(rho) = rho / mu (Pbar - Pt(rho)).
RelaxationSources relaxation_rhs_mixture(const BNState& s, const PhysicalParams& p);

struct BNStepInfo {
  /// max |alpha_p + alpha_m - 1| before renormalization.
  double closure_drift = 0.0;
  /// Largest magnitude of negative alpha clipped to zero.
  double clipped = 0.0;
};

/// Relaxes alpha and rho in place over tau with one Heun substep. Partial masses alpha rho are
/// kept fixed where alpha is not negligible.
void relax(BNState& s, const PhysicalParams& p, double tau);

/// Acoustic CFL on the phase sound speeds, further limited by the relaxation time scale.
double stable_dt(const BNState& s, const PhysicalParams& p, const SolverConfig& config);

/// Strang step: relax dt/2, transport dt, relax dt/2. Transport advects alpha semi-Lagrangian,
/// rho_p and rho_m with the NSK mass flux and the mixture momentum with -d(Pbar).
BNState bn_step(const BNState& s, const PhysicalParams& p, const SolverConfig& config, double dt,
                BNStepInfo* info = nullptr);
BNState bn_step(const BNState& s, const PhysicalParams& p, const SolverConfig& config);

struct BNTrajectory {
  explicit BNTrajectory(BNState initial) : final_state(std::move(initial)) {}

  std::vector<BNState> snapshots;
  std::vector<DiagnosticsRecord> records;
  std::vector<double> steps;
  BNState final_state;
  double max_closure_drift = 0.0;
  double max_clipped = 0.0;
  ExitCode status = ExitCode::ok;
  std::string failure;

  bool ok() const noexcept { return status == ExitCode::ok; }
};

using BNObserver = std::function<void(const BNState&)>;

/// Same schedule and failure conventions as nsk_run.
BNTrajectory bn_run(const BNState& initial, const PhysicalParams& p, const SolverConfig& config,
                    const BNObserver& observer = {});

/// Departure points of every node, one vector per step.
struct FlowMap {
  std::vector<std::vector<double>> feet;
};

struct TransportResult {
  std::vector<GridField> values;
  FlowMap flow;
};

/// Solves a_t + u a_x = a f (or a_t + (a u)_x = a f when conservative) on the given time grid:
/// RK2 characteristic feet, cubic interpolation at the foot and the trapezoid rule for f along
/// the characteristic inside an exponential factor.
TransportResult transport_with_source(const GridField& a0, std::span<const GridField> u,
                                      std::span<const GridField> f, std::span<const double> times,
                                      bool conservative);

struct PicardSlab {
  double t0 = 0.0;
  double t1 = 0.0;
  int iterations = 0;
  double final_diff = 0.0;
  std::vector<double> ratios;
};

struct PicardOptions {
  /// Multiplies Pt(rho) - pi in both sources.
  double rate = 1.0;
  double tol = 1e-10;
  int max_iter = 50;
  double lower = 0.0;
  double upper = 0.0;
};

struct PicardResult {
  std::vector<GridField> alpha;
  std::vector<GridField> rho;
  std::vector<PicardSlab> slabs;
};

/// Fixed-point iteration (alpha, rho) <- L(NL(alpha, rho)) with f = rate (Pt(rho) - pi) and
/// g = rate (pi - Pt(rho)), halving the slab whenever the iteration fails to contract.
/// Throws ConvergenceError when a single step does not converge, BoundsError when the output
/// has negative alpha or rho outside [lower, upper].
PicardResult picard_bn(const GridField& alpha0, const GridField& rho0, std::span<const GridField> u,
                       std::span<const GridField> pi, std::span<const double> times,
                       const EquationOfState& eos, const PicardOptions& opt);

struct TwoPhasePicardResult {
  std::vector<GridField> alpha_p;
  std::vector<GridField> alpha_m;
  std::vector<GridField> rho_p;
  std::vector<GridField> rho_m;
  std::vector<PicardSlab> slabs;
  int outer_passes = 0;
  double pi_change = 0.0;
};

/// Both phases through picard_bn with rate 1/mu and pi = Pbar from the previous outer pass.
TwoPhasePicardResult picard_two_phase(const BNState& initial, std::span<const GridField> u,
                                      std::span<const double> times, const PhysicalParams& p,
                                      PicardOptions opt, int max_outer = 20);

}  // namespace phasekit
