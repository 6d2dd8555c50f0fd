#include "phasekit/state.hpp"

#include <cmath>

#include "phasekit/error.hpp"

namespace phasekit {

PhysicalParams::PhysicalParams(double mu_, double kappa_, EquationOfState eos_)
    : mu(mu_), kappa(kappa_), gamma(eos_.gamma()), eos(std::move(eos_)) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("mu must be > 0");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be > 0");
  if (!(gamma > 0.0)) throw DomainError("gamma must be > 0 for the non-local model");
}

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw DomainError("dt must be > 0");
  if (!(t_end > 0.0)) throw DomainError("t_end must be > 0");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw DomainError("cfl must lie in (0, 1]");
  if (!(lower > 0.0 && lower < upper)) throw DomainError("guard rails need 0 < lower < upper");
  if (snapshot_every < 0) throw DomainError("snapshot_every must be >= 0");
  if (!(snapshot_dt >= 0.0)) throw DomainError("snapshot_dt must be >= 0");
  if (!(scheme.upwind >= 0.0)) throw DomainError("upwind coefficient must be >= 0");
}

MixtureFields mixture_fields(const BNState& s, const EquationOfState& eos) {
  const std::size_t n = s.rho_p.size();
  MixtureFields out{GridField(s.rho_p.grid()), GridField(s.rho_p.grid())};
  for (std::size_t i = 0; i < n; ++i) {
    const double ap = s.alpha_p[i];
    const double am = s.alpha_m[i];
    out.rho[i] = ap * s.rho_p[i] + am * s.rho_m[i];
    out.p_bar[i] = ap * eos.artificial_pressure(s.rho_p[i]) + am * eos.artificial_pressure(s.rho_m[i]);
  }
  return out;
}

FluidState make_fluid_state(double t, GridField rho, GridField u, const PhysicalParams& params,
                            HelmholtzBackend backend) {
  if (!(rho.grid() == u.grid())) throw DomainError("rho and u live on different grids");
  require_finite(rho, "rho");
  require_finite(u, "u");
  if (!(rho.min() > 0.0)) throw DomainError("rho must be strictly positive");
  GridField c = helmholtz_solve(rho, params.kappa, params.gamma, backend);
  return FluidState{t, std::move(rho), std::move(u), std::move(c)};
}

BNState make_bn_state(double t, GridField alpha_p, GridField rho_p, GridField rho_m, GridField u,
                      const PhysicalParams& params, HelmholtzBackend backend) {
  const auto& g = alpha_p.grid();
  if (!(rho_p.grid() == g && rho_m.grid() == g && u.grid() == g)) {
    throw DomainError("BN fields live on different grids");
  }
  for (const auto* f : {&alpha_p, &rho_p, &rho_m, &u}) require_finite(*f, "BN field");
  if (alpha_p.min() < 0.0 || alpha_p.max() > 1.0) throw DomainError("alpha_p must lie in [0, 1]");
  if (!(rho_p.min() > 0.0 && rho_m.min() > 0.0)) throw DomainError("phase densities must be > 0");
  GridField alpha_m = alpha_p.map([](double a) { return 1.0 - a; });
  GridField mix = hadamard(alpha_p, rho_p) + hadamard(alpha_m, rho_m);
  GridField c = helmholtz_solve(mix, params.kappa, params.gamma, backend);
  return BNState{t, std::move(alpha_p), std::move(alpha_m), std::move(rho_p), std::move(rho_m), std::move(u),
                 std::move(c)};
}

}  // namespace phasekit
