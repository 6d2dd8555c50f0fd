#include "phasekit/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "phasekit/error.hpp"

namespace phasekit {

namespace {

void require_positive(const GridField& rho) {
  if (!(rho.min() > 0.0)) throw DomainError("diagnostics need a strictly positive density");
}

// h * sum of gamma/2 (rho - c)^2 + kappa/2 (c_x)^2
double order_parameter_energy(const GridField& rho, const GridField& c, const PhysicalParams& p, Backend b) {
  const GridField cx = derivative(c, 1, b);
  const double h = rho.grid().spacing();
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double d = rho[i] - c[i];
    sum += 0.5 * p.gamma * d * d + 0.5 * p.kappa * cx[i] * cx[i];
  }
  return h * sum;
}

}  // namespace

double energy(const FluidState& s, const PhysicalParams& p, Backend b) {
  require_positive(s.rho);
  const double h = s.rho.grid().spacing();
  double sum = 0.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    sum += 0.5 * s.rho[i] * s.u[i] * s.u[i] + p.eos.potential(s.rho[i]);
  }
  return h * sum + order_parameter_energy(s.rho, s.c, p, b);
}

double dissipation(const FluidState& s, const PhysicalParams& p, Backend b) {
  const GridField ux = derivative(s.u, 1, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < ux.size(); ++i) sum += ux[i] * ux[i];
  return p.mu * s.u.grid().spacing() * sum;
}

double bd_entropy(const FluidState& s, const PhysicalParams& p, Backend b) {
  require_positive(s.rho);
  const GridField rx = derivative(s.rho, 1, b);
  const double h = s.rho.grid().spacing();
  double sum = 0.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    const double r = s.rho[i];
    const double w = s.u[i] + p.mu * rx[i] / (r * r);
    sum += 0.5 * r * w * w + p.eos.potential(r);
  }
  return h * sum + order_parameter_energy(s.rho, s.c, p, b);
}

double energy(const BNState& s, const PhysicalParams& p, Backend b) {
  const auto mix = mixture_fields(s, p.eos);
  require_positive(mix.rho);
  const double h = s.u.grid().spacing();
  double sum = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    sum += 0.5 * mix.rho[i] * s.u[i] * s.u[i];
    if (s.alpha_p[i] > 0.0) sum += s.alpha_p[i] * p.eos.potential(s.rho_p[i]);
    if (s.alpha_m[i] > 0.0) sum += s.alpha_m[i] * p.eos.potential(s.rho_m[i]);
  }
  return h * sum + order_parameter_energy(mix.rho, s.c, p, b);
}

double dissipation(const BNState& s, const PhysicalParams& p, Backend b) {
  const GridField ux = derivative(s.u, 1, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < ux.size(); ++i) sum += ux[i] * ux[i];
  return p.mu * s.u.grid().spacing() * sum;
}

GridField effective_viscous_flux(const FluidState& s, const PhysicalParams& p, Backend b) {
  GridField sigma = derivative(s.u, 1, b) * p.mu;
  for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] -= p.eos.artificial_pressure(s.rho[i]);
  return sigma;
}

GridField effective_viscous_flux(const BNState& s, const PhysicalParams& p, Backend b) {
  return derivative(s.u, 1, b) * p.mu - mixture_fields(s, p.eos).p_bar;
}

namespace {

DiagnosticsRecord spectral_norms(DiagnosticsRecord r, const GridField& rho, const GridField& c,
                                 const GridField& sigma) {
  r.sigma_grad_l2 = l2_norm(derivative(sigma, 1, Backend::spectral));
  r.c_h2 = sobolev_norm(c, 2);
  r.inv_sqrt_rho_grad =
      l2_norm(derivative(rho.map([](double v) { return 1.0 / std::sqrt(v); }), 1, Backend::spectral));
  r.c_grad_max = derivative(c, 1, Backend::spectral).max_abs();
  return r;
}

}  // namespace

DiagnosticsRecord diagnose(const FluidState& s, const PhysicalParams& p) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.mass = mean(s.rho);
  r.momentum = mean(hadamard(s.rho, s.u));
  r.energy = energy(s, p);
  r.dissipation = dissipation(s, p);
  r.bd_entropy = bd_entropy(s, p);
  r.rho_min = s.rho.min();
  r.rho_max = s.rho.max();
  return spectral_norms(r, s.rho, s.c, effective_viscous_flux(s, p, Backend::spectral));
}

DiagnosticsRecord diagnose(const BNState& s, const PhysicalParams& p) {
  const auto mix = mixture_fields(s, p.eos);
  DiagnosticsRecord r;
  r.t = s.t;
  r.mass = mean(mix.rho);
  r.momentum = mean(hadamard(mix.rho, s.u));
  r.energy = energy(s, p);
  r.dissipation = dissipation(s, p);
  r.bd_entropy = bd_entropy(FluidState{s.t, mix.rho, s.u, s.c}, p);
  r.rho_min = std::min(s.rho_p.min(), s.rho_m.min());
  r.rho_max = std::max(s.rho_p.max(), s.rho_m.max());
  return spectral_norms(r, mix.rho, s.c, effective_viscous_flux(s, p, Backend::spectral));
}

double bd_identity_gap(const GridField& rho, double mu, Backend b) {
  require_positive(rho);
  const GridField dphi = derivative(rho.map([mu](double r) { return mu * (1.0 - 1.0 / r); }), 1, b);
  const GridField dinv = derivative(rho.map([](double r) { return 1.0 / std::sqrt(r); }), 1, b);
  double gap = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double lhs = rho[i] * dphi[i] * dphi[i];
    const double rhs = 4.0 * mu * mu * dinv[i] * dinv[i];
    gap = std::max(gap, std::abs(lhs - rhs));
  }
  return gap;
}

BalanceReport balance_check(const std::vector<DiagnosticsRecord>& records, const BalanceTolerances& tol,
                            std::optional<double> gamma) {
  if (records.size() < 2) throw DomainError("balance_check needs at least two records");
  BalanceReport rep;
  const auto& first = records.front();
  rep.energy0 = first.energy;
  double dissipated = 0.0;
  double c_grad_sup = 0.0;
  for (const auto& r : records) c_grad_sup = std::max(c_grad_sup, r.c_grad_max);
  double worst_ratio = 0.0;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    if (k > 0) {
      const auto& q = records[k - 1];
      const double dt = r.t - q.t;
      dissipated += 0.5 * dt * (r.dissipation + q.dissipation);
      rep.sigma_grad_l2l2 += 0.5 * dt * (r.sigma_grad_l2 * r.sigma_grad_l2 + q.sigma_grad_l2 * q.sigma_grad_l2);
    }
    rep.mass_drift = std::max(rep.mass_drift, std::abs(r.mass - first.mass));
    rep.momentum_drift = std::max(rep.momentum_drift, std::abs(r.momentum - first.momentum));
    const double resid = std::abs(r.energy - first.energy + dissipated);
    rep.energy_residual = std::max(rep.energy_residual, resid);
    rep.energy_residual_final = resid;
    rep.max_bd_entropy = std::max(rep.max_bd_entropy, r.bd_entropy);
    if (gamma) {
      const double env = (first.bd_entropy + 0.5 * first.mass) * std::exp(4.0 * *gamma * c_grad_sup * (r.t - first.t));
      if (env > 0.0) worst_ratio = std::max(worst_ratio, r.bd_entropy / env);
      else worst_ratio = std::max(worst_ratio, r.bd_entropy > env ? INFINITY : 0.0);
    }
  }
  rep.mass_ok = rep.mass_drift <= tol.mass;
  rep.momentum_ok = rep.momentum_drift <= tol.momentum;
  rep.energy_ok = rep.energy_residual <= tol.energy * std::abs(rep.energy0);
  if (gamma) {
    rep.envelope_ratio = worst_ratio;
    rep.envelope_ok = worst_ratio <= 1.0;
  }
  rep.passed = rep.mass_ok && rep.momentum_ok && rep.energy_ok && rep.envelope_ok;
  return rep;
}

}  // namespace phasekit
