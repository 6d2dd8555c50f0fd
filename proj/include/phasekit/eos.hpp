#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>

namespace phasekit {

/// P(r) = R T r / (B - r) - A r^2 on [0, B).
struct VanDerWaals {
  double A;
  double B;
  double R;
  double T_star;
};

/// P(r) = a r^beta, beta >= 2.
struct Polytropic {
  double a;
  double beta;
};

using PressureLaw = std::variant<VanDerWaals, Polytropic>;

/// A pressure law together with the coupling coefficient gamma that defines the artificial
/// pressure Pt(r) = P(r) + gamma/2 r^2. All evaluations throw DomainError outside [0, domain_max).
class EquationOfState {
 public:
  EquationOfState(PressureLaw law, double gamma);

  static EquationOfState van_der_waals(double A, double B, double R, double T_star, double gamma) {
    return EquationOfState(VanDerWaals{A, B, R, T_star}, gamma);
  }
  static EquationOfState polytropic(double a, double beta, double gamma) {
    return EquationOfState(Polytropic{a, beta}, gamma);
  }

  const PressureLaw& law() const noexcept { return law_; }
  double gamma() const noexcept { return gamma_; }
  /// B for van der Waals, +infinity for polytropic laws.
  double domain_max() const noexcept;
  std::string name() const;

  double pressure(double r) const;
  double d_pressure(double r) const;
  double artificial_pressure(double r) const;
  double d_artificial_pressure(double r) const;

  /// Pressure potential W(r) = r * int_{r_ref}^r P(s)/s^2 ds, so that W''(r) r = P'(r) and
  /// W(r_ref) = 0. Requires r > 0.
  double potential(double r) const;
  /// Same integral evaluated by adaptive Simpson quadrature (absolute tolerance 1e-10).
  double potential_by_quadrature(double r) const;
  /// Gauge point of W: 1 when 1 lies inside the domain, B/2 otherwise.
  double reference_density() const noexcept;

 private:
  void require_in_domain(double r) const;

  PressureLaw law_;
  double gamma_;
};

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

struct SpinodalInterval {
  double lower;
  double upper;
};

struct AdmissibilityReport {
  bool admissible = false;
  double min_artificial_slope = 0.0;
  std::optional<SpinodalInterval> spinodal;
  double scan_lo = 0.0;
  double scan_hi = 0.0;
};

/// Scans Pt' on 10^4 uniform samples of [r_lo, r_hi] (r_hi clipped 1e-6 below B for van der
/// Waals), reports the minimum slope and, when P' changes sign, the spinodal interval refined
/// by bisection to 1e-10.
AdmissibilityReport check_admissibility(const EquationOfState& eos, double r_lo, double r_hi);

/// Empirical constant sup r^2 / (1 + W(r)) over (0, r_hi]; infinity when 1 + W <= 0 somewhere.
double quadratic_growth_constant(const EquationOfState& eos, double r_hi, int samples = 1000);

}  // namespace phasekit
