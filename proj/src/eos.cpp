#include "phasekit/eos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "phasekit/error.hpp"

namespace phasekit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double vdw_margin = 1e-6;
constexpr int admissibility_samples = 10000;
constexpr double bisection_tol = 1e-10;

double simpson_step(const std::function<double(double)>& f, double a, double fa, double b,
                    double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double bisect_root(const std::function<double(double)>& g, double lo, double hi) {
  double glo = g(lo);
  while (hi - lo > bisection_tol) {
    const double mid = 0.5 * (lo + hi);
    const double gmid = g(mid);
    if ((gmid < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

EquationOfState::EquationOfState(PressureLaw law, double gamma) : law_(law), gamma_(gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("eos: gamma must be >= 0");
  std::visit(overloaded{
                 [](const VanDerWaals& v) {
                   if (!(v.A > 0 && v.B > 0 && v.R > 0 && v.T_star > 0)) {
                     throw DomainError("van der Waals coefficients A, B, R, T_star must be > 0");
                   }
                 },
                 [](const Polytropic& p) {
                   if (!(p.a > 0)) throw DomainError("polytropic coefficient a must be > 0");
                   if (!(p.beta >= 2.0)) throw DomainError("polytropic exponent beta must be >= 2");
                 },
             },
             law_);
}

double EquationOfState::domain_max() const noexcept {
  return std::visit(overloaded{
                        [](const VanDerWaals& v) { return v.B; },
                        [](const Polytropic&) { return std::numeric_limits<double>::infinity(); },
                    },
                    law_);
}

std::string EquationOfState::name() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const VanDerWaals& v) {
                   os << "van_der_waals(A=" << v.A << ", B=" << v.B << ", R=" << v.R
                      << ", T_star=" << v.T_star << ")";
                 },
                 [&](const Polytropic& p) { os << "polytropic(a=" << p.a << ", beta=" << p.beta << ")"; },
             },
             law_);
  os << " gamma=" << gamma_;
  return os.str();
}

void EquationOfState::require_in_domain(double r) const {
  if (!(r >= 0.0) || !(r < domain_max())) {
    std::ostringstream os;
    os << "density " << r << " outside the domain [0, " << domain_max() << ") of " << name();
    throw DomainError(os.str());
  }
}

double EquationOfState::pressure(double r) const {
  require_in_domain(r);
  return std::visit(overloaded{
                        [r](const VanDerWaals& v) { return v.R * v.T_star * r / (v.B - r) - v.A * r * r; },
                        [r](const Polytropic& p) { return p.a * std::pow(r, p.beta); },
                    },
                    law_);
}

double EquationOfState::d_pressure(double r) const {
  require_in_domain(r);
  return std::visit(overloaded{
                        [r](const VanDerWaals& v) {
                          const double d = v.B - r;
                          return v.B * v.R * v.T_star / (d * d) - 2.0 * v.A * r;
                        },
                        [r](const Polytropic& p) { return p.a * p.beta * std::pow(r, p.beta - 1.0); },
                    },
                    law_);
}

double EquationOfState::artificial_pressure(double r) const {
  return pressure(r) + 0.5 * gamma_ * r * r;
}

double EquationOfState::d_artificial_pressure(double r) const { return d_pressure(r) + gamma_ * r; }

double EquationOfState::reference_density() const noexcept {
  const double bmax = domain_max();
  return 1.0 < bmax ? 1.0 : 0.5 * bmax;
}

double EquationOfState::potential(double r) const {
  require_in_domain(r);
  if (!(r > 0.0)) throw DomainError("pressure potential needs r > 0");
  const double r0 = reference_density();
  const double inner = std::visit(
      overloaded{
          [&](const VanDerWaals& v) {
            const double coef = v.R * v.T_star / v.B;
            return coef * (std::log(r / (v.B - r)) - std::log(r0 / (v.B - r0))) - v.A * (r - r0);
          },
          [&](const Polytropic& p) {
            return p.a * (std::pow(r, p.beta - 1.0) - std::pow(r0, p.beta - 1.0)) / (p.beta - 1.0);
          },
      },
      law_);
  return r * inner;
}

double EquationOfState::potential_by_quadrature(double r) const {
  require_in_domain(r);
  if (!(r > 0.0)) throw DomainError("pressure potential needs r > 0");
  const double r0 = reference_density();
  const auto integrand = [this](double s) { return pressure(s) / (s * s); };
  return r * adaptive_simpson(integrand, r0, r, 1e-10);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, fa, b, fb, m, fm, whole, tol, 50);
}

AdmissibilityReport check_admissibility(const EquationOfState& eos, double r_lo, double r_hi) {
  const double bmax = eos.domain_max();
  if (!(r_lo >= 0.0) || !(r_hi > r_lo) || !(r_hi <= bmax) || !std::isfinite(r_hi)) {
    std::ostringstream os;
    os << "invalid admissibility interval [" << r_lo << ", " << r_hi << "] for " << eos.name();
    throw DomainError(os.str());
  }
  if (std::holds_alternative<VanDerWaals>(eos.law())) r_hi = std::min(r_hi, bmax - vdw_margin);
  if (!(r_hi > r_lo)) throw DomainError("admissibility interval empty after clipping");

  AdmissibilityReport report;
  report.scan_lo = r_lo;
  report.scan_hi = r_hi;
  report.min_artificial_slope = std::numeric_limits<double>::infinity();

  const auto slope = [&eos](double r) { return eos.d_pressure(r); };
  const double step = (r_hi - r_lo) / (admissibility_samples - 1);
  double prev_r = r_lo;
  double prev_slope = slope(r_lo);
  std::optional<double> falling;
  for (int j = 0; j < admissibility_samples; ++j) {
    const double r = j == admissibility_samples - 1 ? r_hi : r_lo + j * step;
    report.min_artificial_slope = std::min(report.min_artificial_slope, eos.d_artificial_pressure(r));
    const double s = slope(r);
    if (j > 0 && !report.spinodal) {
      if (prev_slope >= 0.0 && s < 0.0 && !falling) {
        falling = bisect_root(slope, prev_r, r);
      } else if (prev_slope < 0.0 && s >= 0.0 && falling) {
        report.spinodal = SpinodalInterval{*falling, bisect_root(slope, prev_r, r)};
      }
    }
    prev_r = r;
    prev_slope = s;
  }
  // Decreasing branch reaching the end of the scan: report up to the scan boundary.
  if (falling && !report.spinodal) report.spinodal = SpinodalInterval{*falling, r_hi};
  report.admissible = report.min_artificial_slope >= 0.0;
  return report;
}

double quadratic_growth_constant(const EquationOfState& eos, double r_hi, int samples) {
  double sup = 0.0;
  for (int j = 1; j <= samples; ++j) {
    const double r = r_hi * static_cast<double>(j) / samples;
    const double denom = 1.0 + eos.potential(r);
    if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
    sup = std::max(sup, r * r / denom);
  }
  return sup;
}

}  // namespace phasekit
