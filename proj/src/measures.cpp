#include "phasekit/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "phasekit/error.hpp"

namespace phasekit {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double mass_tol = 1e-12;
}  // namespace

ParamMeasure::ParamMeasure(MeasureKind kind, std::vector<Atom> atoms, std::size_t atoms_per_node, double xi_lo,
                           double xi_hi)
    : kind_(kind), atoms_(std::move(atoms)), per_node_(atoms_per_node), xi_lo_(xi_lo), xi_hi_(xi_hi) {
  if (per_node_ == 0 || atoms_.empty() || atoms_.size() % per_node_ != 0) {
    throw DomainError("measure atoms must come in whole nodes");
  }
  if (!(xi_lo_ < xi_hi_)) throw DomainError("measure support box must be a nonempty interval");
  for (const auto& a : atoms_) {
    if (!std::isfinite(a.xi) || !std::isfinite(a.weight) || a.weight < 0.0) {
      throw DomainError("measure atoms must be finite with nonnegative weight");
    }
    if (a.weight > 0.0 && (a.xi < xi_lo_ || a.xi > xi_hi_)) {
      std::ostringstream os;
      os << "atom at xi = " << a.xi << " outside the support box [" << xi_lo_ << ", " << xi_hi_ << "]";
      throw DomainError(os.str());
    }
  }
  if (std::abs(total_mass() - 1.0) > mass_tol) {
    std::ostringstream os;
    os << "measure mass " << total_mass() << " differs from 1";
    throw DomainError(os.str());
  }
}

double ParamMeasure::total_mass() const noexcept {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight;
  return s;
}

ParamMeasure empirical_from_state(const GridField& rho, double xi_lo, double xi_hi) {
  const auto& g = rho.grid();
  std::vector<Atom> atoms;
  atoms.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) atoms.push_back({g.node(i), rho[i], g.spacing()});
  return ParamMeasure(MeasureKind::empirical, std::move(atoms), 1, xi_lo, xi_hi);
}

ParamMeasure two_dirac_from_bn(const BNState& s, double xi_lo, double xi_hi) {
  const auto& g = s.u.grid();
  std::vector<Atom> atoms;
  atoms.reserve(2 * g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    atoms.push_back({g.node(i), s.rho_p[i], g.spacing() * s.alpha_p[i]});
    atoms.push_back({g.node(i), s.rho_m[i], g.spacing() * s.alpha_m[i]});
  }
  return ParamMeasure(MeasureKind::two_dirac, std::move(atoms), 2, xi_lo, xi_hi);
}

double pair(const ParamMeasure& m, const TestFn& b) {
  double s = 0.0;
  for (const auto& a : m.atoms()) s += a.weight * b(a.x, a.xi);
  return s;
}

TestDictionary::TestDictionary(int max_mode, int max_power, double xi_hi)
    : max_mode_(max_mode), max_power_(max_power), xi_hi_(xi_hi) {
  if (max_mode < 0 || max_power < 0) throw DomainError("dictionary sizes must be >= 0");
  if (!(xi_hi > 0.0)) throw DomainError("dictionary normalization needs xi_hi > 0");
}

std::size_t TestDictionary::size() const noexcept {
  return static_cast<std::size_t>(2 * max_mode_ + 1) * static_cast<std::size_t>(max_power_ + 1);
}

double TestDictionary::operator()(std::size_t j, double x, double xi) const {
  const std::size_t powers = static_cast<std::size_t>(max_power_ + 1);
  const std::size_t xf = j / powers;
  const int k = static_cast<int>(j % powers);
  double xv = 1.0;
  if (xf > 0) {
    const double m = static_cast<double>((xf + 1) / 2);
    xv = xf % 2 == 1 ? std::cos(two_pi * m * x) : std::sin(two_pi * m * x);
  }
  return xv * std::pow(xi / xi_hi_, k);
}

std::string TestDictionary::label(std::size_t j) const {
  const std::size_t powers = static_cast<std::size_t>(max_power_ + 1);
  const std::size_t xf = j / powers;
  std::ostringstream os;
  if (xf == 0) os << "1";
  else os << (xf % 2 == 1 ? "cos" : "sin") << (xf + 1) / 2;
  os << "_xi" << j % powers;
  return os.str();
}

std::vector<double> pairings(const ParamMeasure& m, const TestDictionary& dict) {
  std::vector<double> out(dict.size());
  for (std::size_t j = 0; j < dict.size(); ++j) out[j] = pair(m, [&](double x, double xi) { return dict(j, x, xi); });
  return out;
}

double distance(const ParamMeasure& m1, const ParamMeasure& m2, const TestDictionary& dict) {
  if (dict.size() == 0) throw DomainError("distance needs a nonempty dictionary");
  if (m1.xi_lo() != m2.xi_lo() || m1.xi_hi() != m2.xi_hi()) throw DomainError("measures have different support boxes");
  const auto a = pairings(m1, dict);
  const auto b = pairings(m2, dict);
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

double wasserstein_1d(std::vector<std::pair<double, double>> a, std::vector<std::pair<double, double>> b) {
  // Integrate |F_a - F_b| over the merged breakpoints.
  std::vector<std::pair<double, double>> events;
  events.reserve(a.size() + b.size());
  for (const auto& [x, w] : a) events.emplace_back(x, w);
  for (const auto& [x, w] : b) events.emplace_back(x, -w);
  std::sort(events.begin(), events.end());
  double cdf_gap = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < events.size(); ++k) {
    cdf_gap += events[k].second;
    total += std::abs(cdf_gap) * (events[k + 1].first - events[k].first);
  }
  return total;
}

double wasserstein_average(const ParamMeasure& m1, const ParamMeasure& m2) {
  if (m1.nodes() != m2.nodes()) throw DomainError("wasserstein_average needs measures on the same nodes");
  const auto a = m1.atoms();
  const auto b = m2.atoms();
  const std::size_t pa = m1.atoms_per_node();
  const std::size_t pb = m2.atoms_per_node();
  double total = 0.0;
  for (std::size_t i = 0; i < m1.nodes(); ++i) {
    std::vector<std::pair<double, double>> ca, cb;
    double wa = 0.0, wb = 0.0;
    for (std::size_t k = 0; k < pa; ++k) {
      ca.emplace_back(a[i * pa + k].xi, a[i * pa + k].weight);
      wa += a[i * pa + k].weight;
    }
    for (std::size_t k = 0; k < pb; ++k) {
      cb.emplace_back(b[i * pb + k].xi, b[i * pb + k].weight);
      wb += b[i * pb + k].weight;
    }
    if (wa <= 0.0 || wb <= 0.0) continue;
    // Conditional measures are probability measures; the node weight h multiplies the result.
    for (auto& e : ca) e.second /= wa;
    for (auto& e : cb) e.second /= wb;
    total += 0.5 * (wa + wb) * wasserstein_1d(std::move(ca), std::move(cb));
  }
  return total;
}

std::vector<KineticTestFunction> smoke_test_functions(double t0, double t1, double xi_hi) {
  if (!(t1 > t0)) throw DomainError("smoke test window must have t1 > t0");
  const double T = t1 - t0;
  const double w = std::numbers::pi / T;
  auto psi = [=](double t) {
    const double s = std::sin(w * (t - t0));
    return s * s;
  };
  auto dpsi = [=](double t) { return w * std::sin(2.0 * w * (t - t0)); };

  struct Factor {
    std::string name;
    std::function<double(double)> f;
    std::function<double(double)> df;
  };
  const std::vector<Factor> xs{
      {"1", [](double) { return 1.0; }, [](double) { return 0.0; }},
      {"cos1", [](double x) { return std::cos(two_pi * x); }, [](double x) { return -two_pi * std::sin(two_pi * x); }},
      {"sin1", [](double x) { return std::sin(two_pi * x); }, [](double x) { return two_pi * std::cos(two_pi * x); }},
  };
  const std::vector<Factor> xis{
      {"xi1", [=](double xi) { return xi / xi_hi; }, [=](double) { return 1.0 / xi_hi; }},
      {"xi2", [=](double xi) { return xi * xi / (xi_hi * xi_hi); }, [=](double xi) { return 2.0 * xi / (xi_hi * xi_hi); }},
  };
  std::vector<KineticTestFunction> out;
  for (const auto& X : xs) {
    for (const auto& Xi : xis) {
      KineticTestFunction k;
      k.name = X.name + "_" + Xi.name;
      k.phi = [=](double t, double x, double xi) { return psi(t) * X.f(x) * Xi.f(xi); };
      k.phi_t = [=](double t, double x, double xi) { return dpsi(t) * X.f(x) * Xi.f(xi); };
      k.phi_x = [=](double t, double x, double xi) { return psi(t) * X.df(x) * Xi.f(xi); };
      k.phi_xi = [=](double t, double x, double xi) { return psi(t) * X.f(x) * Xi.df(xi); };
      out.push_back(std::move(k));
    }
  }
  return out;
}

double kinetic_residual(std::span<const ParamMeasure> measures, std::span<const GridField> u,
                        std::span<const GridField> sigma, std::span<const double> times,
                        const KineticTestFunction& phi, double mu, const EquationOfState& eos) {
  const std::size_t n = times.size();
  if (n < 2 || measures.size() != n || u.size() != n || sigma.size() != n) {
    throw DomainError("kinetic_residual: trajectories must share one time grid of length >= 2");
  }
  std::vector<double> slice(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = times[k];
    const auto& m = measures[k];
    if (m.nodes() != u[k].size() || m.nodes() != sigma[k].size()) {
      throw DomainError("kinetic_residual: measure and fields live on different grids");
    }
    const std::size_t per = m.atoms_per_node();
    double s = 0.0;
    const auto atoms = m.atoms();
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      const auto& at = atoms[a];
      if (at.weight == 0.0) continue;
      const std::size_t i = a / per;
      const double drive = (sigma[k][i] + eos.artificial_pressure(at.xi)) / mu;
      const double integrand = phi.phi_t(t, at.x, at.xi) + u[k][i] * phi.phi_x(t, at.x, at.xi) -
                               at.xi * drive * phi.phi_xi(t, at.x, at.xi) + drive * phi.phi(t, at.x, at.xi);
      s += at.weight * integrand;
    }
    slice[k] = s;
  }
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) total += 0.5 * (times[k + 1] - times[k]) * (slice[k] + slice[k + 1]);
  return total;
}

}  // namespace phasekit
