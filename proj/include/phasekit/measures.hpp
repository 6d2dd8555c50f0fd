#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "phasekit/state.hpp"

namespace phasekit {

struct Atom {
  double x;
  double xi;
  double weight;
};

enum class MeasureKind { empirical, two_dirac };

/// Parametrized measure on T x R stored as weighted atoms, grouped node by node.
class ParamMeasure {
 public:
  ParamMeasure(MeasureKind kind, std::vector<Atom> atoms, std::size_t atoms_per_node, double xi_lo, double xi_hi);

  MeasureKind kind() const noexcept { return kind_; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t atoms_per_node() const noexcept { return per_node_; }
  std::size_t nodes() const noexcept { return atoms_.size() / per_node_; }
  double xi_lo() const noexcept { return xi_lo_; }
  double xi_hi() const noexcept { return xi_hi_; }
  double total_mass() const noexcept;

 private:
  MeasureKind kind_;
  std::vector<Atom> atoms_;
  std::size_t per_node_;
  double xi_lo_;
  double xi_hi_;
};

/// One atom rho_i of weight h at each node. Throws DomainError outside [xi_lo, xi_hi].
ParamMeasure empirical_from_state(const GridField& rho, double xi_lo, double xi_hi);

/// Atoms (rho_p, h alpha_p) and (rho_m, h alpha_m) at each node.
ParamMeasure two_dirac_from_bn(const BNState& s, double xi_lo, double xi_hi);

using TestFn = std::function<double(double x, double xi)>;

double pair(const ParamMeasure& m, const TestFn& b);

/// x-factors 1, cos(2 pi m x), sin(2 pi m x) for m <= max_mode times (xi / xi_hi)^k for k <= max_power,
/// x-factor major.
class TestDictionary {
 public:
  TestDictionary(int max_mode, int max_power, double xi_hi);

  std::size_t size() const noexcept;
  double operator()(std::size_t j, double x, double xi) const;
  std::string label(std::size_t j) const;
  int max_mode() const noexcept { return max_mode_; }
  int max_power() const noexcept { return max_power_; }

 private:
  int max_mode_;
  int max_power_;
  double xi_hi_;
};

/// Pairings of m against every dictionary entry, in dictionary order.
std::vector<double> pairings(const ParamMeasure& m, const TestDictionary& dict);

/// max_j |<m1, b_j> - <m2, b_j>|.
double distance(const ParamMeasure& m1, const ParamMeasure& m2, const TestDictionary& dict);

/// Wasserstein-1 distance between two finite measures on R of equal mass.
double wasserstein_1d(std::vector<std::pair<double, double>> a, std::vector<std::pair<double, double>> b);

/// x-average of the per-node Wasserstein-1 distance between the conditional measures.
/// Requires both measures on the same nodes.
double wasserstein_average(const ParamMeasure& m1, const ParamMeasure& m2);

/// Smooth test function phi(t, x, xi) with its partial derivatives.
struct KineticTestFunction {
  std::string name;
  std::function<double(double, double, double)> phi;
  std::function<double(double, double, double)> phi_t;
  std::function<double(double, double, double)> phi_x;
  std::function<double(double, double, double)> phi_xi;
};

/// phi = sin^2(pi (t - t0) / (t1 - t0)) X(x) Xi(xi) for X in {1, cos 2 pi x, sin 2 pi x} and
/// Xi in {xi / xi_hi, (xi / xi_hi)^2}.
std::vector<KineticTestFunction> smoke_test_functions(double t0, double t1, double xi_hi);

/// Trapezoid-in-time weak residual
///   int sum_atoms w [phi_t + u phi_x - xi (Sigma + Pt(xi)) phi_xi / mu + (Sigma + Pt(xi)) phi / mu] dt
/// with u and Sigma taken at the atom's node.
double kinetic_residual(std::span<const ParamMeasure> measures, std::span<const GridField> u,
                        std::span<const GridField> sigma, std::span<const double> times,
                        const KineticTestFunction& phi, double mu, const EquationOfState& eos);

}  // namespace phasekit
