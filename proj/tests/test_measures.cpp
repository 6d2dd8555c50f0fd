#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "phasekit/diagnostics.hpp"
#include "phasekit/error.hpp"
#include "phasekit/measures.hpp"

using namespace phasekit;

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

PhysicalParams poly_params() { return PhysicalParams(0.1, 0.1, EquationOfState::polytropic(1, 2, 1.0)); }

BNState constant_bn(const PeriodicGrid& g, double ap, double rp, double rm) {
  return make_bn_state(0.0, GridField(g, ap), GridField(g, rp), GridField(g, rm), GridField(g, 0.0), poly_params());
}

ParamMeasure random_measure(const PeriodicGrid& g, std::mt19937& gen) {
  std::uniform_real_distribution<double> d(0.5, 3.0);
  return empirical_from_state(GridField::from_function(g, [&](double) { return d(gen); }), 0.25, 4.0);
}
}  // namespace

TEST_CASE("empirical measure pairings") {
  PeriodicGrid g(64);
  auto rho = GridField::from_function(g, [](double x) { return 1.5 + 0.3 * std::sin(two_pi * x); });
  auto m = empirical_from_state(rho, 0.25, 4.0);
  CHECK(m.nodes() == 64);
  CHECK(pair(m, [](double, double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(pair(m, [](double, double xi) { return xi; }) - mean(rho)) <= 1e-12);

  auto two = GridField::from_function(g, [](double x) { return x < 0.5 ? 1.0 : 2.0; });
  auto m2 = empirical_from_state(two, 0.25, 4.0);
  CHECK(std::abs(pair(m2, [](double, double xi) { return xi * xi; }) - 2.5) <= 1e-12);
}

TEST_CASE("empirical measure rejects atoms outside the support box") {
  PeriodicGrid g(16);
  CHECK_THROWS_AS(empirical_from_state(GridField(g, 5.0), 0.25, 4.0), DomainError);
  CHECK_THROWS_AS(empirical_from_state(GridField(g, 0.1), 0.25, 4.0), DomainError);
}

TEST_CASE("two-Dirac measure") {
  PeriodicGrid g(32);
  auto half = constant_bn(g, 0.5, 2.0, 1.0);
  auto m = two_dirac_from_bn(half, 0.25, 4.0);
  CHECK(m.atoms_per_node() == 2);
  CHECK(std::abs(pair(m, [](double, double xi) { return xi; }) - 1.5) <= 1e-12);
  CHECK(std::abs(pair(m, [](double, double) { return 1.0; }) - 1.0) <= 1e-12);

  // Pure phase: identical to the empirical measure of rho_+ under every dictionary entry.
  auto rho = GridField::from_function(g, [](double x) { return 1.2 + 0.4 * std::cos(two_pi * x); });
  auto pure = make_bn_state(0.0, GridField(g, 1.0), rho, rho, GridField(g, 0.0), poly_params());
  TestDictionary dict(4, 4, 4.0);
  CHECK(distance(two_dirac_from_bn(pure, 0.25, 4.0), empirical_from_state(rho, 0.25, 4.0), dict) <= 1e-12);

  // pair(Theta_bar, xi) equals the mixture mass.
  auto ap = GridField::from_function(g, [](double x) { return 0.5 + 0.2 * std::sin(two_pi * x); });
  auto rp = GridField::from_function(g, [](double x) { return 1.8 + 0.1 * std::cos(two_pi * x); });
  auto mixed = make_bn_state(0.0, ap, rp, GridField(g, 0.9), GridField(g, 0.0), poly_params());
  auto mm = two_dirac_from_bn(mixed, 0.25, 4.0);
  CHECK(std::abs(pair(mm, [](double, double xi) { return xi; }) - mean(mixture_fields(mixed, poly_params().eos).rho)) <=
        1e-12);
}

TEST_CASE("dictionary layout") {
  TestDictionary dict(4, 4, 2.0);
  CHECK(dict.size() == 45);
  CHECK(dict.label(0) == "1_xi0");
  CHECK(dict.label(5) == "cos1_xi0");
  CHECK(dict.label(44) == "sin4_xi4");
  CHECK(dict(0, 0.3, 1.7) == 1.0);
  CHECK(dict(4, 0.3, 2.0) == doctest::Approx(1.0));
  CHECK(dict(7, 0.25, 1.0) == doctest::Approx(std::cos(two_pi * 0.25) * 0.25));
  CHECK(dict(12, 0.125, 2.0) == doctest::Approx(std::sin(two_pi * 0.125)));
  // Sup-norm 1 on the support box [0.25, 2].
  double sup = 0.0;
  for (std::size_t j = 0; j < dict.size(); ++j) {
    for (int a = 0; a <= 40; ++a) {
      for (int b = 0; b <= 40; ++b) sup = std::max(sup, std::abs(dict(j, a / 40.0, 0.25 + 1.75 * b / 40.0)));
    }
  }
  CHECK(sup == doctest::Approx(1.0));
}

TEST_CASE("distance between a single Dirac and a two-Dirac mixture") {
  PeriodicGrid g(32);
  auto m1 = empirical_from_state(GridField(g, 1.2), 0.25, 4.0);
  auto s = constant_bn(g, 0.5, 0.8, 1.6);
  auto m2 = two_dirac_from_bn(s, 0.25, 4.0);
  CHECK(std::abs(pair(m1, [](double, double xi) { return xi; }) - pair(m2, [](double, double xi) { return xi; })) <=
        1e-12);
  CHECK(std::abs(std::abs(pair(m1, [](double, double xi) { return xi * xi; }) -
                          pair(m2, [](double, double xi) { return xi * xi; })) -
                 0.16) <= 1e-12);
  CHECK(std::abs(wasserstein_average(m1, m2) - 0.4) <= 1e-12);
  CHECK(distance(m1, m1, TestDictionary(4, 4, 4.0)) == 0.0);
  // Normalized xi^2 entry (index 2) carries the 0.16 gap scaled by 1/4^2.
  CHECK(std::abs(distance(m1, m2, TestDictionary(0, 2, 4.0)) - 0.16 / 16.0) <= 1e-12);
}

TEST_CASE("wasserstein_1d brute force on three atoms") {
  // delta_1.2 vs 0.5 delta_0.8 + 0.5 delta_1.6: only coupling moves half the mass 0.4 each way.
  CHECK(wasserstein_1d({{1.2, 1.0}}, {{0.8, 0.5}, {1.6, 0.5}}) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(wasserstein_1d({{1.0, 1.0}}, {{1.0, 1.0}}) == 0.0);
  CHECK(wasserstein_1d({{0.0, 0.5}, {1.0, 0.5}}, {{2.0, 1.0}}) == doctest::Approx(1.5));
}

TEST_CASE("distance is a pseudometric") {
  std::mt19937 gen(20261014);
  PeriodicGrid g(32);
  TestDictionary dict(4, 4, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_measure(g, gen);
    auto b = random_measure(g, gen);
    auto c = random_measure(g, gen);
    CHECK(distance(a, a, dict) == 0.0);
    CHECK(distance(a, b, dict) == distance(b, a, dict));
    CHECK(distance(a, c, dict) <= distance(a, b, dict) + distance(b, c, dict) + 1e-15);
    CHECK(wasserstein_average(a, b) == doctest::Approx(wasserstein_average(b, a)));
  }
}

TEST_CASE("invalid dictionary sizes are rejected") {
  CHECK_THROWS_AS(TestDictionary(-1, 2, 4.0), DomainError);
  CHECK_THROWS_AS(TestDictionary(2, -1, 4.0), DomainError);
  CHECK(TestDictionary(0, 0, 4.0).size() == 1);
}

TEST_CASE("kinetic residual vanishes on a constant state") {
  const auto p = poly_params();
  PeriodicGrid g(32);
  const double rho_bar = 1.3;
  const double t_end = 0.2;
  const int steps = 40;
  std::vector<ParamMeasure> ms;
  std::vector<GridField> us, sigmas;
  std::vector<double> times;
  for (int k = 0; k <= steps; ++k) {
    times.push_back(t_end * k / steps);
    auto s = make_fluid_state(times.back(), GridField(g, rho_bar), GridField(g, 0.7), p);
    ms.push_back(empirical_from_state(s.rho, 0.25, 4.0));
    us.push_back(s.u);
    sigmas.push_back(effective_viscous_flux(s, p));
  }
  CHECK(std::abs(sigmas[0][0] + p.eos.artificial_pressure(rho_bar)) <= 1e-14);
  for (const auto& phi : smoke_test_functions(0.0, t_end, 4.0)) {
    INFO(phi.name);
    CHECK(std::abs(kinetic_residual(ms, us, sigmas, times, phi, p.mu, p.eos)) <= 1e-14);
  }
}

TEST_CASE("kinetic residual requires a shared time grid") {
  const auto p = poly_params();
  PeriodicGrid g(16);
  auto s = make_fluid_state(0.0, GridField(g, 1.0), GridField(g, 0.0), p);
  std::vector<ParamMeasure> ms{empirical_from_state(s.rho, 0.25, 4.0), empirical_from_state(s.rho, 0.25, 4.0)};
  std::vector<GridField> us{s.u, s.u};
  std::vector<GridField> sig{s.u};
  std::vector<double> times{0.0, 0.1};
  auto phi = smoke_test_functions(0.0, 0.1, 4.0).front();
  CHECK_THROWS_AS(kinetic_residual(ms, us, sig, times, phi, p.mu, p.eos), DomainError);
}

TEST_CASE("smoke test functions match their derivatives") {
  auto fns = smoke_test_functions(0.0, 0.5, 2.0);
  CHECK(fns.size() == 6);
  const double t = 0.17, x = 0.31, xi = 1.3, e = 1e-6;
  for (const auto& f : fns) {
    INFO(f.name);
    CHECK(f.phi(0.0, x, xi) == doctest::Approx(0.0));
    CHECK(f.phi_t(t, x, xi) == doctest::Approx((f.phi(t + e, x, xi) - f.phi(t - e, x, xi)) / (2 * e)).epsilon(1e-7));
    CHECK(f.phi_x(t, x, xi) == doctest::Approx((f.phi(t, x + e, xi) - f.phi(t, x - e, xi)) / (2 * e)).epsilon(1e-7));
    CHECK(f.phi_xi(t, x, xi) == doctest::Approx((f.phi(t, x, xi + e) - f.phi(t, x, xi - e)) / (2 * e)).epsilon(1e-7));
  }
}
