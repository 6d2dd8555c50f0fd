#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "phasekit/eos.hpp"
#include "phasekit/error.hpp"

using namespace phasekit;

TEST_CASE("closed-form pressures") {
  auto vdw = EquationOfState::van_der_waals(1, 1, 1, 0.2, 0.0);
  CHECK(vdw.pressure(0.0) == 0.0);
  CHECK(vdw.pressure(0.5) == doctest::Approx(-0.05).epsilon(1e-14));
  auto poly = EquationOfState::polytropic(1, 2, 0.0);
  CHECK(poly.pressure(3.0) == doctest::Approx(9.0).epsilon(1e-15));
  CHECK_THROWS_AS(vdw.pressure(1.0), DomainError);
  CHECK_THROWS_AS(vdw.pressure(-0.1), DomainError);
}

TEST_CASE("artificial pressure") {
  auto vdw = EquationOfState::van_der_waals(1, 1, 1, 0.2, 2.0);
  CHECK(vdw.artificial_pressure(0.0) == 0.0);
  CHECK(vdw.artificial_pressure(0.5) == doctest::Approx(0.2).epsilon(1e-14));
  auto poly = EquationOfState::polytropic(1, 2, 1.0);
  CHECK(poly.artificial_pressure(2.0) == doctest::Approx(6.0).epsilon(1e-15));
  for (double r : {0.1, 0.3, 0.7, 0.95}) {
    CHECK(vdw.artificial_pressure(r) - vdw.pressure(r) == doctest::Approx(r * r).epsilon(1e-14));
    CHECK(vdw.d_artificial_pressure(r) - vdw.d_pressure(r) == doctest::Approx(2.0 * r).epsilon(1e-14));
  }
}

TEST_CASE("invalid coefficients") {
  CHECK_THROWS_AS(EquationOfState::polytropic(1, 1.5, 1.0), DomainError);
  CHECK_THROWS_AS(EquationOfState::polytropic(-1, 2, 1.0), DomainError);
  CHECK_THROWS_AS(EquationOfState::van_der_waals(0, 1, 1, 1, 1.0), DomainError);
  CHECK_THROWS_AS(EquationOfState::polytropic(1, 2, -1.0), DomainError);
}

TEST_CASE("d_pressure matches centered differences") {
  std::mt19937_64 rng(3);
  auto vdw = EquationOfState::van_der_waals(1, 4, 1, 4, 2.0);
  auto poly = EquationOfState::polytropic(2, 3, 1.0);
  std::uniform_real_distribution<double> ud(0.05, 3.9);
  for (int i = 0; i < 200; ++i) {
    const double r = ud(rng);
    for (const auto* e : {&vdw, &poly}) {
      const double fd = (e->pressure(r + 1e-5) - e->pressure(r - 1e-5)) / 2e-5;
      const double exact = e->d_pressure(r);
      CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("pressure potential") {
  auto poly = EquationOfState::polytropic(1, 2, 0.0);
  CHECK(poly.potential(1.0) == 0.0);
  CHECK(poly.potential(2.0) == doctest::Approx(2.0).epsilon(1e-15));
  auto vdw = EquationOfState::van_der_waals(1, 4, 1, 4, 2.0);
  CHECK(std::abs(vdw.potential(1.0)) < 1e-15);
  auto vdw_small = EquationOfState::van_der_waals(1, 1, 1, 0.2, 2.0);
  CHECK(vdw_small.reference_density() == 0.5);
  CHECK(std::abs(vdw_small.potential(0.5)) < 1e-15);

  for (const auto* e : {&poly, &vdw, &vdw_small}) {
    for (double frac : {0.2, 0.45, 0.7, 0.9}) {
      const double r = frac * std::min(e->domain_max(), 3.0);
      const double d = 1e-4;
      const double second = (e->potential(r + d) - 2.0 * e->potential(r) + e->potential(r - d)) / (d * d);
      CHECK(std::abs(second * r - e->d_pressure(r)) < 1e-4 * std::max(1.0, std::abs(e->d_pressure(r))));
      CHECK(e->potential(r) == doctest::Approx(e->potential_by_quadrature(r)).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(poly.potential(0.0), DomainError);
}

TEST_CASE("adaptive simpson") {
  CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("admissibility examples") {
  auto ok = check_admissibility(EquationOfState::van_der_waals(1, 1, 1, 0.2, 2.0), 0.0, 0.999);
  CHECK(ok.admissible);
  CHECK(ok.min_artificial_slope > 0.0);
  CHECK(ok.spinodal.has_value());  // P' still dips; only Pt is monotone

  auto bad = check_admissibility(EquationOfState::van_der_waals(1, 1, 1, 0.2, 0.0), 0.0, 0.999);
  CHECK_FALSE(bad.admissible);
  REQUIRE(bad.spinodal.has_value());
  CHECK(bad.spinodal->lower < 0.3);
  CHECK(bad.spinodal->upper > 0.3);
  CHECK(bad.spinodal->lower > 0.0);
  CHECK(bad.spinodal->upper < 1.0);
  auto vdw = EquationOfState::van_der_waals(1, 1, 1, 0.2, 0.0);
  CHECK(std::abs(vdw.d_pressure(bad.spinodal->lower)) < 1e-8);
  CHECK(std::abs(vdw.d_pressure(bad.spinodal->upper)) < 1e-8);

  auto poly = check_admissibility(EquationOfState::polytropic(1, 2, 1.0), 0.0, 100.0);
  CHECK(poly.admissible);
  CHECK_FALSE(poly.spinodal.has_value());

  CHECK_THROWS_AS(check_admissibility(vdw, 0.5, 0.4), DomainError);
  CHECK_THROWS_AS(check_admissibility(vdw, 0.0, 1.5), DomainError);
}

TEST_CASE("vdw near the classical critical temperature") {
  // Tc = 8 A B^2 / (27 R); below it a spinodal exists, above it P' > 0 on [0, B).
  const double tc = 8.0 / 27.0;
  CHECK(check_admissibility(EquationOfState::van_der_waals(1, 1, 1, 0.95 * tc, 0.0), 0.0, 1.0).spinodal.has_value());
  CHECK_FALSE(check_admissibility(EquationOfState::van_der_waals(1, 1, 1, 1.05 * tc, 0.0), 0.0, 1.0).spinodal.has_value());
  CHECK_FALSE(check_admissibility(EquationOfState::van_der_waals(1, 1, 1, 0.8, 0.0), 0.0, 1.0).spinodal.has_value());
}

TEST_CASE("admissible implies monotone artificial pressure") {
  for (double gamma : {2.0, 2.5}) {
    auto e = EquationOfState::van_der_waals(1, 1, 1, 0.2, gamma);
    REQUIRE(check_admissibility(e, 0.0, 0.999).admissible);
    double prev = e.artificial_pressure(0.0);
    for (int j = 1; j < 1000; ++j) {
      const double p = e.artificial_pressure(0.999 * j / 999.0);
      CHECK(p > prev);
      prev = p;
    }
  }
}

TEST_CASE("quadratic growth constant is finite") {
  CHECK(std::isfinite(quadratic_growth_constant(EquationOfState::polytropic(1, 2, 1.0), 10.0)));
  CHECK(std::isfinite(quadratic_growth_constant(EquationOfState::van_der_waals(1, 4, 1, 4, 2.0), 3.9)));
  MESSAGE("C_rho polytropic(1,2) on (0,10]: " << quadratic_growth_constant(EquationOfState::polytropic(1, 2, 1.0), 10.0));
}
