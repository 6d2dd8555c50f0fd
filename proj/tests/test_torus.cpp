#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "phasekit/error.hpp"
#include "phasekit/torus.hpp"

using namespace phasekit;

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

double max_diff(const GridField& a, const GridField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
}  // namespace

TEST_CASE("grid rejects odd or tiny sizes") {
  CHECK_THROWS_AS(PeriodicGrid(6), DomainError);
  CHECK_THROWS_AS(PeriodicGrid(9), DomainError);
  PeriodicGrid g(8);
  CHECK(g.spacing() == doctest::Approx(0.125));
}

TEST_CASE("derivative of a constant vanishes") {
  PeriodicGrid g(32);
  GridField f(g, 7.0);
  for (auto b : {Backend::central, Backend::spectral}) {
    CHECK(derivative(f, 1, b).max_abs() < 1e-12);
    CHECK(derivative(f, 2, b).max_abs() < 1e-12);
  }
}

TEST_CASE("spectral derivative of sin is exact") {
  PeriodicGrid g(64);
  auto f = GridField::from_function(g, [](double x) { return std::sin(two_pi * x); });
  auto exact = GridField::from_function(g, [](double x) { return two_pi * std::cos(two_pi * x); });
  CHECK(max_diff(derivative(f, 1, Backend::spectral), exact) / two_pi < 1e-12);
  auto exact2 = GridField::from_function(g, [](double x) { return -two_pi * two_pi * std::sin(two_pi * x); });
  CHECK(max_diff(derivative(f, 2, Backend::spectral), exact2) / (two_pi * two_pi) < 1e-12);
}

TEST_CASE("central derivative is second order") {
  double prev = 0.0;
  for (std::size_t n : {32u, 64u, 128u}) {
    PeriodicGrid g(n);
    auto f = GridField::from_function(g, [](double x) { return std::sin(two_pi * x); });
    auto exact = GridField::from_function(g, [](double x) { return two_pi * std::cos(two_pi * x); });
    const double err = max_diff(derivative(f, 1, Backend::central), exact);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.02));
    prev = err;
  }
}

TEST_CASE("mean examples") {
  PeriodicGrid g(64);
  CHECK(mean(GridField(g, 3.0)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(std::abs(mean(GridField::from_function(g, [](double x) { return std::sin(two_pi * x); }))) < 1e-14);
  auto f = GridField::from_function(g, [](double x) {
    const double c = std::cos(2.0 * two_pi * x);
    return 1.0 + c * c;
  });
  CHECK(mean(f) == doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("primitive examples") {
  PeriodicGrid g(64);
  CHECK(primitive(GridField(g, 0.0)).max_abs() < 1e-15);
  auto s = GridField::from_function(g, [](double x) { return std::sin(two_pi * x); });
  auto ps = GridField::from_function(g, [](double x) { return -std::cos(two_pi * x) / two_pi; });
  CHECK(max_diff(primitive(s), ps) < 1e-14);
  auto c = GridField::from_function(g, [](double x) { return std::cos(2.0 * two_pi * x); });
  auto pc = GridField::from_function(g, [](double x) { return std::sin(2.0 * two_pi * x) / (2.0 * two_pi); });
  CHECK(max_diff(primitive(c), pc) < 1e-14);
  CHECK_THROWS_AS(primitive(GridField(g, 1.0)), DomainError);
}

TEST_CASE("derivative inverts primitive and is mean free") {
  PeriodicGrid g(128);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    GridField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = nd(rng);
    for (auto b : {Backend::central, Backend::spectral}) CHECK(std::abs(mean(derivative(f, 1, b))) < 1e-13);
    // Drop the mean and the Nyquist mode, which the spectral first derivative cannot represent.
    auto coeffs = fourier_coefficients(f);
    coeffs.front() = 0.0;
    coeffs.back() = 0.0;
    auto band = from_fourier_coefficients(g, coeffs);
    auto back = derivative(primitive(band), 1, Backend::spectral);
    CHECK(max_diff(back, band) < 1e-12);
  }
}

TEST_CASE("helmholtz constants and single mode") {
  PeriodicGrid g(256);
  CHECK(max_diff(helmholtz_solve(GridField(g, 2.0), 1.0, 1.0), GridField(g, 2.0)) < 1e-13);
  auto rho = GridField::from_function(g, [](double x) { return 1.0 + std::sin(two_pi * x); });
  auto exact = GridField::from_function(
      g, [](double x) { return 1.0 + std::sin(two_pi * x) / (1.0 + two_pi * two_pi); });
  auto c = helmholtz_solve(rho, 1.0, 1.0);
  CHECK(max_diff(c, exact) / exact.max_abs() < 1e-10);
  CHECK_THROWS_AS(helmholtz_solve(rho, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(helmholtz_solve(rho, 1.0, -1.0), DomainError);
}

TEST_CASE("helmholtz finite difference backend is second order") {
  std::vector<double> errs;
  for (std::size_t n : {64u, 128u, 256u}) {
    PeriodicGrid g(n);
    auto rho = GridField::from_function(g, [](double x) { return 1.0 + std::sin(two_pi * x); });
    auto exact = GridField::from_function(
        g, [](double x) { return 1.0 + std::sin(two_pi * x) / (1.0 + two_pi * two_pi); });
    auto c = helmholtz_solve(rho, 1.0, 1.0, HelmholtzBackend::finite_difference);
    CHECK(helmholtz_residual(c, rho, 1.0, 1.0, HelmholtzBackend::finite_difference) < 1e-9);
    errs.push_back(max_diff(c, exact));
  }
  for (std::size_t k = 1; k < errs.size(); ++k) CHECK(std::log2(errs[k - 1] / errs[k]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("helmholtz mean, residual and elliptic estimate on random data") {
  PeriodicGrid g(128);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ud(0.5, 2.0);
  double worst = 0.0;
  for (double kappa : {0.01, 0.1, 1.0}) {
    for (double gamma : {0.5, 2.0}) {
      for (int trial = 0; trial < 4; ++trial) {
        GridField rho(g);
        for (std::size_t i = 0; i < g.size(); ++i) rho[i] = ud(rng);
        auto c = helmholtz_solve(rho, kappa, gamma);
        CHECK(std::abs(mean(c) - mean(rho)) < 1e-12);
        CHECK(helmholtz_residual(c, rho, kappa, gamma) <= 1e-10 * gamma * rho.max_abs());
        const double ratio = sobolev_norm(c, 2) / l2_norm(rho);
        worst = std::max(worst, ratio / std::max(1.0, gamma / kappa));
      }
    }
  }
  MESSAGE("elliptic constant / max(1, gamma/kappa) = " << worst);
  CHECK(worst <= 1.0 + 1e-12);
}

TEST_CASE("sobolev norm of a single mode") {
  PeriodicGrid g(64);
  auto f = GridField::from_function(g, [](double x) { return std::sin(two_pi * x); });
  CHECK(sobolev_norm(f, 0) == doctest::Approx(l2_norm(f)).epsilon(1e-13));
  CHECK(sobolev_norm(f, 1) == doctest::Approx(std::sqrt(0.5 * (1.0 + two_pi * two_pi))).epsilon(1e-13));
}

TEST_CASE("dealias removes high modes") {
  PeriodicGrid g(64);
  auto f = GridField::from_function(g, [](double x) { return std::sin(two_pi * x) + std::cos(30.0 * two_pi * x); });
  auto low = GridField::from_function(g, [](double x) { return std::sin(two_pi * x); });
  CHECK(max_diff(dealias(f), low) < 1e-13);
}

TEST_CASE("cubic interpolation reproduces cubics locally and wraps") {
  PeriodicGrid g(64);
  auto f = GridField::from_function(g, [](double x) { return std::sin(two_pi * x); });
  CHECK(interpolate_cubic(f, 0.25) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(interpolate_cubic(f, 1.25) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(interpolate_cubic(f, 0.3) - std::sin(two_pi * 0.3)) < 1e-5);
  CHECK(wrap_unit(-0.25) == doctest::Approx(0.75));
}

TEST_CASE("cyclic tridiagonal solve") {
  const std::size_t n = 10;
  std::vector<double> lo(n, -1.0), di(n, 4.0), up(n, -0.5), x(n), rhs(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(static_cast<double>(i));
  for (std::size_t i = 0; i < n; ++i)
    rhs[i] = lo[i] * x[(i + n - 1) % n] + di[i] * x[i] + up[i] * x[(i + 1) % n];
  auto sol = solve_cyclic_tridiagonal(lo, di, up, rhs);
  for (std::size_t i = 0; i < n; ++i) CHECK(sol[i] == doctest::Approx(x[i]).epsilon(1e-13));
}

TEST_CASE("non-finite input is rejected") {
  PeriodicGrid g(16);
  GridField f(g, 1.0);
  f[3] = std::nan("");
  CHECK_THROWS_AS(derivative(f, 1, Backend::central), DomainError);
  CHECK_THROWS_AS(mean(f), DomainError);
}
