#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "phasekit/diagnostics.hpp"
#include "phasekit/nsk.hpp"

using namespace phasekit;

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

PhysicalParams poly_params() { return PhysicalParams(0.05, 0.01, EquationOfState::polytropic(1, 2, 1.0)); }

SolverConfig base_config(double t_end) {
  SolverConfig c;
  c.dt = 1e-3;
  c.cfl = 0.5;
  c.t_end = t_end;
  c.lower = 0.2;
  c.upper = 5.0;
  return c;
}
}  // namespace

TEST_CASE("oscillating initial data") {
  PeriodicGrid g(512);
  TwoValueProfile flat{1.0, 1.0, 0.3, 0.1};
  CHECK(make_oscillating_initial(flat, 8, g, 0.1, 5).max() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(make_oscillating_initial(flat, 8, g, 0.1, 5).min() == doctest::Approx(1.0).epsilon(1e-15));

  TwoValueProfile two{0.8, 1.6, 0.5, 0.1};
  CHECK(mean(make_oscillating_initial(two, 1, g, 0.1, 5)) == doctest::Approx(1.2).epsilon(1e-12));
  auto one = make_oscillating_initial(two, 1, g, 0.1, 5);
  auto four = make_oscillating_initial(two, 4, g, 0.1, 5);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(four[i] == doctest::Approx(one[(4 * i) % g.size()]).epsilon(1e-13));

  CHECK_THROWS_AS(make_oscillating_initial(two, 64, g, 0.1, 5), DomainError);
  CHECK_THROWS_AS(make_oscillating_initial(two, 1, g, 1.0, 5), DomainError);
  // continuity across both jumps
  double jump = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) jump = std::max(jump, std::abs(one[(i + 1) % g.size()] - one[i]));
  CHECK(jump < 0.8 * 8.0 / 512.0 / 0.1);
}

TEST_CASE("constant state is stationary") {
  auto p = poly_params();
  PeriodicGrid g(64);
  auto s = make_fluid_state(0.0, GridField(g, 1.3), GridField(g, 0.7), p);
  auto cfg = base_config(1.0);
  auto s0 = s;
  for (int k = 0; k < 100; ++k) s = nsk_step(s, p, cfg);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(s.rho[i] - 1.3) < 1e-13);
    CHECK(std::abs(s.u[i] - 0.7) < 1e-13);
    CHECK(std::abs(s.c[i] - 1.3) < 1e-13);
  }
}

TEST_CASE("stationary run keeps zero energy and passes the balance check") {
  auto p = poly_params();
  PeriodicGrid g(64);
  auto traj = nsk_run(make_fluid_state(0.0, GridField(g, 1.0), GridField(g, 0.0), p), p, base_config(0.05));
  REQUIRE(traj.ok());
  for (const auto& r : traj.records) CHECK(std::abs(r.energy) < 1e-12);
  auto rep = balance_check(traj.records);
  CHECK(rep.passed);
  CHECK(rep.mass_drift < 1e-12);
  CHECK(rep.momentum_drift < 1e-12);
}

TEST_CASE("mass is conserved and c stays slaved over 1000 steps") {
  auto p = poly_params();
  PeriodicGrid g(128);
  auto rho = GridField::from_function(g, [](double x) { return 1.0 + 0.2 * std::sin(two_pi * x); });
  auto u = GridField::from_function(g, [](double x) { return 0.3 * std::cos(two_pi * x); });
  auto s = make_fluid_state(0.0, rho, u, p);
  auto cfg = base_config(1.0);
  const double m0 = mean(s.rho);
  const double q0 = mean(hadamard(s.rho, s.u));
  for (int k = 0; k < 1000; ++k) {
    s = nsk_step(s, p, cfg);
    CHECK(helmholtz_residual(s.c, s.rho, p.kappa, p.gamma) <= 1e-9);
  }
  CHECK(std::abs(mean(s.rho) - m0) <= 1e-12);
  CHECK(std::abs(mean(hadamard(s.rho, s.u)) - q0) <= 1e-12);
}

TEST_CASE("capillarity forms agree to second order") {
  auto p = poly_params();
  std::vector<double> diffs;
  for (std::size_t n : {64u, 128u, 256u}) {
    PeriodicGrid g(n);
    auto rho = GridField::from_function(g, [](double x) { return 1.0 + 0.2 * std::sin(two_pi * x); });
    auto s = make_fluid_state(0.0, rho, GridField(g, 0.0), p);
    auto a = base_config(0.05);
    a.dt = 1e-4;
    a.scheme.upwind = 0.0;
    auto b = a;
    b.scheme.capillarity = CapillarityForm::original;
    auto ta = nsk_run(s, p, a);
    auto tb = nsk_run(s, p, b);
    REQUIRE(ta.ok());
    REQUIRE(tb.ok());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(ta.final_state.u[i] - tb.final_state.u[i]));
    diffs.push_back(d);
  }
  for (std::size_t k = 1; k < diffs.size(); ++k) CHECK(diffs[k - 1] / diffs[k] > 3.5);
}

TEST_CASE("guard rails and admissibility are enforced") {
  auto p = poly_params();
  PeriodicGrid g(64);
  auto rho = GridField::from_function(g, [](double x) { return 1.0 + 0.5 * std::sin(two_pi * x); });
  auto cfg = base_config(0.1);
  cfg.lower = 0.9;
  auto traj = nsk_run(make_fluid_state(0.0, rho, GridField(g, 0.0), p), p, cfg);
  CHECK_FALSE(traj.ok());
  CHECK(traj.status == ExitCode::bounds);

  PhysicalParams bad(0.1, 0.1, EquationOfState::van_der_waals(1, 1, 1, 0.2, 0.5));
  cfg.lower = 0.1;
  cfg.upper = 0.9;
  auto s = make_fluid_state(0.0, GridField(g, 0.5), GridField(g, 0.0), bad);
  CHECK_THROWS_AS(nsk_run(s, bad, cfg), AdmissibilityError);
}

TEST_CASE("snapshot schedule lands on exact times") {
  auto p = poly_params();
  PeriodicGrid g(64);
  auto rho = GridField::from_function(g, [](double x) { return 1.0 + 0.1 * std::sin(two_pi * x); });
  auto cfg = base_config(0.1);
  cfg.dt = 3e-3;
  cfg.snapshot_dt = 0.025;
  auto traj = nsk_run(make_fluid_state(0.0, rho, GridField(g, 0.0), p), p, cfg);
  REQUIRE(traj.ok());
  REQUIRE(traj.snapshots.size() == 5);
  for (std::size_t j = 0; j < 5; ++j) CHECK(traj.snapshots[j].t == doctest::Approx(0.025 * j).epsilon(1e-14));
}

TEST_CASE("smoothed square wave dissipates energy") {
  PhysicalParams p(0.1, 0.1, EquationOfState::van_der_waals(1, 4, 1, 4, 2.0));
  PeriodicGrid g(256);
  auto rho = make_oscillating_initial(TwoValueProfile{0.8, 1.6, 0.5, 0.2}, 1, g, 0.3125, 3.2);
  auto cfg = base_config(0.1);
  cfg.lower = 0.3125;
  cfg.upper = 3.2;
  auto traj = nsk_run(make_fluid_state(0.0, rho, GridField(g, 0.0), p), p, cfg);
  REQUIRE(traj.ok());
  auto rep = balance_check(traj.records, {}, p.gamma);
  CHECK(rep.energy_ok);
  CHECK(rep.envelope_ok);
  for (std::size_t k = 1; k < traj.records.size(); ++k) {
    CHECK(traj.records[k].energy <= traj.records[k - 1].energy + rep.energy_residual + 1e-14);
  }
  CHECK(traj.records.back().energy <= traj.records.front().energy * (1.0 + 1e-6));
}
