#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "phasekit/harness.hpp"

using namespace phasekit;

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double lo = 0.3125, hi = 3.2;

PhysicalParams vdw_params() { return PhysicalParams(0.1, 0.1, EquationOfState::van_der_waals(1, 4, 1, 4, 2.0)); }

FamilyConfig small_family(double v_minus, double v_plus) {
  FamilyConfig f(vdw_params());
  f.n_list = {2, 4, 8};
  f.grid_n = 512;
  f.profile = {v_minus, v_plus, 0.5, 0.125};
  f.u0.sin_amp = {0.1};
  f.solver.t_end = 0.05;
  f.solver.lower = lo;
  f.solver.upper = hi;
  f.snapshots = 5;
  return f;
}

bool kinetic_orders_ok(const std::vector<KineticReport>& levels, double min_order) {
  const auto orders = refinement_orders(levels);
  for (std::size_t l = 0; l < orders.size(); ++l) {
    for (std::size_t j = 0; j < orders[l].size(); ++j) {
      const bool floor = std::abs(levels[l].residuals[j]) <= 1e-12 && std::abs(levels[l + 1].residuals[j]) <= 1e-12;
      if (!floor && orders[l][j] < min_order) return false;
    }
  }
  return true;
}
}  // namespace

TEST_CASE("limit initial data") {
  auto d = limit_initial_data({0.8, 1.6, 0.5, 0.01});
  CHECK(d.alpha_p == 0.5);
  CHECK(d.alpha_m == 0.5);
  CHECK(d.rho_p == 1.6);
  CHECK(d.rho_m == 0.8);
  CHECK(limit_initial_data({0.8, 1.6, 0.25, 0.01}).alpha_m == 0.25);

  // Mixture mass of the limit data against the mean of the generated profile.
  TwoValueProfile prof{0.8, 1.6, 0.3, 0.1};
  auto lim = limit_initial_data(prof);
  PeriodicGrid g(1024);
  const double mean_rho = mean(make_oscillating_initial(prof, 4, g, lo, hi));
  CHECK(std::abs(lim.alpha_p * lim.rho_p + lim.alpha_m * lim.rho_m - mean_rho) <= 2.0 * prof.delta);
  // Symmetric ramps: only the grid quadrature of the ramps separates the two.
  CHECK(std::abs(lim.alpha_p * lim.rho_p + lim.alpha_m * lim.rho_m - mean_rho) <= 1e-6);
}

TEST_CASE("monotonicity with slack") {
  CHECK(monotone_with_slack({1.0, 0.5, 0.55, 0.2}));
  CHECK_FALSE(monotone_with_slack({1.0, 0.5, 0.61}));
  CHECK(monotone_with_slack({}));
}

TEST_CASE("family validation") {
  auto f = small_family(0.8, 1.6);
  f.n_list = {8, 4};
  CHECK_THROWS_WITH_AS(f.validate(), "n_list must be strictly increasing", ConfigError);
  f = small_family(0.8, 1.6);
  f.grid_n = 256;
  CHECK_THROWS_AS(f.validate(), ConfigError);
  f = small_family(0.2, 1.6);
  CHECK_THROWS_AS(f.validate(), ConfigError);
}

TEST_CASE("thread cap") {
  CHECK(harness_threads(0, 5) >= 1);
  CHECK(harness_threads(0, 5) <= 5);
  CHECK(harness_threads(2, 5) <= 2);
  CHECK(harness_threads(9, 3) <= 3);
}

TEST_CASE("degenerate family gives zero distances") {
  auto f = small_family(1.2, 1.2);
  auto r = run_family(f);
  REQUIRE(r.complete);
  CHECK(r.times.size() == 6);
  for (const auto& m : r.members) {
    INFO("n = " << m.n);
    CHECK(m.distance.size() == r.times.size());
    CHECK(m.sup_distance <= 1e-9);
    CHECK(m.sup_u_error <= 1e-9);
  }
}

TEST_CASE("family results do not depend on the worker count") {
  auto f = small_family(0.8, 1.6);
  f.threads = 1;
  auto serial = run_family(f);
  f.threads = 4;
  auto parallel = run_family(f);
  REQUIRE(serial.members.size() == parallel.members.size());
  for (std::size_t m = 0; m < serial.members.size(); ++m) {
    CHECK(serial.members[m].distance == parallel.members[m].distance);
    CHECK(serial.members[m].u_error == parallel.members[m].u_error);
  }
}

TEST_CASE("oscillating family approaches the BN solution") {
  auto f = small_family(0.8, 1.6);
  auto r = run_family(f);
  REQUIRE(r.complete);
  CHECK(r.distance_monotone);
  CHECK(r.u_error_monotone);
  CHECK(r.members.back().sup_u_error < r.members.front().sup_u_error);
  MESSAGE("propagation constant " << r.propagation_constant);
}

TEST_CASE("kinetic residual converges for NSK and BN runs") {
  const auto p = vdw_params();
  std::vector<KineticReport> nsk_levels, bn_levels;
  for (std::size_t n : {64, 128, 256}) {
    PeriodicGrid g(n);
    SolverConfig c;
    c.t_end = 0.1;
    c.lower = lo;
    c.upper = hi;
    c.snapshot_every = 1;
    c.dt = 0.2 / static_cast<double>(n);
    c.scheme.upwind = 0.0;
    auto u = GridField::from_function(g, [](double x) { return 0.2 * std::cos(two_pi * x); });
    auto rho = GridField::from_function(g, [](double x) { return 1.2 + 0.3 * std::sin(two_pi * x); });
    auto nsk = nsk_run(make_fluid_state(0.0, rho, u, p), p, c);
    REQUIRE(nsk.ok());
    nsk_levels.push_back(kinetic_consistency(nsk, p, lo, hi));

    auto ap = GridField::from_function(g, [](double x) { return 0.5 + 0.2 * std::sin(two_pi * x); });
    auto rp = GridField::from_function(g, [](double x) { return 1.6 + 0.1 * std::cos(two_pi * x); });
    auto rm = GridField::from_function(g, [](double x) { return 0.8 + 0.05 * std::sin(two_pi * x); });
    auto bn = bn_run(make_bn_state(0.0, ap, rp, rm, u, p), p, c);
    REQUIRE(bn.ok());
    bn_levels.push_back(kinetic_consistency(bn, p, lo, hi));
  }
  CHECK(kinetic_orders_ok(nsk_levels, 1.0));
  CHECK(kinetic_orders_ok(bn_levels, 1.0));
}

TEST_CASE("kinetic consistency needs stored snapshots") {
  const auto p = vdw_params();
  PeriodicGrid g(64);
  NskTrajectory empty(make_fluid_state(0.0, GridField(g, 1.2), GridField(g, 0.0), p));
  CHECK_THROWS_AS(kinetic_consistency(empty, p, lo, hi), DomainError);
}
