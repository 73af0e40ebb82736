#include "monolab/asymptotics.hpp"
#include "monolab/errors.hpp"
#include "monolab/order.hpp"
#include "monolab/systems.hpp"
#include "unit/helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace monolab;
using Catch::Approx;
using monolab::test::vec;

namespace {

ClassifyBudget budget_for(const SystemSpec& s) { return ClassifyBudget::defaults_for(s); }

}  // namespace

TEST_CASE("orbit records exclude x0 and honour thinning") {
  const SystemSpec cubic = catalog::scalar_cubic();
  const OrbitRecord orbit = iterate_orbit(cubic, vec({0.5}), 10, 3);
  REQUIRE(orbit.samples.size() == 3);
  CHECK(orbit.indices == std::vector<long>{3, 6, 9});
  CHECK_FALSE(orbit.escaped);
  StateVector x = vec({0.5});
  for (int k = 0; k < 3; ++k) x = evaluate(cubic, x);
  CHECK(orbit.samples[0] == x);
  CHECK(iterate_orbit(cubic, vec({0.5}), 0).samples.empty());
  CHECK(iterate_orbit(cubic, vec({0.0}), 5).samples.back()[0] == 0.0);
}

TEST_CASE("cubic orbit from 0.5 converges to 1") {
  const OrbitRecord orbit = iterate_orbit(catalog::scalar_cubic(), vec({0.5}), 100);
  CHECK(orbit.samples.back()[0] == Approx(1.0).margin(1e-6));
  // x0 ≤ F(x0) for a monotone map makes the orbit increasing.
  for (std::size_t k = 1; k < orbit.samples.size(); ++k) CHECK(leq(orbit.samples[k - 1], orbit.samples[k]));
}

TEST_CASE("escape is recorded") {
  Eigen::MatrixXd a = 1.5 * Eigen::MatrixXd::Identity(2, 2);
  a(0, 1) = 0.1;
  const SystemSpec grow = SystemSpec::linear(a, 1.0, true, "grow");
  const StateVector x0(Eigen::Vector2d(0.5, 0.5), grow.grid());
  const OrbitRecord orbit = iterate_orbit(grow, x0, 50);
  CHECK(orbit.escaped);
  CHECK(orbit.escape_iteration > 0);
  CHECK(classify_orbit(grow, x0, budget_for(grow)).verdict == Verdict::Escaped);
}

TEST_CASE("cycle detection finds the minimal period") {
  std::vector<StateVector> tail;
  for (int k = 0; k < 30; ++k) tail.push_back(vec({k % 2 == 0 ? 0.2 : 0.7}));
  auto c = detect_cycle(tail, 10, 1e-8);
  REQUIRE(c);
  CHECK(c->period == 2);
  CHECK(c->points.size() == 2);

  tail.clear();
  for (int k = 0; k < 30; ++k) tail.push_back(vec({0.3}));
  REQUIRE(detect_cycle(tail, 10, 1e-8));
  CHECK(detect_cycle(tail, 10, 1e-8)->period == 1);

  tail.clear();
  const double pattern[] = {0.1, 0.5, 0.1, 0.9};
  for (int k = 0; k < 40; ++k) tail.push_back(vec({pattern[k % 4]}));
  const auto p4 = detect_cycle(tail, 10, 1e-8);
  REQUIRE(p4);
  CHECK(p4->period == 4);
  for (int q : {1, 2}) {
    // no divisor of 4 passes the same window
    bool fits = true;
    for (std::size_t i = tail.size() - 20; i + q < tail.size(); ++i) {
      fits = fits && sup_distance(tail[i + q], tail[i]) < 1e-8;
    }
    CHECK_FALSE(fits);
  }

  tail.clear();
  for (int k = 0; k < 30; ++k) tail.push_back(vec({static_cast<double>(k)}));
  CHECK_FALSE(detect_cycle(tail, 10, 1e-8));
  CHECK_THROWS_AS(detect_cycle(std::span(tail).first(20), 10, 1e-8), ContractError);
}

TEST_CASE("cubic fixed points have closed-form multipliers") {
  const SystemSpec cubic = catalog::scalar_cubic();
  const Classification plus = classify_orbit(cubic, vec({0.5}), budget_for(cubic));
  REQUIRE(plus.verdict == Verdict::StableCycle);
  CHECK(plus.cycle->period == 1);
  CHECK(std::abs(plus.cycle->rho - 0.8) < 1e-6);
  CHECK(plus.cycle->points[0][0] == Approx(1.0).margin(1e-10));

  const Classification zero = classify_orbit(cubic, vec({0.0}), budget_for(cubic));
  REQUIRE(zero.verdict == Verdict::UnstableCycle);
  CHECK(std::abs(zero.cycle->rho - 1.1) < 1e-6);
}

TEST_CASE("logistic map at r = 3.2 has a stable 2-cycle") {
  const double r = 3.2;
  const SystemSpec logi = catalog::logistic(r);
  const Classification c = classify_orbit(logi, vec({0.3}), budget_for(logi));
  REQUIRE(c.verdict == Verdict::StableCycle);
  REQUIRE(c.cycle->period == 2);
  CHECK(std::abs(c.cycle->rho - (4 + 2 * r - r * r)) < 1e-6);
  const double disc = std::sqrt((r - 3) * (r + 1));
  std::vector<double> pts{c.cycle->points[0][0], c.cycle->points[1][0]};
  std::sort(pts.begin(), pts.end());
  CHECK(pts[0] == Approx((r + 1 - disc) / (2 * r)).margin(1e-9));
  CHECK(pts[1] == Approx((r + 1 + disc) / (2 * r)).margin(1e-9));
  CHECK(pts[0] == Approx(0.513045).margin(1e-6));
  CHECK(pts[1] == Approx(0.799455).margin(1e-6));
}

TEST_CASE("linear cooperative map contracts with rho 0.7") {
  const SystemSpec lin = catalog::linear_cooperative();
  const Classification c =
      classify_orbit(lin, StateVector(Eigen::Vector2d(0.9, -0.4), lin.grid()), budget_for(lin));
  REQUIRE(c.verdict == Verdict::StableCycle);
  CHECK(std::abs(c.cycle->rho - 0.7) < 1e-8);
}

TEST_CASE("exhausted budgets are Unresolved") {
  const SystemSpec cubic = catalog::scalar_cubic();
  ClassifyBudget b = budget_for(cubic);
  b.max_iterations = 1;
  const Classification c = classify_orbit(cubic, vec({0.5}), b);
  CHECK(c.verdict == Verdict::Unresolved);
  CHECK_FALSE(c.cycle);
  b.tol_cyc = -1;
  CHECK_THROWS_AS(classify_orbit(cubic, vec({0.5}), b), ParameterError);
}

TEST_CASE("power iteration agrees with the dense eigensolve") {
  const SystemSpec cubic = catalog::scalar_cubic();
  const SystemSpec lin = catalog::linear_cooperative();
  const SystemSpec logi = catalog::logistic(3.2);
  const SystemSpec dir = catalog::dirichlet_cubic(15.0, 32);
  for (const auto* sys : {&cubic, &lin, &logi, &dir}) {
    const StateVector x0 = StateVector::constant(sys->grid(), 0.3);
    const Classification c = classify_orbit(*sys, x0, budget_for(*sys));
    REQUIRE(c.cycle);
    const SpectralEstimate power = cycle_spectral_radius(*sys, c.cycle->points);
    const double dense = monodromy_spectral_radius_dense(*sys, c.cycle->points);
    CHECK(std::abs(power.rho - dense) < 1e-6);
  }
}

TEST_CASE("Newton refinement tightens a perturbed cycle") {
  const SystemSpec logi = catalog::logistic(3.2);
  CycleCandidate cand{2, {vec({0.5131}), vec({0.7994})}, 1e-4};
  const RefinedCycle ref = refine_cycle(logi, cand, 1e-13);
  CHECK(ref.refined);
  CHECK(ref.residual < 1e-12);
  CHECK(cycle_residual(logi, ref.points) == Approx(ref.residual).margin(1e-15));
}

TEST_CASE("Hausdorff distance between finite sets") {
  const std::vector<StateVector> zero{vec({0})}, one{vec({1})}, both{vec({0}), vec({1})};
  CHECK(set_distance(zero, zero) == 0.0);
  CHECK(set_distance(zero, one) == 1.0);
  CHECK(set_distance(both, zero) == 1.0);
  CHECK(set_distance(zero, both) == 1.0);
  CHECK_THROWS_AS(set_distance(zero, std::vector<StateVector>{}), ContractError);
}

TEST_CASE("omega set of a converging orbit is one point") {
  const OrbitRecord orbit = iterate_orbit(catalog::scalar_cubic(), vec({0.2}), 800);
  const auto omega = omega_set(orbit, 0.25, 1e-8);
  REQUIRE(omega.size() == 1);
  CHECK(omega[0][0] == Approx(1.0).margin(1e-9));
}

TEST_CASE("upper and lower limit probes at the unstable cubic equilibrium") {
  const SystemSpec cubic = catalog::scalar_cubic();
  const ClassifyBudget b = budget_for(cubic);
  const ProbeReport at0 = omega_plus_probe(cubic, vec({0}), vec({1}), {1e-2, 1e-3, 1e-4}, b);
  CHECK(at0.conclusive);
  CHECK(at0.in_upper_unstable);
  CHECK(at0.in_lower_unstable);
  CHECK(at0.upper.consistent);
  REQUIRE(at0.upper.stabilized.size() == 1);
  CHECK(at0.upper.stabilized[0][0] == Approx(1.0).margin(1e-8));
  REQUIRE(at0.lower.stabilized.size() == 1);
  CHECK(at0.lower.stabilized[0][0] == Approx(-1.0).margin(1e-8));
  REQUIRE(at0.omega_x.size() == 1);
  CHECK(at0.omega_x[0][0] == 0.0);

  const ProbeReport at1 = omega_plus_probe(cubic, vec({1}), vec({1}), {1e-2, 1e-3, 1e-4}, b);
  CHECK(at1.conclusive);
  CHECK_FALSE(at1.in_upper_unstable);
  CHECK(at1.upper.stabilized[0][0] == Approx(1.0).margin(1e-8));

  CHECK_THROWS_AS(omega_plus_probe(cubic, vec({0}), vec({-1}), {1e-2}, b), ContractError);
  CHECK_THROWS_AS(omega_plus_probe(cubic, vec({1.49}), vec({1}), {1e-1}, b), ContractError);
}

TEST_CASE("separation probe distinguishes unstable from stable points") {
  const SystemSpec cubic = catalog::scalar_cubic();
  const ClassifyBudget b = budget_for(cubic);
  CHECK(separation_probe(cubic, vec({0}), {1e-2, 1e-4}, b).delta_est >= 0.9);
  CHECK(separation_probe(cubic, vec({1}), {1e-3}, b).delta_est < 1e-4);
  const SystemSpec lin = catalog::linear_cooperative();
  CHECK(separation_probe(lin, StateVector::constant(lin.grid(), 0.0), {1e-3}, budget_for(lin)).delta_est < 1e-10);
}

TEST_CASE("stable cycles re-attract perturbations") {
  const SystemSpec dir = catalog::dirichlet_cubic(15.0, 16);
  const ClassifyBudget b = budget_for(dir);
  const Classification c = classify_orbit(dir, StateVector::constant(dir.grid(), 0.4), b);
  REQUIRE(c.verdict == Verdict::StableCycle);
  REQUIRE(c.cycle->rho < 0.95);
  const SeparationReport sep = separation_probe(dir, c.cycle->points[0], {1e-3}, b, std::nullopt, 200);
  CHECK(sep.delta_est < 10 * b.tol_cyc);
}
