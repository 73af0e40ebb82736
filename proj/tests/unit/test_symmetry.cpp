#include "monolab/errors.hpp"
#include "monolab/order.hpp"
#include "monolab/symmetry.hpp"
#include "monolab/systems.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace monolab;
using Catch::Approx;

namespace {

StateVector ring_vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double a : v) x[i++] = a;
  return StateVector(x, GridDescriptor::ring(static_cast<int>(v.size())));
}

}  // namespace

TEST_CASE("actions permute nodal values") {
  const auto rot = GroupActionSpec::ring_rotation(4);
  CHECK(rot.order() == 4);
  CHECK(apply_action(rot, 1, ring_vec({1, 0, 0, 0})) == ring_vec({0, 1, 0, 0}));
  const auto triv = GroupActionSpec::trivial(4);
  CHECK(apply_action(triv, 0, ring_vec({1, 2, 3, 4})) == ring_vec({1, 2, 3, 4}));
  const auto refl = GroupActionSpec::interval_reflection(4);
  CHECK(apply_action(refl, 1, ring_vec({1, 2, 3, 4})) == ring_vec({4, 3, 2, 1}));
  for (const auto* a : {&rot, &triv, &refl}) {
    CHECK(apply_action(*a, a->order() - 1, ring_vec({2, 2, 2, 2})) == ring_vec({2, 2, 2, 2}));
  }
  CHECK_THROWS_AS(apply_action(rot, 1, ring_vec({1, 2, 3})), DimensionError);
  CHECK_THROWS_AS(GroupActionSpec::ring_rotation(6, 4), ParameterError);
}

TEST_CASE("action axioms and order preservation") {
  const auto rot = GroupActionSpec::ring_rotation(6, 3);
  const StateVector u = ring_vec({0.1, -0.4, 0.9, 0.3, -0.2, 0.5});
  const StateVector w = ring_vec({0.2, -0.1, 1.0, 0.3, 0.0, 0.6});
  REQUIRE(leq(u, w));
  CHECK(apply_action(rot, rot.identity(), u) == u);
  for (int g = 0; g < rot.order(); ++g) {
    CHECK(apply_action(rot, g, u).sup_norm() == u.sup_norm());
    CHECK(leq(apply_action(rot, g, u), apply_action(rot, g, w)));
    for (int h = 0; h < rot.order(); ++h) {
      CHECK(apply_action(rot, g, apply_action(rot, h, u)) == apply_action(rot, rot.compose(g, h), u));
    }
  }
}

TEST_CASE("symmetry deviation") {
  const auto rot = GroupActionSpec::ring_rotation(4);
  CHECK(symmetry_deviation(ring_vec({3, 3, 3, 3}), rot).deviation == 0.0);
  const SymmetryVerdict e1 = symmetry_deviation(ring_vec({1, 0, 0, 0}), rot);
  CHECK(e1.deviation == 1.0);
  CHECK_FALSE(e1.symmetric);
  CHECK(e1.per_generator.size() == 1);
  CHECK(symmetry_deviation(ring_vec({1, 0, 0, 0}), GroupActionSpec::trivial(4)).deviation == 0.0);
}

TEST_CASE("spatial variance") {
  CHECK(spatial_variance(ring_vec({2, 2, 2})) == 0.0);
  const StateVector u(Eigen::Vector2d(1, -1), GridDescriptor::euclidean(2));
  CHECK(spatial_variance(u) == 1.0);
  const StateVector v(Eigen::Vector3d(0.3, 1.1, -0.4), GridDescriptor::euclidean(3));
  CHECK(spatial_variance(v.with_values(2.5 * v.values())) == Approx(6.25 * spatial_variance(v)));
}

TEST_CASE("equivariance of the discretized systems") {
  const SystemSpec ring = catalog::ring_cubic(5.0, 16);
  const PropertyReport r = check_equivariance(ring, GroupActionSpec::ring_rotation(16), 5, 1, 1e-12);
  CHECK(r.violations == 0);
  CHECK(r.worst_margin < 1e-12);

  const SystemSpec dir = catalog::dirichlet_cubic(15.0, 16);
  CHECK(check_equivariance(dir, GroupActionSpec::interval_reflection(16), 5, 2, 1e-12).violations == 0);

  ParabolicSpec profiled = catalog::cubic_parabolic(GridDescriptor::ring(16), 5.0);
  profiled.reaction.profile_amplitude = 0.5;
  const SystemSpec broken = SystemSpec::parabolic(profiled, 1.5, "ring_profile");
  const PropertyReport b = check_equivariance(broken, GroupActionSpec::ring_rotation(16), 5, 3, 1e-10);
  CHECK(b.violations == b.pairs_tested);
  CHECK(b.worst_margin > 1e-4);
}

TEST_CASE("fixed points are carried to fixed points") {
  const SystemSpec dir = catalog::dirichlet_cubic(15.0, 16);
  const auto refl = GroupActionSpec::interval_reflection(16);
  const Classification c =
      classify_orbit(dir, StateVector::constant(dir.grid(), 0.3), ClassifyBudget::defaults_for(dir));
  REQUIRE(c.verdict == Verdict::StableCycle);
  const StateVector moved = apply_action(refl, 1, c.cycle->points[0]);
  CHECK(sup_distance(evaluate(dir, moved), moved) < 1e-9);
}

TEST_CASE("ring limits become homogeneous") {
  const SystemSpec ring = catalog::ring_cubic(5.0, 16);
  const auto rot = GroupActionSpec::ring_rotation(16);
  const ClassifyBudget b = ClassifyBudget::defaults_for(ring);

  const SymmetricLimit flat = classify_symmetric_limit(ring, rot, StateVector::constant(ring.grid(), 0.4), b);
  CHECK(flat.symmetric_limit);
  CHECK(flat.point_verdicts.at(0).deviation < 1e-12);

  Eigen::VectorXd bump = Eigen::VectorXd::Ones(16);
  bump[0] += 0.3;
  const SymmetricLimit e1 = classify_symmetric_limit(ring, rot, StateVector(bump, ring.grid()), b);
  REQUIRE(e1.classification.verdict == Verdict::StableCycle);
  CHECK(e1.symmetric_limit);
  CHECK(e1.point_verdicts.at(0).deviation < 1e-5);

  SamplerSpec s;
  const SymmetryReport rep = symmetry_experiment(ring, rot, s, 10, b);
  CHECK(rep.symmetric_limits == rep.counts.at(Verdict::StableCycle));
  CHECK(rep.max_deviation < 1e-5);

  const SymmetryReport triv = symmetry_experiment(ring, GroupActionSpec::trivial(16), s, 5, b);
  CHECK(triv.symmetric_limits == triv.counts.at(Verdict::StableCycle));
}
