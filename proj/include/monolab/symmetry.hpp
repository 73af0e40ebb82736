#pragma once

#include "monolab/asymptotics.hpp"
#include "monolab/prevalence.hpp"
#include "monolab/report.hpp"
#include "monolab/state.hpp"
#include "monolab/systems.hpp"

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

namespace monolab {

enum class ActionKind { Trivial, RingRotation, IntervalReflection };
std::string_view to_string(ActionKind kind);
ActionKind action_kind_from_string(std::string_view name);

/// A finite group acting on grid nodes by permutations, (g·u)_i = u_{π_g(i)}.
///
/// Elements are indexed 0 … order−1 with 0 the identity. RingRotation of
/// order m (m dividing n) is generated by the shift by n/m nodes, element g
/// shifting by g·n/m; (shift·u)_i = u_{i−s mod n}. IntervalReflection has
/// order two, element 1 mapping node i to n−1−i.
class GroupActionSpec {
 public:
  static GroupActionSpec trivial(int n);
  static GroupActionSpec ring_rotation(int n, int order = 0);  // 0 → full group of order n
  static GroupActionSpec interval_reflection(int n);

  ActionKind kind() const { return kind_; }
  int nodes() const { return n_; }
  int order() const { return order_; }
  std::vector<int> generators() const;
  /// Index map π_g with (g·u)_i = u_{π_g(i)}.
  std::vector<int> permutation(int g) const;
  int compose(int g, int h) const;
  int identity() const { return 0; }

  bool operator==(const GroupActionSpec&) const = default;

 private:
  GroupActionSpec(ActionKind kind, int n, int order) : kind_(kind), n_(n), order_(order) {}
  ActionKind kind_;
  int n_;
  int order_;
};

StateVector apply_action(const GroupActionSpec& action, int g, const StateVector& u);

/// ‖F(g·u) − g·F(u)‖_∞ over random box states and every generator; a
/// violation is any value ≥ tol. worst_margin holds the largest value.
PropertyReport check_equivariance(const SystemSpec& system, const GroupActionSpec& action, int sample_count,
                                  std::uint64_t seed, double tol);

struct SymmetryVerdict {
  double deviation = 0.0;
  bool symmetric = true;
  std::vector<double> per_generator;
};

SymmetryVerdict symmetry_deviation(const StateVector& u, const GroupActionSpec& action, double tol_sym = 1e-5);

/// Mean squared deviation of the nodal values from their mean.
double spatial_variance(const StateVector& u);

struct SymmetricLimit {
  Classification classification;
  std::vector<SymmetryVerdict> point_verdicts;  // one per cycle point
  bool symmetric_limit = false;                // stable cycle and every point symmetric
};

SymmetricLimit classify_symmetric_limit(const SystemSpec& system, const GroupActionSpec& action,
                                        const StateVector& x0, const ClassifyBudget& budget,
                                        double tol_sym = 1e-5);

struct SymmetryReport {
  long samples = 0;
  std::map<Verdict, long> counts;
  long symmetric_limits = 0;
  double symmetric_fraction = 0.0;
  double max_deviation = 0.0;  // over stable-cycle points
  std::map<int, long> period_histogram;
  double tol_sym = 0.0;
  std::vector<double> deviations;  // per sample, max over its cycle points (NaN without a cycle)
};

SymmetryReport symmetry_experiment(const SystemSpec& system, const GroupActionSpec& action,
                                   const SamplerSpec& sampler, long count, const ClassifyBudget& budget,
                                   double tol_sym = 1e-5, ParallelOptions parallel = {});

}  // namespace monolab
