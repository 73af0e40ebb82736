#pragma once

#include "monolab/numerics.hpp"
#include "monolab/order.hpp"
#include "monolab/report.hpp"
#include "monolab/state.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace monolab {

enum class AnalyticMap {
  Cubic,     // u + h·u(1 − u²)
  Logistic,  // r·u(1 − u), not monotone on [0,1]
  Negation,  // −u, order reversing
};

std::string_view to_string(AnalyticMap map);
AnalyticMap analytic_map_from_string(std::string_view name);

struct AnalyticScalarSystem {
  AnalyticMap map = AnalyticMap::Cubic;
  double parameter = 0.1;  // h for Cubic, r for Logistic, unused for Negation
  bool operator==(const AnalyticScalarSystem&) const = default;
};

struct LinearCooperativeSystem {
  Eigen::MatrixXd matrix;
  bool operator==(const LinearCooperativeSystem& other) const { return matrix == other.matrix; }
};

/// Immutable definition of a discrete-time map F together with its trapping
/// box. Construct through the factories, which enforce the invariants.
class SystemSpec {
 public:
  using Kind = std::variant<AnalyticScalarSystem, LinearCooperativeSystem, ParabolicSpec>;

  static SystemSpec analytic(AnalyticScalarSystem map, double kappa, std::string name = {});
  static SystemSpec linear(Eigen::MatrixXd matrix, double kappa, bool monotone_expected, std::string name = {});
  static SystemSpec parabolic(ParabolicSpec spec, double kappa, std::string name = {});

  const Kind& kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double kappa() const { return kappa_; }
  bool monotone_expected() const { return monotone_expected_; }

  bool is_parabolic() const { return std::holds_alternative<ParabolicSpec>(kind_); }
  const ParabolicSpec* parabolic_spec() const { return std::get_if<ParabolicSpec>(&kind_); }

  const GridDescriptor& grid() const { return grid_; }
  int dimension() const { return grid_.n; }

  /// Componentwise bounds of the trapping box. Symmetric [−κ, κ] except the
  /// logistic map, whose invariant interval is [0,1].
  double box_lower() const;
  double box_upper() const;
  /// Bound of the box inflated about its center by a factor of two; leaving
  /// it counts as escape.
  bool inside_escape_box(const StateVector& x) const;

  /// Default cycle-detection tolerance: looser for parabolic systems whose
  /// iterates carry discretization error.
  double default_cycle_tolerance() const { return is_parabolic() ? 1e-6 : 1e-8; }

  bool operator==(const SystemSpec& other) const {
    return kind_ == other.kind_ && kappa_ == other.kappa_ && monotone_expected_ == other.monotone_expected_ &&
           name_ == other.name_;
  }

 private:
  SystemSpec(Kind kind, double kappa, bool monotone_expected, std::string name);

  Kind kind_;
  double kappa_;
  bool monotone_expected_;
  std::string name_;
  GridDescriptor grid_;
};

/// F(x). Parabolic systems integrate one period and throw EscapeError when
/// the state leaves the 2κ box.
StateVector evaluate(const SystemSpec& system, const StateVector& x);

/// Dense DF(x): closed form for analytic and linear maps, tangent-propagated
/// columns for parabolic systems.
Eigen::MatrixXd jacobian(const SystemSpec& system, const StateVector& x);

/// (F(x), DF(x)) in one pass; parabolic systems advance base and tangents
/// together.
std::pair<StateVector, Eigen::MatrixXd> evaluate_with_jacobian(const SystemSpec& system, const StateVector& x);

/// DF(x)·v without assembling the matrix.
StateVector jacobian_apply(const SystemSpec& system, const StateVector& x, const StateVector& v);

/// Samples (t, node, u) with |u| ∈ [κ, 2κ] and reports every u·f(t,x,u,0) ≥ 0.
/// For analytic maps f is the increment F(u) − u. worst_margin holds the
/// largest u·f seen (must stay negative).
PropertyReport validate_dissipativity(const SystemSpec& system, int probe_count, std::uint64_t seed);

/// Iterates F for `horizon` steps from random box samples and reports every
/// exit from the closed box. worst_margin holds the largest excess
/// max_i max(x_i − upper, lower − x_i) seen, negative while inside.
PropertyReport trapping_check(const SystemSpec& system, int sample_count, int horizon, std::uint64_t seed);
PropertyReport trapping_check_from(const SystemSpec& system, const std::vector<StateVector>& initial, int horizon,
                                   std::uint64_t seed = 0);

/// Strong positivity of the derivative: min component of DF(x)·v must exceed eta for v ≥ 0, v ≠ 0.
/// Even-numbered probes use coordinate vectors, odd ones random v ≥ 0.
/// worst_margin holds the minimum component observed.
PropertyReport check_strong_positivity(const SystemSpec& system, int probe_count, std::uint64_t seed,
                                       double eta = OrderTolerances{}.eta_interior);
PropertyReport check_strong_positivity_at(const SystemSpec& system,
                                          const std::vector<std::pair<StateVector, StateVector>>& probes,
                                          double eta = OrderTolerances{}.eta_interior, std::uint64_t seed = 0);

/// A smooth random state inside the box (used by trapping checks).
StateVector smooth_box_sample(const SystemSpec& system, std::uint64_t seed, std::uint64_t index, double amplitude);

/// Built-in systems.
namespace catalog {
SystemSpec scalar_cubic(double h = 0.1);
SystemSpec logistic(double r);
SystemSpec negation();
SystemSpec linear_cooperative();  // ((0.5,0.2),(0.2,0.5))
SystemSpec linear_decoupled();    // ((0.5,0),(0,0.5)), not strongly positive

ParabolicSpec cubic_parabolic(GridDescriptor grid, double lambda, double modulation = 0.3);
SystemSpec dirichlet_cubic(double lambda = 15.0, int n = 32);
SystemSpec neumann_cubic(double lambda = 5.0, int n = 32);
SystemSpec ring_cubic(double lambda = 5.0, int n = 32);
SystemSpec radial_cubic(int ambient_dim = 3, double lambda = 15.0, int n = 32);

/// The parabolic systems the laboratory ships and validates. Neumann and ring
/// use λ = 5: at λ = 15 one period contracts nearby states towards ±1 by
/// about e^{-30}, below what double precision can resolve as a positive gap.
std::vector<SystemSpec> shipped_parabolic();
}  // namespace catalog

}  // namespace monolab
