#pragma once

#include <string_view>
#include <vector>

namespace monolab {

enum class ReactionKind { Cubic, Linear, Tabulated };

std::string_view to_string(ReactionKind kind);
ReactionKind reaction_kind_from_string(std::string_view name);

/// f(t, x, u, ξ) = a(t)·λ·s(x)·g(u) + β·ξ with
///   a(t) = 1 + m·sin(2πt/τ)          (mean one, positive for m < 1)
///   s(x) = 1 + σ·cos(2πx)            (σ = profile_amplitude, default 0)
///   g(u) = u(1 − u²), u, or a C¹ cubic-Hermite interpolant of a table.
/// The gradient term β·ξ is experimental; shipped systems keep β = 0.
struct NonlinearitySpec {
  ReactionKind kind = ReactionKind::Cubic;
  double lambda = 1.0;
  double modulation = 0.0;
  double profile_amplitude = 0.0;
  double gradient_coeff = 0.0;
  std::vector<double> table_u;
  std::vector<double> table_f;

  /// Throws ParameterError on m ∉ [0,1), |σ| ≥ 1 or a malformed table.
  void validate() const;

  double modulation_at(double t, double period) const;
  double profile_at(double x) const;

  double shape(double u) const;
  double shape_derivative(double u) const;

  double value(double t, double x, double u, double xi, double period) const;
  /// ∂f/∂u
  double du(double t, double x, double u, double period) const;
  /// ∂f/∂ξ
  double dxi() const { return gradient_coeff; }

  bool operator==(const NonlinearitySpec&) const = default;
};

}  // namespace monolab
