#pragma once

#include "monolab/nonlinearity.hpp"
#include "monolab/state.hpp"

#include <Eigen/Core>

#include <limits>
#include <utility>

namespace monolab {

struct SteppingScheme {
  int steps_per_period = 200;
  double theta = 0.5;
  // Reserved for a fully implicit mode; the IMEX stepper never iterates.
  double newton_tol = 1e-10;
  int newton_max_iter = 20;

  void validate() const;
  bool operator==(const SteppingScheme&) const = default;
};

/// Time-periodic reaction-diffusion problem u_t = D·Δu + f(t,x,u,∇u) on a
/// one-dimensional grid (interval, ring, or radial reduction of a ball).
struct ParabolicSpec {
  GridDescriptor grid;
  NonlinearitySpec reaction;
  double period = 1.0;
  double phase = 0.0;  // Poincaré section at t = phase
  double diffusivity = 1.0;
  SteppingScheme scheme;

  void validate() const;
  double time_step() const { return period / scheme.steps_per_period; }
  bool operator==(const ParabolicSpec&) const = default;
};

/// Discrete diffusion operator stored as three diagonals plus the two
/// wrap-around corners used by the ring (zero otherwise).
///
/// Row i reads  lower[i]·u[i−1] + diag[i]·u[i] + upper[i]·u[i+1].
/// lower[0] couples to u[n−1] and upper[n−1] to u[0] on the ring; for the
/// other grids those two entries are zero.
struct LinearOperatorBand {
  GridDescriptor grid;
  Eigen::VectorXd lower;
  Eigen::VectorXd diag;
  Eigen::VectorXd upper;

  int size() const { return static_cast<int>(diag.size()); }
  bool periodic() const { return grid.kind == DomainKind::Ring; }

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& u) const;
  Eigen::MatrixXd dense() const;
};

/// Second-order central differences. Dirichlet eliminates the boundary,
/// Neumann mirrors ghost nodes, the ring wraps, and the radial grid uses
/// the N·U_rr limit at r = 0 with a flux-form stencil elsewhere.
LinearOperatorBand build_diffusion(const GridDescriptor& grid);

/// Central first difference ∂u/∂x consistent with the boundary condition.
Eigen::VectorXd central_gradient(const GridDescriptor& grid, const Eigen::VectorXd& u);

/// Prefactored solver for (I − c·L) with L tridiagonal (cyclic on the ring).
class BandedSolver {
 public:
  BandedSolver(const LinearOperatorBand& op, double c);

  void solve_in_place(Eigen::VectorXd& rhs) const;
  void solve_in_place(Eigen::MatrixXd& rhs) const;

 private:
  template <typename Column>
  void solve_tridiagonal(Column&& x) const;

  int n_;
  bool cyclic_ = false;
  Eigen::VectorXd sub_;    // sub-diagonal of the (modified) tridiagonal part
  Eigen::VectorXd denom_;  // Thomas pivots
  Eigen::VectorXd cprime_;
  // Sherman–Morrison data for the cyclic case.
  double alpha_ = 0.0;
  double gamma_ = 0.0;
  Eigen::VectorXd z_;
  double z_factor_ = 0.0;
};

/// IMEX stepper: diffusion θ-weighted and solved implicitly, reaction
/// explicit through a Heun predictor–corrector so the step is second order
/// at θ = ½:
///   A u*     = B uⁿ + Δt f(tₙ, uⁿ)
///   A uⁿ⁺¹   = B uⁿ + ½Δt [f(tₙ, uⁿ) + f(tₙ₊₁, u*)]
/// with A = I − θΔt·D·L and B = I + (1−θ)Δt·D·L.
class ImexStepper {
 public:
  explicit ImexStepper(const ParabolicSpec& spec, double escape_bound = std::numeric_limits<double>::infinity());

  const ParabolicSpec& spec() const { return spec_; }
  const LinearOperatorBand& diffusion() const { return op_; }
  double dt() const { return dt_; }

  Eigen::VectorXd step(const Eigen::VectorXd& u, double t, long step_index = 0) const;

  /// Advances u and the tangent block V together with the exact derivative
  /// of `step` (reaction derivatives frozen at uⁿ and u*).
  void step_tangent(Eigen::VectorXd& u, Eigen::MatrixXd& tangents, double t, long step_index = 0) const;

  /// `periods` full periods starting at time t0 (M steps per period).
  Eigen::VectorXd propagate(Eigen::VectorXd u, double t0, int periods) const;
  void propagate_tangent(Eigen::VectorXd& u, Eigen::MatrixXd& tangents, double t0, int periods) const;

 private:
  Eigen::VectorXd reaction(double t, const Eigen::VectorXd& u) const;
  Eigen::MatrixXd reaction_jvp(double t, const Eigen::VectorXd& u, const Eigen::MatrixXd& v) const;
  void check(const Eigen::VectorXd& u, double t, long step_index) const;

  ParabolicSpec spec_;
  LinearOperatorBand op_;
  BandedSolver solver_;
  double dt_;
  double escape_bound_;
  Eigen::VectorXd coords_;
};

/// One IMEX step of length τ/M from time t.
StateVector step(const StateVector& state, double t, const ParabolicSpec& spec);

/// The Poincaré map: M steps over [phase, phase + τ].
StateVector propagate_period(const StateVector& state, const ParabolicSpec& spec,
                             double escape_bound = std::numeric_limits<double>::infinity());

/// (F(state), DF(state)·tangent).
std::pair<StateVector, StateVector> propagate_tangent(const StateVector& state, const StateVector& tangent,
                                                      const ParabolicSpec& spec,
                                                      double escape_bound = std::numeric_limits<double>::infinity());

/// Dense DF(state) from n unit-vector tangents advanced in lockstep.
Eigen::MatrixXd poincare_jacobian(const StateVector& state, const ParabolicSpec& spec,
                                  double escape_bound = std::numeric_limits<double>::infinity());

}  // namespace monolab
