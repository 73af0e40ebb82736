#include "monolab/numerics.hpp"

#include "monolab/errors.hpp"
#include "monolab/report.hpp"

#include <cmath>
#include <string>

namespace monolab {

void SteppingScheme::validate() const {
  if (steps_per_period < 1) throw ParameterError("steps_per_period must be >= 1");
  if (!(theta >= 0.0 && theta <= 1.0)) throw ParameterError("theta must lie in [0,1]");
  if (!(newton_tol > 0.0) || newton_max_iter < 1) throw ParameterError("invalid Newton settings");
}

void ParabolicSpec::validate() const {
  if (grid.kind == DomainKind::Euclidean) throw GridError("parabolic systems need a spatial grid");
  if (grid.n < 3) throw GridError("parabolic grids need n >= 3");
  if (grid.kind == DomainKind::Radial && grid.radial_dim < 2) throw ParameterError("radial grid needs N >= 2");
  if (!(period > 0.0) || !std::isfinite(period)) throw ParameterError("period must be positive");
  if (!(diffusivity >= 0.0)) throw ParameterError("diffusivity must be nonnegative");
  reaction.validate();
  scheme.validate();
}

Eigen::VectorXd LinearOperatorBand::apply(const Eigen::VectorXd& u) const {
  const int n = size();
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    double acc = diag[i] * u[i];
    if (i > 0) acc += lower[i] * u[i - 1];
    if (i + 1 < n) acc += upper[i] * u[i + 1];
    out[i] = acc;
  }
  if (periodic()) {
    out[0] += lower[0] * u[n - 1];
    out[n - 1] += upper[n - 1] * u[0];
  }
  return out;
}

Eigen::MatrixXd LinearOperatorBand::apply(const Eigen::MatrixXd& u) const {
  const int n = size();
  Eigen::MatrixXd out(n, u.cols());
  for (int i = 0; i < n; ++i) {
    out.row(i) = diag[i] * u.row(i);
    if (i > 0) out.row(i) += lower[i] * u.row(i - 1);
    if (i + 1 < n) out.row(i) += upper[i] * u.row(i + 1);
  }
  if (periodic()) {
    out.row(0) += lower[0] * u.row(n - 1);
    out.row(n - 1) += upper[n - 1] * u.row(0);
  }
  return out;
}

Eigen::MatrixXd LinearOperatorBand::dense() const {
  const int n = size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = diag[i];
    if (i > 0) a(i, i - 1) = lower[i];
    if (i + 1 < n) a(i, i + 1) = upper[i];
  }
  if (periodic()) {
    a(0, n - 1) += lower[0];
    a(n - 1, 0) += upper[n - 1];
  }
  return a;
}

LinearOperatorBand build_diffusion(const GridDescriptor& grid) {
  if (grid.kind == DomainKind::Euclidean) throw GridError("diffusion needs a spatial grid");
  if (grid.n < 3) throw GridError("diffusion needs n >= 3 nodes");
  const int n = grid.n;
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  LinearOperatorBand op{grid, Eigen::VectorXd::Constant(n, inv_h2), Eigen::VectorXd::Constant(n, -2.0 * inv_h2),
                        Eigen::VectorXd::Constant(n, inv_h2)};
  switch (grid.kind) {
    case DomainKind::IntervalDirichlet:
      op.lower[0] = 0.0;
      op.upper[n - 1] = 0.0;
      break;
    case DomainKind::IntervalNeumann:
      // ghost nodes u[-1] = u[1], u[n] = u[n-2]
      op.lower[0] = 0.0;
      op.upper[0] = 2.0 * inv_h2;
      op.lower[n - 1] = 2.0 * inv_h2;
      op.upper[n - 1] = 0.0;
      break;
    case DomainKind::Ring: break;
    case DomainKind::Radial: {
      if (grid.radial_dim < 2) throw ParameterError("radial grid needs N >= 2");
      const double dim = grid.radial_dim;
      // r = 0: U_rr + (N-1)/r U_r -> N U_rr with the mirror node U(-h) = U(h).
      op.lower[0] = 0.0;
      op.diag[0] = -2.0 * dim * inv_h2;
      op.upper[0] = 2.0 * dim * inv_h2;
      // Finite-volume form: face areas (i ± 1/2)^(N-1) over the shell measure
      // ((i+1/2)^N - (i-1/2)^N)/N, exact on quadratics.
      for (int i = 1; i < n; ++i) {
        const double shell = (std::pow(i + 0.5, dim) - std::pow(i - 0.5, dim)) / dim;
        const double wm = std::pow(i - 0.5, dim - 1.0) / shell;
        const double wp = std::pow(i + 0.5, dim - 1.0) / shell;
        op.lower[i] = wm * inv_h2;
        op.upper[i] = wp * inv_h2;
        op.diag[i] = -(wm + wp) * inv_h2;
      }
      op.upper[n - 1] = 0.0;  // U(1) = 0
      break;
    }
    case DomainKind::Euclidean: break;
  }
  return op;
}

namespace {

template <typename Mat>
Mat gradient_impl(const GridDescriptor& grid, const Mat& u) {
  const int n = grid.n;
  const double inv_2h = 1.0 / (2.0 * grid.h);
  Mat g = Mat::Zero(u.rows(), u.cols());
  if (grid.kind == DomainKind::Euclidean) return g;
  for (int i = 1; i + 1 < n; ++i) g.row(i) = (u.row(i + 1) - u.row(i - 1)) * inv_2h;
  switch (grid.kind) {
    case DomainKind::IntervalDirichlet:
      g.row(0) = u.row(1) * inv_2h;
      g.row(n - 1) = -u.row(n - 2) * inv_2h;
      break;
    case DomainKind::IntervalNeumann: break;  // mirrored ghosts give zero slope
    case DomainKind::Ring:
      g.row(0) = (u.row(1) - u.row(n - 1)) * inv_2h;
      g.row(n - 1) = (u.row(0) - u.row(n - 2)) * inv_2h;
      break;
    case DomainKind::Radial: g.row(n - 1) = -u.row(n - 2) * inv_2h; break;
    case DomainKind::Euclidean: break;
  }
  return g;
}

}  // namespace

Eigen::VectorXd central_gradient(const GridDescriptor& grid, const Eigen::VectorXd& u) {
  return gradient_impl(grid, u);
}

BandedSolver::BandedSolver(const LinearOperatorBand& op, double c) : n_(op.size()), cyclic_(op.periodic()) {
  const int n = n_;
  Eigen::VectorXd sub(n), diag(n), super(n);
  for (int i = 0; i < n; ++i) {
    sub[i] = -c * op.lower[i];
    diag[i] = 1.0 - c * op.diag[i];
    super[i] = -c * op.upper[i];
  }
  double beta = 0.0;
  if (cyclic_) {
    const double top_right = sub[0];
    const double bottom_left = super[n - 1];
    gamma_ = -diag[0];
    diag[0] -= gamma_;
    diag[n - 1] -= bottom_left * top_right / gamma_;
    alpha_ = top_right;
    beta = bottom_left;
    sub[0] = 0.0;
    super[n - 1] = 0.0;
  } else {
    sub[0] = 0.0;
    super[n - 1] = 0.0;
  }
  sub_ = sub;
  denom_.resize(n);
  cprime_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double d = diag[i] - (i > 0 ? sub[i] * cprime_[i - 1] : 0.0);
    if (!(std::abs(d) > 1e-300)) throw NumericalFailure("singular tridiagonal pivot", 0.0, i);
    denom_[i] = d;
    cprime_[i] = super[i] / d;
  }
  if (cyclic_) {
    z_ = Eigen::VectorXd::Zero(n);
    z_[0] = gamma_;
    z_[n - 1] = beta;
    solve_tridiagonal(z_);
    z_factor_ = 1.0 + z_[0] + alpha_ * z_[n - 1] / gamma_;
    if (!(std::abs(z_factor_) > 1e-300)) throw NumericalFailure("singular cyclic correction", 0.0, -1);
  }
}

template <typename Column>
void BandedSolver::solve_tridiagonal(Column&& x) const {
  const int n = n_;
  x.row(0) /= denom_[0];
  for (int i = 1; i < n; ++i) x.row(i) = (x.row(i) - sub_[i] * x.row(i - 1)) / denom_[i];
  for (int i = n - 2; i >= 0; --i) x.row(i) -= cprime_[i] * x.row(i + 1);
}

void BandedSolver::solve_in_place(Eigen::VectorXd& rhs) const {
  solve_tridiagonal(rhs);
  if (cyclic_) {
    const double proj = (rhs[0] + alpha_ * rhs[n_ - 1] / gamma_) / z_factor_;
    rhs -= proj * z_;
  }
}

void BandedSolver::solve_in_place(Eigen::MatrixXd& rhs) const {
  solve_tridiagonal(rhs);
  if (cyclic_) {
    const Eigen::RowVectorXd proj = (rhs.row(0) + (alpha_ / gamma_) * rhs.row(n_ - 1)) / z_factor_;
    rhs -= z_ * proj;
  }
}

ImexStepper::ImexStepper(const ParabolicSpec& spec, double escape_bound)
    : spec_((spec.validate(), spec)),
      op_(build_diffusion(spec.grid)),
      solver_(op_, spec.scheme.theta * spec.time_step() * spec.diffusivity),
      dt_(spec.time_step()),
      escape_bound_(escape_bound),
      coords_(spec.grid.n) {
  for (int i = 0; i < spec.grid.n; ++i) coords_[i] = spec.grid.coordinate(i);
}

Eigen::VectorXd ImexStepper::reaction(double t, const Eigen::VectorXd& u) const {
  const auto& f = spec_.reaction;
  const int n = static_cast<int>(u.size());
  Eigen::VectorXd xi = f.gradient_coeff != 0.0 ? central_gradient(spec_.grid, u) : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = f.value(t, coords_[i], u[i], xi[i], spec_.period);
  return out;
}

Eigen::MatrixXd ImexStepper::reaction_jvp(double t, const Eigen::VectorXd& u, const Eigen::MatrixXd& v) const {
  const auto& f = spec_.reaction;
  const int n = static_cast<int>(u.size());
  Eigen::VectorXd du(n);
  for (int i = 0; i < n; ++i) du[i] = f.du(t, coords_[i], u[i], spec_.period);
  Eigen::MatrixXd out = du.asDiagonal() * v;
  if (f.gradient_coeff != 0.0) out += f.dxi() * gradient_impl(spec_.grid, v);
  return out;
}

namespace {

// Values this small carry no information but drift into subnormal range,
// where arithmetic is orders of magnitude slower.
constexpr double kFlushBelow = 1e-280;

void flush_tiny(Eigen::VectorXd& u) {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) < kFlushBelow) u[i] = 0.0;
  }
}

}  // namespace

void ImexStepper::check(const Eigen::VectorXd& u, double t, long step_index) const {
  if (!u.allFinite()) throw NumericalFailure("non-finite state after IMEX step", t, step_index);
  if (u.cwiseAbs().maxCoeff() > escape_bound_) {
    throw EscapeError("state left the inflated trapping box (t=" + format_value(t) +
                      ", step=" + std::to_string(step_index) + ")");
  }
}

Eigen::VectorXd ImexStepper::step(const Eigen::VectorXd& u, double t, long step_index) const {
  const double theta = spec_.scheme.theta;
  const double d = spec_.diffusivity;
  const Eigen::VectorXd explicit_part = u + (1.0 - theta) * dt_ * d * op_.apply(u);
  const Eigen::VectorXd k0 = reaction(t, u);
  Eigen::VectorXd predictor = explicit_part + dt_ * k0;
  solver_.solve_in_place(predictor);
  const Eigen::VectorXd k1 = reaction(t + dt_, predictor);
  Eigen::VectorXd next = explicit_part + 0.5 * dt_ * (k0 + k1);
  solver_.solve_in_place(next);
  flush_tiny(next);
  check(next, t, step_index);
  return next;
}

void ImexStepper::step_tangent(Eigen::VectorXd& u, Eigen::MatrixXd& tangents, double t, long step_index) const {
  const double theta = spec_.scheme.theta;
  const double d = spec_.diffusivity;
  const Eigen::VectorXd explicit_part = u + (1.0 - theta) * dt_ * d * op_.apply(u);
  const Eigen::MatrixXd explicit_tangent = tangents + (1.0 - theta) * dt_ * d * op_.apply(tangents);
  const Eigen::VectorXd k0 = reaction(t, u);
  const Eigen::MatrixXd j0 = reaction_jvp(t, u, tangents);

  Eigen::VectorXd predictor = explicit_part + dt_ * k0;
  solver_.solve_in_place(predictor);
  Eigen::MatrixXd predictor_tangent = explicit_tangent + dt_ * j0;
  solver_.solve_in_place(predictor_tangent);

  const Eigen::VectorXd k1 = reaction(t + dt_, predictor);
  const Eigen::MatrixXd j1 = reaction_jvp(t + dt_, predictor, predictor_tangent);

  Eigen::VectorXd next = explicit_part + 0.5 * dt_ * (k0 + k1);
  solver_.solve_in_place(next);
  Eigen::MatrixXd next_tangent = explicit_tangent + 0.5 * dt_ * (j0 + j1);
  solver_.solve_in_place(next_tangent);

  flush_tiny(next);
  check(next, t, step_index);
  if (!next_tangent.allFinite()) throw NumericalFailure("non-finite tangent", t, step_index);
  u = std::move(next);
  tangents = std::move(next_tangent);
}

Eigen::VectorXd ImexStepper::propagate(Eigen::VectorXd u, double t0, int periods) const {
  const long steps = static_cast<long>(periods) * spec_.scheme.steps_per_period;
  for (long k = 0; k < steps; ++k) u = step(u, t0 + static_cast<double>(k) * dt_, k);
  return u;
}

void ImexStepper::propagate_tangent(Eigen::VectorXd& u, Eigen::MatrixXd& tangents, double t0, int periods) const {
  const long steps = static_cast<long>(periods) * spec_.scheme.steps_per_period;
  for (long k = 0; k < steps; ++k) step_tangent(u, tangents, t0 + static_cast<double>(k) * dt_, k);
}

namespace {

void require_grid(const StateVector& s, const ParabolicSpec& spec) {
  if (!(s.grid() == spec.grid)) throw DimensionError("state grid does not match the parabolic system grid");
}

}  // namespace

StateVector step(const StateVector& state, double t, const ParabolicSpec& spec) {
  require_grid(state, spec);
  const ImexStepper stepper(spec);
  return state.with_values(stepper.step(state.values(), t));
}

StateVector propagate_period(const StateVector& state, const ParabolicSpec& spec, double escape_bound) {
  require_grid(state, spec);
  const ImexStepper stepper(spec, escape_bound);
  return state.with_values(stepper.propagate(state.values(), spec.phase, 1));
}

std::pair<StateVector, StateVector> propagate_tangent(const StateVector& state, const StateVector& tangent,
                                                      const ParabolicSpec& spec, double escape_bound) {
  require_grid(state, spec);
  require_grid(tangent, spec);
  const ImexStepper stepper(spec, escape_bound);
  Eigen::VectorXd u = state.values();
  Eigen::MatrixXd v = tangent.values();
  stepper.propagate_tangent(u, v, spec.phase, 1);
  return {state.with_values(std::move(u)), tangent.with_values(v.col(0))};
}

Eigen::MatrixXd poincare_jacobian(const StateVector& state, const ParabolicSpec& spec, double escape_bound) {
  require_grid(state, spec);
  const ImexStepper stepper(spec, escape_bound);
  Eigen::VectorXd u = state.values();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(state.size(), state.size());
  stepper.propagate_tangent(u, v, spec.phase, 1);
  return v;
}

}  // namespace monolab
