#include "monolab/systems.hpp"

#include "monolab/errors.hpp"
#include "monolab/prevalence.hpp"
#include "monolab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace monolab {

std::string_view to_string(AnalyticMap map) {
  switch (map) {
    case AnalyticMap::Cubic: return "cubic";
    case AnalyticMap::Logistic: return "logistic";
    case AnalyticMap::Negation: return "negation";
  }
  return "unknown";
}

AnalyticMap analytic_map_from_string(std::string_view name) {
  if (name == "cubic") return AnalyticMap::Cubic;
  if (name == "logistic") return AnalyticMap::Logistic;
  if (name == "negation") return AnalyticMap::Negation;
  throw ParameterError("unknown analytic map '" + std::string(name) + "'");
}

SystemSpec::SystemSpec(Kind kind, double kappa, bool monotone_expected, std::string name)
    : kind_(std::move(kind)), kappa_(kappa), monotone_expected_(monotone_expected), name_(std::move(name)) {
  if (!(kappa_ > 0.0) || !std::isfinite(kappa_)) throw ParameterError("kappa must be positive");
  if (const auto* a = std::get_if<AnalyticScalarSystem>(&kind_)) {
    (void)a;
    grid_ = GridDescriptor::euclidean(1);
  } else if (const auto* l = std::get_if<LinearCooperativeSystem>(&kind_)) {
    grid_ = GridDescriptor::euclidean(static_cast<int>(l->matrix.rows()));
  } else {
    grid_ = std::get<ParabolicSpec>(kind_).grid;
  }
}

SystemSpec SystemSpec::analytic(AnalyticScalarSystem map, double kappa, std::string name) {
  if (!std::isfinite(map.parameter)) throw ParameterError("non-finite map parameter");
  bool monotone = false;
  if (map.map == AnalyticMap::Cubic) {
    // DF(u) = 1 + h(1 − 3u²) is smallest at the box corners.
    monotone = map.parameter >= 0.0 && 1.0 + map.parameter * (1.0 - 3.0 * kappa * kappa) > 0.0;
  }
  return SystemSpec(map, kappa, monotone, std::move(name));
}

SystemSpec SystemSpec::linear(Eigen::MatrixXd matrix, double kappa, bool monotone_expected, std::string name) {
  if (matrix.rows() < 1 || matrix.rows() != matrix.cols()) throw ParameterError("linear map needs a square matrix");
  if (!matrix.allFinite()) throw ParameterError("linear map has non-finite entries");
  for (int i = 0; i < matrix.rows(); ++i) {
    for (int j = 0; j < matrix.cols(); ++j) {
      if (i != j && matrix(i, j) < 0.0) throw ParameterError("cooperative map needs nonnegative off-diagonals");
      if (monotone_expected && matrix(i, j) < 0.0) {
        throw ParameterError("monotone linear map needs nonnegative entries");
      }
    }
  }
  return SystemSpec(LinearCooperativeSystem{std::move(matrix)}, kappa, monotone_expected, std::move(name));
}

SystemSpec SystemSpec::parabolic(ParabolicSpec spec, double kappa, std::string name) {
  spec.validate();
  return SystemSpec(std::move(spec), kappa, true, std::move(name));
}

double SystemSpec::box_lower() const {
  if (const auto* a = std::get_if<AnalyticScalarSystem>(&kind_); a && a->map == AnalyticMap::Logistic) return 0.0;
  return -kappa_;
}

double SystemSpec::box_upper() const {
  if (const auto* a = std::get_if<AnalyticScalarSystem>(&kind_); a && a->map == AnalyticMap::Logistic) return 1.0;
  return kappa_;
}

bool SystemSpec::inside_escape_box(const StateVector& x) const {
  const double center = 0.5 * (box_lower() + box_upper());
  const double half = 0.5 * (box_upper() - box_lower());
  return ((x.values().array() - center).abs() <= 2.0 * half).all();
}

namespace {

void require_dimension(const SystemSpec& system, const StateVector& x) {
  if (!(x.grid() == system.grid())) {
    throw DimensionError("state dimensioned for a different system (expected " +
                         std::to_string(system.dimension()) + " nodes on a " +
                         std::string(to_string(system.grid().kind)) + " grid)");
  }
}

double analytic_value(const AnalyticScalarSystem& a, double u) {
  switch (a.map) {
    case AnalyticMap::Cubic: return u + a.parameter * u * (1.0 - u * u);
    case AnalyticMap::Logistic: return a.parameter * u * (1.0 - u);
    case AnalyticMap::Negation: return -u;
  }
  return u;
}

double analytic_derivative(const AnalyticScalarSystem& a, double u) {
  switch (a.map) {
    case AnalyticMap::Cubic: return 1.0 + a.parameter * (1.0 - 3.0 * u * u);
    case AnalyticMap::Logistic: return a.parameter * (1.0 - 2.0 * u);
    case AnalyticMap::Negation: return -1.0;
  }
  return 1.0;
}

double escape_bound(const SystemSpec& system) { return 2.0 * system.kappa(); }

}  // namespace

StateVector evaluate(const SystemSpec& system, const StateVector& x) {
  require_dimension(system, x);
  return std::visit(
      [&](const auto& kind) -> StateVector {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, AnalyticScalarSystem>) {
          return x.with_values(x.values().unaryExpr([&](double u) { return analytic_value(kind, u); }));
        } else if constexpr (std::is_same_v<T, LinearCooperativeSystem>) {
          return x.with_values(kind.matrix * x.values());
        } else {
          return propagate_period(x, kind, escape_bound(system));
        }
      },
      system.kind());
}

Eigen::MatrixXd jacobian(const SystemSpec& system, const StateVector& x) {
  require_dimension(system, x);
  return std::visit(
      [&](const auto& kind) -> Eigen::MatrixXd {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, AnalyticScalarSystem>) {
          Eigen::VectorXd d = x.values().unaryExpr([&](double u) { return analytic_derivative(kind, u); });
          return d.asDiagonal();
        } else if constexpr (std::is_same_v<T, LinearCooperativeSystem>) {
          return kind.matrix;
        } else {
          return poincare_jacobian(x, kind, escape_bound(system));
        }
      },
      system.kind());
}

std::pair<StateVector, Eigen::MatrixXd> evaluate_with_jacobian(const SystemSpec& system, const StateVector& x) {
  require_dimension(system, x);
  if (const auto* p = system.parabolic_spec()) {
    const ImexStepper stepper(*p, escape_bound(system));
    Eigen::VectorXd u = x.values();
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(x.size(), x.size());
    stepper.propagate_tangent(u, v, p->phase, 1);
    return {x.with_values(std::move(u)), std::move(v)};
  }
  return {evaluate(system, x), jacobian(system, x)};
}

StateVector jacobian_apply(const SystemSpec& system, const StateVector& x, const StateVector& v) {
  require_dimension(system, x);
  require_dimension(system, v);
  if (const auto* p = system.parabolic_spec()) return propagate_tangent(x, v, *p, escape_bound(system)).second;
  return v.with_values(jacobian(system, x) * v.values());
}

PropertyReport validate_dissipativity(const SystemSpec& system, int probe_count, std::uint64_t seed) {
  if (std::holds_alternative<LinearCooperativeSystem>(system.kind())) {
    throw ContractError("dissipativity check applies to parabolic and analytic scalar systems");
  }
  PropertyReport report{.check_name = "dissipativity", .seed = seed};
  report.worst_margin = -std::numeric_limits<double>::infinity();
  const double kappa = system.kappa();
  for (int k = 0; k < probe_count; ++k) {
    auto rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(k));
    const double magnitude = kappa + kappa * rng.uniform();  // [κ, 2κ)
    const double u = (rng.next() & 1U) ? magnitude : -magnitude;
    double product = 0.0;
    std::string where;
    if (const auto* p = system.parabolic_spec()) {
      const double t = p->period * rng.uniform();
      const int node = static_cast<int>(rng.below(static_cast<std::uint64_t>(p->grid.n)));
      const double x = p->grid.coordinate(node);
      product = u * p->reaction.value(t, x, u, 0.0, p->period);
      where = "t=" + std::to_string(t) + " node=" + std::to_string(node);
    } else {
      const auto& a = std::get<AnalyticScalarSystem>(system.kind());
      product = u * (analytic_value(a, u) - u);
    }
    ++report.pairs_tested;
    report.worst_margin = std::max(report.worst_margin, product);
    if (!(product < 0.0)) {
      ++report.violations;
      if (report.notes.size() < 8) {
        report.notes.push_back("u=" + format_value(u) + " " + where + ": u*f = " + format_value(product));
      }
    }
  }
  return report;
}

StateVector smooth_box_sample(const SystemSpec& system, std::uint64_t seed, std::uint64_t index, double amplitude) {
  const GridDescriptor& grid = system.grid();
  const double center = 0.5 * (system.box_lower() + system.box_upper());
  const double half = 0.5 * (system.box_upper() - system.box_lower());
  const double a = std::min(amplitude, half);
  auto rng = SplitMix64::stream(seed, index);
  Eigen::VectorXd v = Eigen::VectorXd::Constant(grid.n, center);
  if (grid.kind == DomainKind::Euclidean) {
    for (int i = 0; i < grid.n; ++i) v[i] += a * (2.0 * rng.uniform_open() - 1.0);
    return StateVector(v, grid);
  }
  constexpr int kModes = 5;
  for (int k = 0; k < kModes; ++k) v += (a / kModes) * (2.0 * rng.uniform_open() - 1.0) * smooth_mode(grid, k);
  return StateVector(v, grid);
}

PropertyReport trapping_check_from(const SystemSpec& system, const std::vector<StateVector>& initial, int horizon,
                                   std::uint64_t seed) {
  PropertyReport report{.check_name = "trapping", .seed = seed};
  report.worst_margin = -std::numeric_limits<double>::infinity();
  const double lo = system.box_lower();
  const double hi = system.box_upper();
  for (std::size_t s = 0; s < initial.size(); ++s) {
    StateVector x = initial[s];
    ++report.pairs_tested;
    for (int it = 1; it <= horizon; ++it) {
      bool exited = false;
      try {
        x = evaluate(system, x);
        const double excess =
            std::max((x.values().array() - hi).maxCoeff(), (lo - x.values().array()).maxCoeff());
        report.worst_margin = std::max(report.worst_margin, excess);
        exited = excess > 0.0;
      } catch (const EscapeError&) {
        exited = true;
        report.worst_margin = std::numeric_limits<double>::infinity();
      } catch (const NumericalFailure&) {
        exited = true;
        report.worst_margin = std::numeric_limits<double>::infinity();
      }
      if (exited) {
        ++report.violations;
        if (report.notes.size() < 8) {
          report.notes.push_back("sample " + std::to_string(s) + " left the box at iteration " + std::to_string(it));
        }
        break;
      }
    }
  }
  return report;
}

PropertyReport trapping_check(const SystemSpec& system, int sample_count, int horizon, std::uint64_t seed) {
  std::vector<StateVector> initial;
  initial.reserve(std::max(sample_count, 0));
  const double half = 0.5 * (system.box_upper() - system.box_lower());
  for (int s = 0; s < sample_count; ++s) {
    initial.push_back(smooth_box_sample(system, seed, static_cast<std::uint64_t>(s), half * (1.0 - 1e-9)));
  }
  return trapping_check_from(system, initial, horizon, seed);
}

PropertyReport check_strong_positivity_at(const SystemSpec& system,
                                          const std::vector<std::pair<StateVector, StateVector>>& probes,
                                          double eta, std::uint64_t seed) {
  PropertyReport report{.check_name = "strong_positivity", .seed = seed};
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const auto& [x, v] = probes[k];
    if ((v.values().array() < 0.0).any() || v.values().maxCoeff() <= 0.0) {
      throw ContractError("positivity probe direction must satisfy v >= 0, v != 0");
    }
    const StateVector dv = jacobian_apply(system, x, v);
    ++report.pairs_tested;
    const double gap = dv.values().minCoeff();
    report.worst_margin = std::min(report.worst_margin, gap);
    if (!(gap > eta)) {
      ++report.violations;
      if (report.notes.size() < 8) {
        report.notes.push_back("probe " + std::to_string(k) + ": min(DF(x)v) = " + format_value(gap));
      }
    }
  }
  return report;
}

PropertyReport check_strong_positivity(const SystemSpec& system, int probe_count, std::uint64_t seed, double eta) {
  const int n = system.dimension();
  const double lo = system.box_lower();
  const double hi = system.box_upper();
  std::vector<std::pair<StateVector, StateVector>> probes;
  probes.reserve(std::max(probe_count, 0));
  for (int k = 0; k < probe_count; ++k) {
    auto rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(k));
    Eigen::VectorXd x(n), v(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(lo, hi);
    if (k % 2 == 0) {
      v = Eigen::VectorXd::Unit(n, (k / 2) % n);
    } else {
      for (int i = 0; i < n; ++i) v[i] = rng.uniform_open();
    }
    probes.emplace_back(StateVector(x, system.grid()), StateVector(v, system.grid()));
  }
  return check_strong_positivity_at(system, probes, eta, seed);
}

namespace catalog {

SystemSpec scalar_cubic(double h) {
  return SystemSpec::analytic({AnalyticMap::Cubic, h}, 1.5, "scalar_cubic");
}

SystemSpec logistic(double r) {
  return SystemSpec::analytic({AnalyticMap::Logistic, r}, 1.0, "logistic");
}

SystemSpec negation() { return SystemSpec::analytic({AnalyticMap::Negation, 0.0}, 1.5, "negation"); }

SystemSpec linear_cooperative() {
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 0.2, 0.2, 0.5;
  return SystemSpec::linear(a, 1.5, true, "linear_cooperative");
}

SystemSpec linear_decoupled() {
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 0.0, 0.0, 0.5;
  return SystemSpec::linear(a, 1.5, true, "linear_decoupled");
}

ParabolicSpec cubic_parabolic(GridDescriptor grid, double lambda, double modulation) {
  ParabolicSpec spec;
  spec.grid = grid;
  spec.reaction.kind = ReactionKind::Cubic;
  spec.reaction.lambda = lambda;
  spec.reaction.modulation = modulation;
  return spec;
}

namespace {
std::string lambda_tag(double lambda) { return "l" + std::to_string(static_cast<int>(std::lround(lambda))); }
}  // namespace

SystemSpec dirichlet_cubic(double lambda, int n) {
  return SystemSpec::parabolic(cubic_parabolic(GridDescriptor::dirichlet(n), lambda), 1.5,
                               "dirichlet_cubic_" + lambda_tag(lambda));
}

SystemSpec neumann_cubic(double lambda, int n) {
  return SystemSpec::parabolic(cubic_parabolic(GridDescriptor::neumann(n), lambda), 1.5,
                               "neumann_cubic_" + lambda_tag(lambda));
}

SystemSpec ring_cubic(double lambda, int n) {
  return SystemSpec::parabolic(cubic_parabolic(GridDescriptor::ring(n), lambda), 1.5,
                               "ring_cubic_" + lambda_tag(lambda));
}

SystemSpec radial_cubic(int ambient_dim, double lambda, int n) {
  return SystemSpec::parabolic(cubic_parabolic(GridDescriptor::radial(n, ambient_dim), lambda), 1.5,
                               "radial" + std::to_string(ambient_dim) + "_cubic_" + lambda_tag(lambda));
}

std::vector<SystemSpec> shipped_parabolic() {
  return {dirichlet_cubic(15.0), dirichlet_cubic(5.0), neumann_cubic(5.0), ring_cubic(5.0), radial_cubic(3, 15.0)};
}

}  // namespace catalog

}  // namespace monolab
