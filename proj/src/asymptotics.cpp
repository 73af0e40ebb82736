#include "monolab/asymptotics.hpp"

#include "monolab/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace monolab {

std::string_view to_string(Stability s) {
  return s == Stability::LinearlyStable ? "LinearlyStable" : "Unstable";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::StableCycle: return "StableCycle";
    case Verdict::UnstableCycle: return "UnstableCycle";
    case Verdict::Unresolved: return "Unresolved";
    case Verdict::Escaped: return "Escaped";
  }
  return "Unknown";
}

Verdict verdict_from_string(std::string_view name) {
  if (name == "StableCycle") return Verdict::StableCycle;
  if (name == "UnstableCycle") return Verdict::UnstableCycle;
  if (name == "Unresolved") return Verdict::Unresolved;
  if (name == "Escaped") return Verdict::Escaped;
  throw ParameterError("unknown verdict '" + std::string(name) + "'");
}

OrbitRecord iterate_orbit(const SystemSpec& system, const StateVector& x0, long n_iter, long thinning) {
  if (n_iter < 0) throw ContractError("iterate_orbit needs n_iter >= 0");
  if (thinning < 1) throw ContractError("thinning must be >= 1");
  OrbitRecord orbit;
  StateVector x = x0;
  for (long n = 1; n <= n_iter; ++n) {
    try {
      x = evaluate(system, x);
    } catch (const EscapeError&) {
      orbit.escaped = true;
    } catch (const NumericalFailure& e) {
      throw NumericalFailure(std::string("iteration ") + std::to_string(n) + ": " + e.what(), e.time(), n);
    }
    if (!orbit.escaped && !system.inside_escape_box(x)) orbit.escaped = true;
    if (orbit.escaped) {
      orbit.escape_iteration = n;
      break;
    }
    if (n % thinning == 0) {
      orbit.samples.push_back(x);
      orbit.indices.push_back(n);
    }
  }
  return orbit;
}

std::optional<CycleCandidate> detect_cycle(std::span<const StateVector> tail, int p_max, double tol_cyc) {
  if (p_max < 1) throw ContractError("p_max must be >= 1");
  const std::size_t length = tail.size();
  if (length < 3 * static_cast<std::size_t>(p_max)) {
    throw ContractError("detect_cycle needs a tail of at least 3*p_max states");
  }
  const std::size_t window_start = length - 2 * static_cast<std::size_t>(p_max);
  for (int p = 1; p <= p_max; ++p) {
    double worst = 0.0;
    bool ok = true;
    for (std::size_t i = window_start; i + p < length; ++i) {
      const double d = sup_distance(tail[i + p], tail[i]);
      worst = std::max(worst, d);
      if (!(d < tol_cyc)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      CycleCandidate c;
      c.period = p;
      c.window_error = worst;
      c.points.assign(tail.end() - p, tail.end());
      return c;
    }
  }
  return std::nullopt;
}

double cycle_residual(const SystemSpec& system, std::span<const StateVector> points) {
  double worst = 0.0;
  const std::size_t p = points.size();
  for (std::size_t i = 0; i < p; ++i) {
    worst = std::max(worst, sup_distance(evaluate(system, points[i]), points[(i + 1) % p]));
  }
  return worst;
}

namespace {

struct Chain {
  std::vector<StateVector> points;  // z, Fz, …, F^{p-1}z
  StateVector image;                // F^p z
};

Chain chain_from(const SystemSpec& system, const StateVector& z, int p) {
  std::vector<StateVector> pts{z};
  StateVector y = evaluate(system, z);
  for (int j = 1; j < p; ++j) {
    pts.push_back(y);
    y = evaluate(system, y);
  }
  return {std::move(pts), std::move(y)};
}

}  // namespace

RefinedCycle refine_cycle(const SystemSpec& system, const CycleCandidate& candidate, double newton_tol, int max_iter) {
  if (candidate.points.empty() || candidate.period != static_cast<int>(candidate.points.size())) {
    throw ContractError("cycle candidate must carry exactly p points");
  }
  const int p = candidate.period;
  RefinedCycle out{candidate.points, p, cycle_residual(system, candidate.points), false, 0, {}};
  if (!(out.residual < 1e-2)) {
    out.warning = "candidate residual too large for Newton refinement";
    return out;
  }

  Chain chain = chain_from(system, candidate.points.front(), p);
  double residual = sup_distance(chain.image, chain.points.front());
  const int n = system.dimension();

  for (int k = 0; k < max_iter && residual > newton_tol; ++k) {
    // Jacobian of F^p at z as the product along the chain.
    Eigen::MatrixXd monodromy = Eigen::MatrixXd::Identity(n, n);
    for (int j = 0; j < p; ++j) monodromy = jacobian(system, chain.points[j]) * monodromy;
    const Eigen::MatrixXd system_matrix = monodromy - Eigen::MatrixXd::Identity(n, n);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(system_matrix);
    lu.setThreshold(1e-13);
    if (!lu.isInvertible()) {
      out.warning = "singular Newton system (DF^p has eigenvalue 1)";
      break;
    }
    const Eigen::VectorXd g = chain.image.values() - chain.points.front().values();
    const Eigen::VectorXd delta = lu.solve(-g);

    bool accepted = false;
    for (double damping = 1.0; damping > 1.0 / 512; damping *= 0.5) {
      try {
        const StateVector trial = chain.points.front().with_values(chain.points.front().values() + damping * delta);
        Chain next = chain_from(system, trial, p);
        const double r = sup_distance(next.image, next.points.front());
        if (r < residual) {
          chain = std::move(next);
          residual = r;
          accepted = true;
          break;
        }
      } catch (const Error&) {
        // trial left the admissible region; shrink the step
      }
    }
    ++out.newton_iterations;
    if (!accepted) {
      out.warning = "Newton stalled";
      break;
    }
  }

  if (residual <= out.residual || residual <= newton_tol) {
    out.points = std::move(chain.points);
    out.residual = residual;
  }
  out.refined = out.residual <= newton_tol;
  if (!out.refined && out.warning.empty()) out.warning = "Newton did not reach the tolerance";
  return out;
}

namespace {

std::vector<Eigen::MatrixXd> cycle_jacobians(const SystemSpec& system, std::span<const StateVector> points) {
  std::vector<Eigen::MatrixXd> js;
  js.reserve(points.size());
  for (const auto& x : points) js.push_back(jacobian(system, x));
  return js;
}

double dense_radius(const std::vector<Eigen::MatrixXd>& js) {
  const Eigen::Index n = js.front().rows();
  Eigen::MatrixXd product = Eigen::MatrixXd::Identity(n, n);
  for (const auto& j : js) product = j * product;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(product, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

double monodromy_spectral_radius_dense(const SystemSpec& system, std::span<const StateVector> cycle_points) {
  if (cycle_points.empty()) throw ContractError("cycle must have at least one point");
  return dense_radius(cycle_jacobians(system, cycle_points));
}

SpectralEstimate cycle_spectral_radius(const SystemSpec& system, std::span<const StateVector> cycle_points, double tol,
                                       int max_iter) {
  if (cycle_points.empty()) throw ContractError("cycle must have at least one point");
  const auto js = cycle_jacobians(system, cycle_points);
  const Eigen::Index n = js.front().rows();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
  double previous = -1.0;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd w = v;
    for (const auto& j : js) w = j * w;
    const double lambda = w.norm();
    if (lambda == 0.0) return {0.0, "power", it};
    v = w / lambda;
    if (previous >= 0.0 && std::abs(lambda - previous) <= tol * lambda) return {lambda, "power", it};
    previous = lambda;
  }
  return {dense_radius(js), "dense", max_iter};
}

ClassifyBudget ClassifyBudget::defaults_for(const SystemSpec& system) {
  ClassifyBudget b;
  b.tol_cyc = system.default_cycle_tolerance();
  b.newton_tol = system.is_parabolic() ? 1e-11 : 1e-12;
  return b;
}

void ClassifyBudget::validate() const {
  if (transient < 0 || p_max < 1 || max_iterations < 0 || check_interval < 1 || newton_max_iter < 0) {
    throw ParameterError("invalid classification budget");
  }
  if (!(tol_cyc > 0.0) || !(tol_stab >= 0.0) || !(tol_set > 0.0) || !(newton_tol > 0.0)) {
    throw ParameterError("classification tolerances must be positive");
  }
}

Classification classify_orbit(const SystemSpec& system, const StateVector& x0, const ClassifyBudget& budget) {
  budget.validate();
  Classification result;
  const std::size_t capacity = 3 * static_cast<std::size_t>(budget.p_max);
  std::deque<StateVector> tail;
  StateVector x = x0;
  std::string last_note;

  for (long it = 1; it <= budget.max_iterations; ++it) {
    try {
      x = evaluate(system, x);
    } catch (const EscapeError& e) {
      result.verdict = Verdict::Escaped;
      result.iterations_used = it;
      result.diagnostics = e.what();
      return result;
    } catch (const Error& e) {
      result.verdict = Verdict::Escaped;
      result.iterations_used = it;
      result.diagnostics = std::string("numerical failure: ") + e.what();
      return result;
    }
    if (!system.inside_escape_box(x)) {
      result.verdict = Verdict::Escaped;
      result.iterations_used = it;
      result.diagnostics = "left the inflated trapping box";
      return result;
    }
    tail.push_back(x);
    if (tail.size() > capacity) tail.pop_front();

    if (it < budget.transient || tail.size() < capacity || (it - budget.transient) % budget.check_interval != 0) {
      continue;
    }
    const std::vector<StateVector> window(tail.begin(), tail.end());
    const auto candidate = detect_cycle(window, budget.p_max, budget.tol_cyc);
    if (!candidate) continue;

    try {
      RefinedCycle refined = refine_cycle(system, *candidate, budget.newton_tol, budget.newton_max_iter);
      if (!(refined.residual <= budget.tol_cyc)) {
        last_note = "cycle candidate p=" + std::to_string(candidate->period) +
                    " rejected: residual " + format_value(refined.residual);
        continue;
      }
      const SpectralEstimate spectral = cycle_spectral_radius(system, refined.points);
      CycleRecord cycle;
      cycle.period = refined.period;
      cycle.points = std::move(refined.points);
      cycle.residual = refined.residual;
      cycle.rho = spectral.rho;
      cycle.spectral_method = spectral.method;
      cycle.refined = refined.refined;
      cycle.stability = spectral.rho <= 1.0 + budget.tol_stab ? Stability::LinearlyStable : Stability::Unstable;
      result.verdict = cycle.stability == Stability::LinearlyStable ? Verdict::StableCycle : Verdict::UnstableCycle;
      result.iterations_used = it;
      result.diagnostics = refined.warning.empty() ? "cycle detected at iteration " + std::to_string(it)
                                                   : "cycle detected at iteration " + std::to_string(it) +
                                                         "; " + refined.warning;
      result.cycle = std::move(cycle);
      return result;
    } catch (const Error& e) {
      last_note = std::string("refinement failed: ") + e.what();
    }
  }
  result.verdict = Verdict::Unresolved;
  result.iterations_used = budget.max_iterations;
  result.diagnostics = "budget of " + std::to_string(budget.max_iterations) + " iterations exhausted";
  if (!last_note.empty()) result.diagnostics += "; " + last_note;
  return result;
}

std::vector<StateVector> omega_set(const OrbitRecord& orbit, double tail_fraction, double tol) {
  if (orbit.samples.empty()) return {};
  const double fraction = std::clamp(tail_fraction, 0.0, 1.0);
  const auto count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(orbit.samples.size()))));
  std::vector<StateVector> kept;
  for (auto it = orbit.samples.end() - static_cast<std::ptrdiff_t>(count); it != orbit.samples.end(); ++it) {
    const bool fresh = std::none_of(kept.begin(), kept.end(), [&](const StateVector& k) {
      return sup_distance(k, *it) <= tol;
    });
    if (fresh) kept.push_back(*it);
  }
  return kept;
}

double set_distance(std::span<const StateVector> a, std::span<const StateVector> b) {
  if (a.empty() || b.empty()) throw ContractError("set_distance needs nonempty sets");
  auto directed = [](std::span<const StateVector> from, std::span<const StateVector> to) {
    double worst = 0.0;
    for (const auto& x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : to) best = std::min(best, sup_distance(x, y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

std::vector<StateVector> limit_points(const Classification& c) {
  if (c.cycle) return c.cycle->points;
  return {};
}

namespace {

bool converged(Verdict v) { return v == Verdict::StableCycle || v == Verdict::UnstableCycle; }

DirectionalProbe probe_direction(const SystemSpec& system, const StateVector& x, const StateVector& v, double sign,
                                 const std::vector<double>& eps, const ClassifyBudget& budget) {
  DirectionalProbe probe;
  probe.eps = eps;
  probe.direction = v;
  probe.conclusive = true;
  for (double e : eps) {
    const StateVector y = x.with_values(x.values() + sign * e * v.values());
    Classification c = classify_orbit(system, y, budget);
    probe.verdicts.push_back(c.verdict);
    if (!converged(c.verdict)) probe.conclusive = false;
    probe.limits.push_back(limit_points(c));
  }
  probe.consistent = probe.conclusive;
  if (probe.conclusive) {
    for (std::size_t i = 0; i < probe.limits.size(); ++i) {
      for (std::size_t j = i + 1; j < probe.limits.size(); ++j) {
        if (set_distance(probe.limits[i], probe.limits[j]) > budget.tol_set) probe.consistent = false;
      }
    }
    probe.stabilized = probe.limits.back();
  }
  return probe;
}

void require_inside_box(const SystemSpec& system, const StateVector& y, const char* what) {
  if ((y.values().array() < system.box_lower()).any() || (y.values().array() > system.box_upper()).any()) {
    throw ContractError(std::string(what) + " leaves the trapping box");
  }
}

}  // namespace

ProbeReport omega_plus_probe(const SystemSpec& system, const StateVector& x, const StateVector& v,
                             std::vector<double> eps_list, const ClassifyBudget& budget,
                             const std::vector<StateVector>& extra_directions) {
  if (eps_list.empty()) throw ContractError("omega_plus_probe needs at least one epsilon");
  require_same_grid(x, v);
  const StateVector zero = StateVector::constant(v.grid(), 0.0);
  if (!strongly_less(zero, v)) throw ContractError("probe direction must satisfy v >> 0");
  for (double e : eps_list) {
    if (!(e > 0.0)) throw ContractError("probe epsilons must be positive");
  }
  std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
  const double largest = eps_list.front();
  require_inside_box(system, x.with_values(x.values() + largest * v.values()), "x + eps*v");
  require_inside_box(system, x.with_values(x.values() - largest * v.values()), "x - eps*v");

  Classification base = classify_orbit(system, x, budget);
  ProbeReport report{.x = x, .base = base, .omega_x = limit_points(base)};
  report.tol_set = budget.tol_set;
  report.upper = probe_direction(system, x, v, +1.0, eps_list, budget);
  report.lower = probe_direction(system, x, v, -1.0, eps_list, budget);
  report.conclusive = converged(base.verdict) && report.upper.conclusive && report.lower.conclusive;
  if (report.conclusive) {
    report.in_upper_unstable = set_distance(report.omega_x, report.upper.stabilized) > budget.tol_set;
    report.in_lower_unstable = set_distance(report.omega_x, report.lower.stabilized) > budget.tol_set;
  }
  for (const auto& d : extra_directions) {
    require_same_grid(x, d);
    if (!strongly_less(zero, d)) throw ContractError("probe direction must satisfy v >> 0");
    DirectionalProbe extra = probe_direction(system, x, d, +1.0, eps_list, budget);
    if (!extra.conclusive || !report.upper.conclusive ||
        set_distance(extra.stabilized, report.upper.stabilized) > budget.tol_set) {
      report.directions_agree = false;
    }
    report.extra_upper.push_back(std::move(extra));
  }
  return report;
}

SeparationReport separation_probe(const SystemSpec& system, const StateVector& x, const std::vector<double>& scales,
                                  const ClassifyBudget& budget, std::optional<StateVector> direction, long horizon) {
  if (scales.empty()) throw ContractError("separation_probe needs at least one scale");
  if (horizon <= 0) horizon = std::max<long>(2, 2 * budget.transient);
  const StateVector v = direction ? *direction : StateVector::constant(x.grid(), 1.0);
  require_same_grid(x, v);
  const long tail_start = horizon / 2;

  SeparationReport report;
  report.horizon = horizon;

  // Reference orbit: tail iterates of x.
  std::vector<StateVector> reference;
  {
    StateVector y = x;
    for (long n = 1; n <= horizon; ++n) {
      y = evaluate(system, y);
      if (n > tail_start) reference.push_back(y);
    }
  }

  report.delta_est = std::numeric_limits<double>::infinity();
  for (double s : scales) {
    for (int sign : {+1, -1}) {
      SeparationProbeRecord rec{s, sign, 0.0, false};
      StateVector y = x.with_values(x.values() + sign * s * v.values());
      try {
        for (long n = 1; n <= horizon; ++n) {
          y = evaluate(system, y);
          if (!system.inside_escape_box(y)) throw EscapeError("probe left the inflated box");
          if (n > tail_start) {
            rec.tail_max = std::max(rec.tail_max, sup_distance(y, reference[static_cast<std::size_t>(n - tail_start - 1)]));
          }
        }
      } catch (const EscapeError&) {
        rec.escaped = true;
      }
      if (!rec.escaped) report.delta_est = std::min(report.delta_est, rec.tail_max);
      report.probes.push_back(rec);
    }
  }
  if (std::isinf(report.delta_est)) report.delta_est = std::numeric_limits<double>::quiet_NaN();
  return report;
}

}  // namespace monolab
