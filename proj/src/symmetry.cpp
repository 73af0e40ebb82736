#include "monolab/symmetry.hpp"

#include "monolab/errors.hpp"
#include "monolab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace monolab {

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Trivial: return "trivial";
    case ActionKind::RingRotation: return "ring_rotation";
    case ActionKind::IntervalReflection: return "interval_reflection";
  }
  return "unknown";
}

ActionKind action_kind_from_string(std::string_view name) {
  if (name == "trivial") return ActionKind::Trivial;
  if (name == "ring_rotation") return ActionKind::RingRotation;
  if (name == "interval_reflection") return ActionKind::IntervalReflection;
  throw ParameterError("unknown group action '" + std::string(name) + "'");
}

GroupActionSpec GroupActionSpec::trivial(int n) {
  if (n < 1) throw DimensionError("group action needs at least one node");
  return GroupActionSpec(ActionKind::Trivial, n, 1);
}

GroupActionSpec GroupActionSpec::ring_rotation(int n, int order) {
  if (n < 1) throw DimensionError("group action needs at least one node");
  if (order == 0) order = n;
  if (order < 1 || n % order != 0) throw ParameterError("rotation order must divide the node count");
  return GroupActionSpec(ActionKind::RingRotation, n, order);
}

GroupActionSpec GroupActionSpec::interval_reflection(int n) {
  if (n < 1) throw DimensionError("group action needs at least one node");
  return GroupActionSpec(ActionKind::IntervalReflection, n, 2);
}

std::vector<int> GroupActionSpec::generators() const {
  if (order_ == 1) return {};
  return {1};
}

std::vector<int> GroupActionSpec::permutation(int g) const {
  if (g < 0 || g >= order_) throw ParameterError("group element out of range");
  std::vector<int> pi(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    switch (kind_) {
      case ActionKind::Trivial: pi[i] = i; break;
      case ActionKind::RingRotation: {
        const int shift = g * (n_ / order_);
        pi[i] = ((i - shift) % n_ + n_) % n_;
        break;
      }
      case ActionKind::IntervalReflection: pi[i] = g == 0 ? i : n_ - 1 - i; break;
    }
  }
  return pi;
}

int GroupActionSpec::compose(int g, int h) const {
  if (g < 0 || g >= order_ || h < 0 || h >= order_) throw ParameterError("group element out of range");
  return (g + h) % order_;
}

StateVector apply_action(const GroupActionSpec& action, int g, const StateVector& u) {
  if (u.size() != action.nodes()) {
    throw DimensionError("state has " + std::to_string(u.size()) + " nodes, action acts on " +
                         std::to_string(action.nodes()));
  }
  const auto pi = action.permutation(g);
  Eigen::VectorXd out(u.size());
  for (int i = 0; i < u.size(); ++i) out[i] = u[pi[i]];
  return u.with_values(out);
}

PropertyReport check_equivariance(const SystemSpec& system, const GroupActionSpec& action, int sample_count,
                                  std::uint64_t seed, double tol) {
  if (action.nodes() != system.dimension()) throw DimensionError("action grid does not match the system grid");
  PropertyReport report{.check_name = "equivariance", .seed = seed};
  report.worst_margin = 0.0;
  const int n = system.dimension();
  const double lo = system.box_lower();
  const double hi = system.box_upper();
  for (int s = 0; s < sample_count; ++s) {
    auto rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(s));
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = lo + (hi - lo) * rng.uniform_open();
    const StateVector u(x, system.grid());
    const StateVector fu = evaluate(system, u);
    for (int g : action.generators()) {
      ++report.pairs_tested;
      const double err = sup_distance(evaluate(system, apply_action(action, g, u)), apply_action(action, g, fu));
      report.worst_margin = std::max(report.worst_margin, err);
      if (!(err < tol)) {
        ++report.violations;
        if (report.notes.size() < 8) {
          report.notes.push_back("sample " + std::to_string(s) + ", generator " + std::to_string(g) +
                                 ": |F(gu) - gF(u)| = " + format_value(err));
        }
      }
    }
  }
  return report;
}

SymmetryVerdict symmetry_deviation(const StateVector& u, const GroupActionSpec& action, double tol_sym) {
  SymmetryVerdict verdict;
  for (int g : action.generators()) {
    const double d = sup_distance(apply_action(action, g, u), u);
    verdict.per_generator.push_back(d);
    verdict.deviation = std::max(verdict.deviation, d);
  }
  verdict.symmetric = verdict.deviation < tol_sym;
  return verdict;
}

double spatial_variance(const StateVector& u) {
  const Eigen::ArrayXd v = u.values().array();
  return (v - v.mean()).square().mean();
}

namespace {

SymmetricLimit judge(const Classification& c, const GroupActionSpec& action, double tol_sym) {
  SymmetricLimit out{.classification = c};
  if (c.cycle) {
    for (const auto& p : c.cycle->points) out.point_verdicts.push_back(symmetry_deviation(p, action, tol_sym));
  }
  out.symmetric_limit = c.verdict == Verdict::StableCycle && !out.point_verdicts.empty() &&
                        std::all_of(out.point_verdicts.begin(), out.point_verdicts.end(),
                                    [](const SymmetryVerdict& v) { return v.symmetric; });
  return out;
}

}  // namespace

SymmetricLimit classify_symmetric_limit(const SystemSpec& system, const GroupActionSpec& action,
                                        const StateVector& x0, const ClassifyBudget& budget, double tol_sym) {
  if (action.nodes() != system.dimension()) throw DimensionError("action grid does not match the system grid");
  return judge(classify_orbit(system, x0, budget), action, tol_sym);
}

SymmetryReport symmetry_experiment(const SystemSpec& system, const GroupActionSpec& action,
                                   const SamplerSpec& sampler, long count, const ClassifyBudget& budget,
                                   double tol_sym, ParallelOptions parallel) {
  if (action.nodes() != system.dimension()) throw DimensionError("action grid does not match the system grid");
  const auto results = classify_ensemble(system, sampler, count, budget, parallel);
  SymmetryReport report;
  report.samples = count;
  report.tol_sym = tol_sym;
  report.counts = {{Verdict::StableCycle, 0}, {Verdict::UnstableCycle, 0}, {Verdict::Unresolved, 0},
                   {Verdict::Escaped, 0}};
  for (const auto& c : results) {
    ++report.counts[c.verdict];
    const SymmetricLimit lim = judge(c, action, tol_sym);
    double dev = lim.point_verdicts.empty() ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    for (const auto& v : lim.point_verdicts) dev = std::max(dev, v.deviation);
    report.deviations.push_back(dev);
    if (c.verdict == Verdict::StableCycle) {
      report.max_deviation = std::max(report.max_deviation, dev);
      ++report.period_histogram[c.cycle->period];
    }
    if (lim.symmetric_limit) ++report.symmetric_limits;
  }
  report.symmetric_fraction = count > 0 ? static_cast<double>(report.symmetric_limits) / count : 0.0;
  return report;
}

}  // namespace monolab
