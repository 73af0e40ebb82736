#include "monolab/order.hpp"

#include "monolab/errors.hpp"
#include "monolab/rng.hpp"
#include "monolab/systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace monolab {

namespace {

constexpr std::size_t kMaxNotes = 8;

void note(PropertyReport& report, const std::string& text) {
  if (report.notes.size() < kMaxNotes) report.notes.push_back(text);
}

}  // namespace

void OrderTolerances::validate() const {
  if (!(tol_eq >= 0.0 && tol_eq < eta_interior)) {
    throw ParameterError("order tolerances need 0 <= tol_eq < eta_interior");
  }
}

bool leq(const StateVector& x, const StateVector& y, const OrderTolerances& tol) {
  require_same_grid(x, y);
  return ((y.values() - x.values()).array() >= -tol.tol_eq).all();
}

bool strictly_less(const StateVector& x, const StateVector& y, const OrderTolerances& tol) {
  if (!leq(x, y, tol)) return false;
  return (y.values() - x.values()).maxCoeff() > tol.tol_eq;
}

bool strongly_less(const StateVector& x, const StateVector& y, const OrderTolerances& tol) {
  require_same_grid(x, y);
  return (y.values() - x.values()).minCoeff() > tol.eta_interior;
}

std::vector<StateVector> order_interval_sample(const StateVector& a, const StateVector& b, int count,
                                               std::uint64_t seed) {
  if (!leq(a, b, OrderTolerances{0.0, std::numeric_limits<double>::min()})) {
    throw OrderError("order interval [a,b] requires a <= b");
  }
  std::vector<StateVector> out;
  out.reserve(std::max(count, 0));
  for (int k = 0; k < count; ++k) {
    auto rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(k));
    Eigen::VectorXd v(a.size());
    for (int i = 0; i < a.size(); ++i) v[i] = a[i] + (b[i] - a[i]) * rng.uniform();
    out.emplace_back(std::move(v), a.grid());
  }
  return out;
}

std::vector<OrderedPair> ordered_pairs(const SystemSpec& system, int pair_count, std::uint64_t seed) {
  const double lo = system.box_lower();
  const double hi = system.box_upper();
  const int n = system.dimension();
  std::vector<OrderedPair> pairs;
  pairs.reserve(std::max(pair_count, 0));
  for (int k = 0; k < pair_count; ++k) {
    auto rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(k));
    Eigen::VectorXd x(n), w(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(lo, hi);
    for (int i = 0; i < n; ++i) w[i] = rng.uniform_open();
    const double room = (Eigen::VectorXd::Constant(n, hi) - x).minCoeff();
    const double r = rng.uniform_open() * room;
    Eigen::VectorXd y = x + r * w;
    pairs.emplace_back(StateVector(x, system.grid()), StateVector(y, system.grid()));
  }
  return pairs;
}

PropertyReport check_monotone_pairs(const SystemSpec& system, const std::vector<OrderedPair>& pairs,
                                    const OrderTolerances& tol, std::uint64_t seed) {
  PropertyReport report{.check_name = "monotone", .seed = seed};
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& [x, y] = pairs[k];
    if (!leq(x, y, tol)) throw OrderError("pair " + std::to_string(k) + " is not ordered");
    try {
      const StateVector fx = evaluate(system, x);
      const StateVector fy = evaluate(system, y);
      ++report.pairs_tested;
      const double margin = (fy.values() - fx.values()).minCoeff();
      report.worst_margin = std::min(report.worst_margin, margin);
      if (!leq(fx, fy, tol)) {
        ++report.violations;
        note(report, "pair " + std::to_string(k) + ": min(Fy-Fx) = " + format_value(margin));
      }
    } catch (const Error& e) {
      throw Error("check_monotone: sample " + std::to_string(k) + ": " + e.what());
    }
  }
  return report;
}

PropertyReport check_monotone(const SystemSpec& system, int pair_count, std::uint64_t seed,
                              const OrderTolerances& tol) {
  return check_monotone_pairs(system, ordered_pairs(system, pair_count, seed), tol, seed);
}

PropertyReport check_strong_monotone_pairs(const SystemSpec& system, const std::vector<OrderedPair>& pairs,
                                           const OrderTolerances& tol, std::uint64_t seed) {
  PropertyReport report{.check_name = "strong_monotone", .seed = seed};
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& [x, y] = pairs[k];
    if (!leq(x, y, tol)) throw OrderError("pair " + std::to_string(k) + " is not ordered");
    if (!strictly_less(x, y, tol)) continue;  // x = y: nothing to check
    try {
      const StateVector fx = evaluate(system, x);
      const StateVector fy = evaluate(system, y);
      ++report.pairs_tested;
      const double gap = (fy.values() - fx.values()).minCoeff();
      report.worst_margin = std::min(report.worst_margin, gap);
      if (!strongly_less(fx, fy, tol)) {
        ++report.violations;
        note(report, "pair " + std::to_string(k) + ": min interior gap = " + format_value(gap));
      }
    } catch (const Error& e) {
      throw Error("check_strong_monotone: sample " + std::to_string(k) + ": " + e.what());
    }
  }
  return report;
}

PropertyReport check_strong_monotone(const SystemSpec& system, int pair_count, std::uint64_t seed,
                                     const OrderTolerances& tol) {
  return check_strong_monotone_pairs(system, ordered_pairs(system, pair_count, seed), tol, seed);
}

}  // namespace monolab
