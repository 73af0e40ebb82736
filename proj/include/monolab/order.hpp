#pragma once

#include "monolab/report.hpp"
#include "monolab/state.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace monolab {

class SystemSpec;

/// Numeric surrogates for ≤, < and ≪ in the nonnegative-orthant order.
///
/// `tol_eq` absorbs round-off in ≤ and decides when two vectors count as
/// equal; `eta_interior` is the componentwise margin that stands in for the
/// interior of the cone. Requires 0 ≤ tol_eq < eta_interior.
struct OrderTolerances {
  double tol_eq = 1e-12;
  double eta_interior = 1e-10;

  void validate() const;
};

bool leq(const StateVector& x, const StateVector& y, const OrderTolerances& tol = {});
bool strictly_less(const StateVector& x, const StateVector& y, const OrderTolerances& tol = {});
bool strongly_less(const StateVector& x, const StateVector& y, const OrderTolerances& tol = {});

/// `count` points drawn uniformly from the order interval [a,b].
std::vector<StateVector> order_interval_sample(const StateVector& a, const StateVector& b, int count,
                                               std::uint64_t seed);

using OrderedPair = std::pair<StateVector, StateVector>;

/// Ordered pairs x ≤ y in the trapping box of `system`: x uniform in the
/// box, y = x + r·w with w ∈ [0,1]ⁿ and r scaled so y stays in the box.
std::vector<OrderedPair> ordered_pairs(const SystemSpec& system, int pair_count, std::uint64_t seed);

/// Counts pairs x ≤ y with F(x) ≰ F(y). worst_margin holds the most negative
/// component of F(y) − F(x) seen.
PropertyReport check_monotone(const SystemSpec& system, int pair_count, std::uint64_t seed,
                              const OrderTolerances& tol = {});
PropertyReport check_monotone_pairs(const SystemSpec& system, const std::vector<OrderedPair>& pairs,
                                    const OrderTolerances& tol = {}, std::uint64_t seed = 0);

/// Counts pairs x < y with F(x) not ≪ F(y); pairs with x = y are skipped.
/// worst_margin holds the minimum interior gap min(F(y) − F(x)).
PropertyReport check_strong_monotone(const SystemSpec& system, int pair_count, std::uint64_t seed,
                                     const OrderTolerances& tol = {});
PropertyReport check_strong_monotone_pairs(const SystemSpec& system, const std::vector<OrderedPair>& pairs,
                                           const OrderTolerances& tol = {}, std::uint64_t seed = 0);

}  // namespace monolab
