#pragma once

#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace monolab {

/// Outcome of a sampled property check (monotonicity, positivity,
/// dissipativity, trapping, equivariance).
///
/// `worst_margin` is check-specific; each check documents what it holds.
/// For checks that require a strictly positive quantity it is the smallest
/// value observed (negative or below threshold means violated); for checks
/// bounding an error it is the largest error observed.
struct PropertyReport {
  std::string check_name;
  long pairs_tested = 0;
  long violations = 0;
  double worst_margin = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::vector<std::string> notes;  // first few violation descriptions

  bool passed() const { return violations == 0; }
};

/// Six significant digits, for human-readable notes.
inline std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace monolab
