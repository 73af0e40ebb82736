#include "monolab/nonlinearity.hpp"

#include "monolab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace monolab {

std::string_view to_string(ReactionKind kind) {
  switch (kind) {
    case ReactionKind::Cubic: return "cubic";
    case ReactionKind::Linear: return "linear";
    case ReactionKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

ReactionKind reaction_kind_from_string(std::string_view name) {
  if (name == "cubic") return ReactionKind::Cubic;
  if (name == "linear") return ReactionKind::Linear;
  if (name == "tabulated") return ReactionKind::Tabulated;
  throw ParameterError("unknown nonlinearity '" + std::string(name) + "'");
}

void NonlinearitySpec::validate() const {
  if (!(modulation >= 0.0 && modulation < 1.0)) throw ParameterError("modulation m must lie in [0,1)");
  if (!(std::abs(profile_amplitude) < 1.0)) throw ParameterError("profile amplitude must satisfy |sigma| < 1");
  if (!std::isfinite(lambda) || !std::isfinite(gradient_coeff)) throw ParameterError("non-finite coefficient");
  if (kind == ReactionKind::Tabulated) {
    if (table_u.size() < 2 || table_u.size() != table_f.size()) {
      throw ParameterError("tabulated nonlinearity needs >= 2 (u, f) pairs of equal length");
    }
    for (std::size_t i = 1; i < table_u.size(); ++i) {
      if (!(table_u[i] > table_u[i - 1])) throw ParameterError("table_u must be strictly increasing");
    }
  }
}

double NonlinearitySpec::modulation_at(double t, double period) const {
  return 1.0 + modulation * std::sin(2.0 * std::numbers::pi * t / period);
}

double NonlinearitySpec::profile_at(double x) const {
  if (profile_amplitude == 0.0) return 1.0;
  return 1.0 + profile_amplitude * std::cos(2.0 * std::numbers::pi * x);
}

namespace {

// Slopes of the C¹ cubic Hermite interpolant: centered differences inside,
// one-sided at the ends.
double table_slope(const std::vector<double>& u, const std::vector<double>& f, std::size_t i) {
  const std::size_t last = u.size() - 1;
  if (i == 0) return (f[1] - f[0]) / (u[1] - u[0]);
  if (i == last) return (f[last] - f[last - 1]) / (u[last] - u[last - 1]);
  return (f[i + 1] - f[i - 1]) / (u[i + 1] - u[i - 1]);
}

struct HermiteEval {
  double value;
  double derivative;
};

HermiteEval hermite(const std::vector<double>& u, const std::vector<double>& f, double x) {
  const std::size_t last = u.size() - 1;
  if (x <= u[0]) {
    const double m = table_slope(u, f, 0);
    return {f[0] + m * (x - u[0]), m};
  }
  if (x >= u[last]) {
    const double m = table_slope(u, f, last);
    return {f[last] + m * (x - u[last]), m};
  }
  const auto it = std::upper_bound(u.begin(), u.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - u.begin()) - 1;
  const double h = u[i + 1] - u[i];
  const double s = (x - u[i]) / h;
  const double m0 = table_slope(u, f, i) * h;
  const double m1 = table_slope(u, f, i + 1) * h;
  const double s2 = s * s, s3 = s2 * s;
  const double value = (2 * s3 - 3 * s2 + 1) * f[i] + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * f[i + 1] +
                       (s3 - s2) * m1;
  const double ds = (6 * s2 - 6 * s) * f[i] + (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) * f[i + 1] +
                    (3 * s2 - 2 * s) * m1;
  return {value, ds / h};
}

}  // namespace

double NonlinearitySpec::shape(double u) const {
  switch (kind) {
    case ReactionKind::Cubic: return u * (1.0 - u * u);
    case ReactionKind::Linear: return u;
    case ReactionKind::Tabulated: return hermite(table_u, table_f, u).value;
  }
  return 0.0;
}

double NonlinearitySpec::shape_derivative(double u) const {
  switch (kind) {
    case ReactionKind::Cubic: return 1.0 - 3.0 * u * u;
    case ReactionKind::Linear: return 1.0;
    case ReactionKind::Tabulated: return hermite(table_u, table_f, u).derivative;
  }
  return 0.0;
}

double NonlinearitySpec::value(double t, double x, double u, double xi, double period) const {
  return modulation_at(t, period) * lambda * profile_at(x) * shape(u) + gradient_coeff * xi;
}

double NonlinearitySpec::du(double t, double x, double u, double period) const {
  return modulation_at(t, period) * lambda * profile_at(x) * shape_derivative(u);
}

}  // namespace monolab
