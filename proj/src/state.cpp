#include "monolab/state.hpp"

#include "monolab/errors.hpp"

#include <cmath>
#include <string>

namespace monolab {

std::string_view to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::Euclidean: return "euclidean";
    case DomainKind::IntervalDirichlet: return "dirichlet";
    case DomainKind::IntervalNeumann: return "neumann";
    case DomainKind::Ring: return "ring";
    case DomainKind::Radial: return "radial";
  }
  return "unknown";
}

DomainKind domain_kind_from_string(std::string_view name) {
  if (name == "euclidean") return DomainKind::Euclidean;
  if (name == "dirichlet") return DomainKind::IntervalDirichlet;
  if (name == "neumann") return DomainKind::IntervalNeumann;
  if (name == "ring") return DomainKind::Ring;
  if (name == "radial") return DomainKind::Radial;
  throw ParameterError("unknown domain kind '" + std::string(name) + "'");
}

GridDescriptor GridDescriptor::euclidean(int n) {
  if (n < 1) throw GridError("euclidean grid needs n >= 1");
  return {DomainKind::Euclidean, n, 0.0, 0};
}

GridDescriptor GridDescriptor::dirichlet(int n) {
  if (n < 3) throw GridError("interval grid needs n >= 3");
  return {DomainKind::IntervalDirichlet, n, 1.0 / (n + 1), 0};
}

GridDescriptor GridDescriptor::neumann(int n) {
  if (n < 3) throw GridError("interval grid needs n >= 3");
  return {DomainKind::IntervalNeumann, n, 1.0 / (n - 1), 0};
}

GridDescriptor GridDescriptor::ring(int n) {
  if (n < 3) throw GridError("ring grid needs n >= 3");
  return {DomainKind::Ring, n, 1.0 / n, 0};
}

GridDescriptor GridDescriptor::radial(int n, int ambient_dim) {
  if (n < 3) throw GridError("radial grid needs n >= 3");
  if (ambient_dim < 2) throw ParameterError("radial reduction needs ambient dimension N >= 2");
  return {DomainKind::Radial, n, 1.0 / n, ambient_dim};
}

double GridDescriptor::coordinate(int i) const {
  switch (kind) {
    case DomainKind::IntervalDirichlet: return (i + 1) * h;
    case DomainKind::IntervalNeumann:
    case DomainKind::Ring:
    case DomainKind::Radial: return i * h;
    case DomainKind::Euclidean: return static_cast<double>(i);
  }
  return 0.0;
}

StateVector::StateVector(Eigen::VectorXd values, GridDescriptor grid) : values_(std::move(values)), grid_(grid) {
  if (grid_.n < 1) throw GridError("grid node count must be >= 1");
  if (values_.size() != grid_.n) {
    throw DimensionError("state has " + std::to_string(values_.size()) + " values, grid has " +
                         std::to_string(grid_.n) + " nodes");
  }
  if (!values_.allFinite()) throw NumericalFailure("non-finite state value", 0.0, -1);
}

StateVector StateVector::constant(const GridDescriptor& grid, double value) {
  return StateVector(Eigen::VectorXd::Constant(grid.n, value), grid);
}

void require_same_grid(const StateVector& x, const StateVector& y) {
  if (!(x.grid() == y.grid())) throw DimensionError("states live on different grids");
}

double sup_distance(const StateVector& x, const StateVector& y) {
  require_same_grid(x, y);
  return (x.values() - y.values()).cwiseAbs().maxCoeff();
}

}  // namespace monolab
