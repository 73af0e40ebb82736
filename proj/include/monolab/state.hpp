#pragma once

#include <Eigen/Core>

#include <string>
#include <string_view>

namespace monolab {

/// Spatial layout of the nodal unknowns.
///
/// `Euclidean` covers the finite-dimensional test maps, which carry no
/// spatial structure. The other kinds are method-of-lines grids on the unit
/// interval (or the unit radius for `Radial`). Under Dirichlet conditions the
/// boundary nodes are eliminated, so every stored node is interior.
enum class DomainKind { Euclidean, IntervalDirichlet, IntervalNeumann, Ring, Radial };

std::string_view to_string(DomainKind kind);
DomainKind domain_kind_from_string(std::string_view name);

struct GridDescriptor {
  DomainKind kind = DomainKind::Euclidean;
  int n = 1;
  double h = 0.0;
  int radial_dim = 0;  // ambient dimension N for Radial grids

  static GridDescriptor euclidean(int n);
  /// n interior nodes of [0,1], h = 1/(n+1).
  static GridDescriptor dirichlet(int n);
  /// n nodes including both endpoints of [0,1], h = 1/(n-1).
  static GridDescriptor neumann(int n);
  /// n nodes on the periodic unit circle, h = 1/n.
  static GridDescriptor ring(int n);
  /// nodes r_i = i/n for i < n; U(1) = 0 is eliminated.
  static GridDescriptor radial(int n, int ambient_dim);

  /// Physical coordinate of node i (x for intervals and ring, r for radial).
  double coordinate(int i) const;

  bool operator==(const GridDescriptor&) const = default;
};

/// A point of the discretized phase space.
class StateVector {
 public:
  StateVector(Eigen::VectorXd values, GridDescriptor grid);

  static StateVector constant(const GridDescriptor& grid, double value);

  const Eigen::VectorXd& values() const noexcept { return values_; }
  const GridDescriptor& grid() const noexcept { return grid_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }

  double sup_norm() const { return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff(); }

  /// Same grid, new values; re-checks the invariants.
  StateVector with_values(Eigen::VectorXd values) const { return StateVector(std::move(values), grid_); }

  bool operator==(const StateVector& other) const {
    return grid_ == other.grid_ && values_ == other.values_;
  }

 private:
  Eigen::VectorXd values_;
  GridDescriptor grid_;
};

/// Throws DimensionError unless both vectors live on the same grid.
void require_same_grid(const StateVector& x, const StateVector& y);

/// ‖x − y‖_∞
double sup_distance(const StateVector& x, const StateVector& y);

}  // namespace monolab
