#pragma once

#include "monolab/state.hpp"

#include <initializer_list>

namespace monolab::test {

inline StateVector vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return StateVector(v, GridDescriptor::euclidean(static_cast<int>(values.size())));
}

}  // namespace monolab::test
