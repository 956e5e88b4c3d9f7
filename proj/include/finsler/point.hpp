#pragma once

#include <Eigen/Core>

namespace finsler {

/// A base point x and a direction y in the tangent space at x.
struct EvalPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd y;

  int dim() const { return static_cast<int>(x.size()); }

  /// Value of the i-th of the 2n coordinates (x first, then y).
  double coordinate(int var) const { return var < dim() ? x[var] : y[var - dim()]; }

  bool operator==(const EvalPoint& other) const {
    return x.size() == other.x.size() && y.size() == other.y.size() && x == other.x && y == other.y;
  }
};

} // namespace finsler
