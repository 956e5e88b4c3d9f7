#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "finsler/metric.hpp"

namespace finsler {

struct TrajectoryRow {
  double t;
  Eigen::VectorXd x;
  Eigen::VectorXd v;
  double F;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  /// Set when the curve left the metric's domain; rows stop at the last valid step.
  std::optional<std::string> domain_exit;
  double last_valid_t = 0.0;

  /// max |F(t) - F(0)| / F(0) over the recorded rows.
  double F_drift() const;
};

/// Classical RK4 with fixed step T/steps for  x'' + 2 G(x, x') = 0.
/// Throws DomainError when (x0, y0) itself is invalid, Error when the step
/// underflows.
Trajectory geodesic(const Metric& metric, const Eigen::VectorXd& x0, const Eigen::VectorXd& y0, double T, int steps = 2000);

/// Acceleration -2 G(x, v).
Eigen::VectorXd geodesic_acceleration(const Metric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& v);

/// Writes rows as whitespace-delimited text: t x1..xn v1..vn F.
void write_trajectory(std::ostream& out, const Trajectory& tr);

} // namespace finsler
