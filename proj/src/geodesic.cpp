#include "finsler/geodesic.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "finsler/errors.hpp"
#include "finsler/geometry.hpp"

namespace finsler {

double Trajectory::F_drift() const {
  if (rows.empty()) return 0.0;
  const double f0 = rows.front().F;
  double d = 0.0;
  for (const auto& r : rows) d = std::max(d, std::abs(r.F - f0) / f0);
  return d;
}

Eigen::VectorXd geodesic_acceleration(const Metric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
  Geometry geo(metric, {x, v}, 2);
  return -2.0 * to_vector(value(geo.spray()));
}

Trajectory geodesic(const Metric& metric, const Eigen::VectorXd& x0, const Eigen::VectorXd& y0, double T, int steps) {
  if (steps < 1) throw Error("geodesic needs at least one step");
  if (!(T > 0.0)) throw Error("geodesic time span must be positive");
  const double h = T / steps;
  if (!(h > 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, T))) throw Error("geodesic step size underflow");

  metric.validate({x0, y0});
  Trajectory tr;
  Eigen::VectorXd x = x0, v = y0;
  tr.rows.push_back({0.0, x, v, evaluate_F(metric, {x, v})});

  for (int s = 1; s <= steps; ++s) {
    try {
      const Eigen::VectorXd k1x = v;
      const Eigen::VectorXd k1v = geodesic_acceleration(metric, x, v);
      const Eigen::VectorXd k2x = v + 0.5 * h * k1v;
      const Eigen::VectorXd k2v = geodesic_acceleration(metric, x + 0.5 * h * k1x, k2x);
      const Eigen::VectorXd k3x = v + 0.5 * h * k2v;
      const Eigen::VectorXd k3v = geodesic_acceleration(metric, x + 0.5 * h * k2x, k3x);
      const Eigen::VectorXd k4x = v + h * k3v;
      const Eigen::VectorXd k4v = geodesic_acceleration(metric, x + h * k3x, k4x);
      const Eigen::VectorXd nx = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      const Eigen::VectorXd nv = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      const double f = evaluate_F(metric, {nx, nv});
      if (!std::isfinite(f)) throw DomainError("F is not finite");
      x = nx;
      v = nv;
      tr.rows.push_back({s * h, x, v, f});
    } catch (const DomainError& e) {
      tr.domain_exit = e.what();
      break;
    } catch (const DegenerateError& e) {
      tr.domain_exit = e.what();
      break;
    }
  }
  tr.last_valid_t = tr.rows.back().t;
  return tr;
}

void write_trajectory(std::ostream& out, const Trajectory& tr) {
  out << std::setprecision(17);
  for (const auto& r : tr.rows) {
    out << r.t;
    for (int i = 0; i < r.x.size(); ++i) out << ' ' << r.x[i];
    for (int i = 0; i < r.v.size(); ++i) out << ' ' << r.v[i];
    out << ' ' << r.F << '\n';
  }
}

} // namespace finsler
