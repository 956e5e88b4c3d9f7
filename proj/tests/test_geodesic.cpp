#include <gtest/gtest.h>

#include <sstream>

#include "finsler/errors.hpp"
#include "finsler/geodesic.hpp"
#include "finsler/geometry.hpp"
#include "support.hpp"

using namespace finsler;

TEST(Geodesic, EuclideanIsAStraightLine) {
  const Metric m(builtin_spec("euclidean", 3));
  const Eigen::Vector3d x0(0.1, -0.2, 0.3), y0(1.0, 0.5, -0.25);
  const Trajectory tr = geodesic(m, x0, y0, 1.0, 2000);
  ASSERT_FALSE(tr.domain_exit);
  ASSERT_EQ(tr.rows.size(), 2001u);
  EXPECT_LT((tr.rows.back().x - (x0 + y0)).norm(), 1e-10);
  EXPECT_DOUBLE_EQ(tr.rows.back().t, 1.0);
  EXPECT_LT(tr.F_drift(), 1e-14);
}

TEST(Geodesic, FConservedForEveryBuiltin) {
  for (const auto& [name, n] : testing_support::builtins()) {
    const Metric m(builtin_spec(name, n));
    for (const auto& p : testing_support::points(m, 2, 1)) {
      // Keep the Funk curve inside the ball over unit time.
      const Eigen::VectorXd y = 0.2 * p.y / p.y.norm();
      const Trajectory tr = geodesic(m, p.x, y, 1.0, 2000);
      ASSERT_FALSE(tr.domain_exit) << name << ": " << *tr.domain_exit;
      EXPECT_LT(tr.F_drift(), 1e-6) << name;
    }
  }
}

TEST(Geodesic, FunkRaysAreStraight) {
  const Metric m(builtin_spec("funk", 2));
  const Eigen::Vector2d x0(0.1, 0.2), y0(0.3, -0.1);
  const Trajectory tr = geodesic(m, x0, y0, 1.0, 1000);
  for (const auto& row : tr.rows) {
    const Eigen::Vector2d d = row.x - x0;
    EXPECT_LT(std::abs(d[0] * y0[1] - d[1] * y0[0]), 1e-10);
    EXPECT_LT(std::abs(row.v[0] * y0[1] - row.v[1] * y0[0]), 1e-10);
  }
}

TEST(Geodesic, ReportsDomainExit) {
  const Metric m(builtin_spec("funk", 2));
  const Trajectory tr = geodesic(m, Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(5.0, 0.0), 10.0, 200);
  ASSERT_TRUE(tr.domain_exit);
  EXPECT_LT(tr.last_valid_t, 10.0);
  EXPECT_DOUBLE_EQ(tr.rows.back().t, tr.last_valid_t);
  for (const auto& row : tr.rows) EXPECT_LT(row.x.norm(), 1.0);
}

TEST(Geodesic, RejectsBadArguments) {
  const Metric m(builtin_spec("funk", 2));
  EXPECT_THROW(geodesic(m, Eigen::Vector2d(1.5, 0), Eigen::Vector2d(1, 0), 1.0), DomainError);
  EXPECT_THROW(geodesic(m, Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0), 1.0), DomainError);
  EXPECT_THROW(geodesic(m, Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), -1.0), Error);
  EXPECT_THROW(geodesic(m, Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 1.0, 0), Error);
}

TEST(Geodesic, AccelerationIsMinusTwiceSpray) {
  const Metric m(builtin_spec("sphere", 3));
  const auto p = testing_support::points(m, 1, 2)[0];
  const Eigen::VectorXd a = geodesic_acceleration(m, p.x, p.y);
  const Eigen::VectorXd G = to_vector(spray(m, p).G);
  EXPECT_LT((a + 2 * G).norm(), 1e-14);
}

TEST(Geodesic, WritesOneRowPerStep) {
  const Metric m(builtin_spec("euclidean", 2));
  const Trajectory tr = geodesic(m, Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 1.0, 4);
  std::ostringstream out;
  write_trajectory(out, tr);
  std::istringstream in(out.str());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream cols(line);
    int count = 0;
    double v;
    while (cols >> v) ++count;
    EXPECT_EQ(count, 6);
    ++rows;
  }
  EXPECT_EQ(rows, 5);
}
