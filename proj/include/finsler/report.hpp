#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/metric.hpp"

namespace finsler {

struct RunConfig {
  std::string metric = "euclidean"; // built-in name or spec file path
  int dim = 3;
  int samples = 20;
  unsigned long long seed = 1;
  std::map<std::string, double> tolerances;
  std::optional<std::string> out;
  std::string format = "human"; // human | json
  int threads = 0;               // 0: hardware concurrency
};

struct CheckInfo {
  std::string name;
  std::string anchor; // the identity being checked, written out
  double tolerance;
};

/// Every check the suite runs, in report order.
const std::vector<CheckInfo>& check_catalog();

struct CheckRecord {
  std::string name;
  std::string anchor;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool applicable = false;
  bool pass = true;
  int applicable_samples = 0;
  std::string note;
};

struct CheckReport {
  RunConfig config;
  MetricSpec metric;
  std::vector<EvalPoint> samples;
  std::vector<CheckRecord> checks;
  nlohmann::json properties;
  bool pass = true;

  const CheckRecord& check(const std::string& name) const;
};

/// Direction uniform on the unit sphere, scaled by a factor in [0.5, 2].
Eigen::VectorXd sample_direction(int n, std::mt19937_64& rng);
/// Position uniform in the ball of Metric::sampling_radius(), else in [-0.5, 0.5]^n.
Eigen::VectorXd sample_position(const Metric& metric, std::mt19937_64& rng);
/// Draws `count` valid points, resampling a rejected draw up to 100 times.
std::vector<EvalPoint> sample_points(const Metric& metric, int count, unsigned long long seed);

Metric load_metric(const std::string& name_or_path, int dim);

/// Runs the whole suite at the sampled points. Samples are evaluated on a
/// worker pool and merged by index. Throws on unknown tolerance names.
CheckReport run_checks(const Metric& metric, const RunConfig& config);
CheckReport run_checks(const RunConfig& config);

nlohmann::json to_json(const CheckReport& report, bool with_metadata = true);
/// Table of checks sorted by residual, largest first.
std::string format_human(const CheckReport& report);

/// All curvature tensors at one point, with the index convention spelled out.
nlohmann::json tensor_dump(const Metric& metric, const EvalPoint& p);

} // namespace finsler
