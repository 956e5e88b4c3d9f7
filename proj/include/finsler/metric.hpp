#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "finsler/expression.hpp"
#include "finsler/jet.hpp"
#include "finsler/point.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

enum class MetricKind { euclidean, riemannian, randers, funk, custom };

std::string to_string(MetricKind kind);
MetricKind metric_kind_from_string(std::string_view name);

/// Declarative description of a Finsler metric on an open subset of R^n.
///   riemannian: F = sqrt(a_ij(x) y^i y^j)
///   randers:    F = sqrt(a_ij(x) y^i y^j) + b_i(x) y^i
///   funk:       the Funk metric of the unit ball
///   custom:     F given as one expression in x and y
struct MetricSpec {
  std::string name;
  MetricKind kind = MetricKind::euclidean;
  int dimension = 2;
  std::vector<std::vector<std::string>> a;
  std::vector<std::string> b;
  std::string F;
  std::optional<double> domain_radius;
};

std::vector<std::string> builtin_names();
/// Named fixtures: euclidean, conformal, sphere, randers, randers-closed,
/// randers-twisted, funk, berwald-product (n >= 3).
MetricSpec builtin_spec(std::string_view name, int n);
bool is_builtin(std::string_view name);

MetricSpec metric_spec_from_document(const nlohmann::json& doc);
nlohmann::json to_document(const MetricSpec& spec);
/// Reads a .toml (flat subset) or .json metric spec file.
MetricSpec load_metric_spec(const std::string& path);

class Metric {
public:
  /// Parses every expression and validates the metric at a set of probe
  /// positions; throws ValidationError on failure (parse errors included).
  explicit Metric(MetricSpec spec);

  const MetricSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }
  MetricKind kind() const { return spec_.kind; }
  int dim() const { return spec_.dimension; }

  template <typename T>
  T F(std::span<const T> x, std::span<const T> y) const;
  template <typename T>
  T F2(std::span<const T> x, std::span<const T> y) const;

  /// Taylor expansion of F^2 in all 2n variables at p.
  Jet F2_jet(const EvalPoint& p, int order) const;
  ScalarField F2_field() const;

  /// Throws DomainError when p lies outside the region where F is a Finsler metric.
  void validate(const EvalPoint& p) const;
  void validate_position(const Eigen::VectorXd& x) const;
  bool is_valid(const EvalPoint& p) const noexcept;

  /// Positions are sampled in the ball of this radius; nullopt means the unit box.
  std::optional<double> sampling_radius() const;

  Eigen::MatrixXd a_matrix(const Eigen::VectorXd& x) const;
  Eigen::VectorXd b_vector(const Eigen::VectorXd& x) const;
  /// sqrt(a^{ij} b_i b_j) for Randers specs.
  double randers_b_norm(const Eigen::VectorXd& x) const;

private:
  std::optional<double> domain_radius() const;
  void check_homogeneity(const EvalPoint& p) const;

  MetricSpec spec_;
  std::vector<std::vector<Expression>> a_;
  std::vector<Expression> b_;
  Expression f_;
};

double evaluate_F(const Metric& metric, const EvalPoint& p);

/// g_ij = (1/2) d^2 F^2 / dy^i dy^j; throws DegenerateError when not positive definite.
Tensor<double> fundamental_tensor(const Metric& metric, const EvalPoint& p);

/// h_ij = g_ij - y_i y_j / F^2.
Tensor<double> angular_metric(const Metric& metric, const EvalPoint& p);

} // namespace finsler
