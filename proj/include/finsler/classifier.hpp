#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "finsler/geometry.hpp"

namespace finsler {

/// Pointwise fit of
///   B^i_jkl = (mu_j h_kl + mu_k h_jl + mu_l h_jk) y^i + lambda (h^i_j h_kl + h^i_k h_jl + h^i_l h_jk)
/// with lambda from the trace of E and mu from J.
struct SpecialBerwaldFit {
  Eigen::VectorXd mu;
  double lambda = 0.0;
  double residual = 0.0;

  static constexpr double kThreshold = 1e-6;
  bool special() const { return residual < kThreshold; }
};

SpecialBerwaldFit fit_special_berwald(const Geometry& geo);
SpecialBerwaldFit fit_special_berwald(const Metric& metric, const EvalPoint& p);

/// mu and lambda as germs about p, so that mu' and lambda' can be taken.
struct MuLambda {
  Field mu;
  Jet lambda;
};
MuLambda mu_lambda(const Geometry& geo);

/// Value of the right-hand side of the fit for given mu, lambda.
Tensor<double> special_berwald_form(const Geometry& geo, const Eigen::VectorXd& mu, double lambda);

/// Outcome of a check that only makes sense under a precondition.
struct Conditional {
  bool applicable = false;
  double residual = 0.0;
  std::string reason;

  static Conditional na(std::string why) { return {false, 0.0, std::move(why)}; }
  static Conditional ok(double r) { return {true, r, {}}; }
};

struct GdwResult {
  /// rel_residual of h^i_a D^a_jkl|m y^m against zero.
  double residual = 0.0;
  /// T_jkl = F^-2 y_a D^a_jkl|m y^m.
  Tensor<double> witness;
  /// rel_residual(D_|m y^m, y (x) T).
  double witness_residual = 0.0;
};
/// Needs an expansion of order >= 7.
GdwResult gdw_check(const Geometry& geo);

struct Predicate {
  std::string name;
  double residual;
  bool holds;
};
/// is_riemannian (C), is_riemannian_deicke (I), is_c_reducible (M), is_berwald (B),
/// is_weakly_berwald (E), is_landsberg (L), is_weakly_landsberg (J),
/// is_douglas (D), is_stretch (Sigma). residual = max|T| / (1 + max|T|).
std::vector<Predicate> predicates(const Geometry& geo, double tol = 1e-8);

/// Per-point parts of the L = 0 <=> J = 0 check.
struct LandsbergRelations {
  double landsberg_form = 0.0;      // L vs -F^2/2 (mu_j h_kl + ...)
  double mean_landsberg_form = 0.0; // J vs -(n+1) F^2 mu / 2
  double L_norm = 0.0;
  double J_norm = 0.0;
};
LandsbergRelations landsberg_relations(const Geometry& geo, const SpecialBerwaldFit& fit);

struct Theorem3Report {
  bool applicable = false;
  std::string reason;
  double landsberg_form = 0.0;
  double mean_landsberg_form = 0.0;
  /// Samples where exactly one of L, J is zero under the shared tolerance.
  int equivalence_violations = 0;
};
/// Requires every sample to pass the special-Berwald fit.
Theorem3Report theorem3_check(const Metric& metric, const std::vector<EvalPoint>& samples, double tol = 1e-5);

/// Flag curvature at 20 random flags (y', u) over the same x.
struct Isotropy {
  double K = 0.0;
  double spread = 0.0;
  bool isotropic = false;
};
Isotropy flag_isotropy(const Metric& metric, const Eigen::VectorXd& x, unsigned long long seed, int flags = 20);

/// rel_residual(mu'_j, 2K/(n+1) I_j); needs the fit and isotropy at p.
Conditional theorem2_relation(const Geometry& geo, const Isotropy& iso);
/// rel_residual(2 H_jk, (n+1) lambda' h_jk); needs the fit at p.
Conditional lambda_prime_check(const Geometry& geo);
/// max|mu'| when the fit holds and Sigma = 0 at p.
Conditional stretch_mu_check(const Geometry& geo, double stretch_tol = 1e-8);

/// R^i_jkl against K (g_jl delta^i_k - g_jk delta^i_l).
double isotropic_riemann_residual(const Geometry& geo, double K);
/// B^i_jml|k y^k against 2 K C_jml y^i.
double isotropic_berwald_residual(const Geometry& geo, double K);

/// Fits C_ijk ~ B_i h_jk + B_j h_ik + B_k h_ij; when that fit is within 1e-8,
/// returns rel_residual(I, (n+1) B).
Conditional cartan_reducible_trace(const Geometry& geo);

/// lambda y_l / F^2 + lambda_{,l}, as a relative residual.
double lambda_vertical_relation(const Geometry& geo);

} // namespace finsler
