#pragma once

#include <optional>

#include <Eigen/Core>

#include "finsler/jet.hpp"
#include "finsler/metric.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

/// A tensor whose entries are Taylor expansions about one point of TM_0.
/// Differentiating the entries is exact, which is how horizontal and
/// vertical covariant derivatives are taken.
using Field = Tensor<Jet>;

/// F^2 needs two derivatives to reach G^i, and H_ij needs four more.
inline constexpr int kDefaultOrder = 6;
/// hh-curvature R^i_jkl sits at order 6 already; its derivatives need one more.
inline constexpr int kBianchiOrder = 7;

Tensor<double> value(const Field& f);

struct SprayData {
  Tensor<double> G;     // G^i
  Tensor<double> N;     // N^i_j = dG^i/dy^j
  Tensor<double> Gamma; // Gamma^i_jk = d^2 G^i / dy^j dy^k
};

/// Every curvature quantity of a metric, expanded about one point and
/// computed lazily. Index order follows the usual written order, with the
/// upper index first: B^i_jkl is B(i, j, k, l), R^i_k is R(i, k).
///
/// Covariant derivatives use the Berwald connection:
///   T_{|m} = dT/dx^m - N^p_m dT/dy^p + Gamma^i_pm T^p - Gamma^p_jm T_p (per slot)
///
/// A Geometry is not safe for concurrent use (its caches are filled on
/// demand); create one per thread.
class Geometry {
public:
  Geometry(const Metric& metric, const EvalPoint& p, int order = kDefaultOrder);

  const Metric& metric() const { return *metric_; }
  const EvalPoint& point() const { return point_; }
  int dim() const { return n_; }
  int order() const { return order_; }

  const Jet& F2() const { return f2_; }
  const Jet& F() const;

  const Field& y() const;
  const Field& y_lower() const;
  const Field& g() const;
  const Field& g_inv() const;
  const Field& h() const;
  const Field& h_mixed() const;

  const Field& spray() const;
  const Field& nonlinear_connection() const;
  const Field& berwald_connection() const;

  const Field& cartan() const;
  const Field& mean_cartan() const;
  const Field& matsumoto() const;
  const Field& berwald() const;
  const Field& mean_berwald() const;
  const Field& douglas() const;
  /// L_ijk = C_ijk|s y^s.
  const Field& landsberg() const;
  /// -1/2 y_i B^i_jkl, the algebraic route to L_jkl.
  const Field& landsberg_from_berwald() const;
  const Field& mean_landsberg() const;
  /// R^i_k.
  const Field& riemann() const;
  /// R^i_jkl = 1/3 (R^i_k,j,l - R^i_l,j,k).
  const Field& hh_curvature() const;
  /// H_ij = E_ij|m y^m.
  const Field& h_curvature() const;
  /// H_ij from the local-coordinates expression in derivatives of G^i.
  Tensor<double> h_curvature_explicit() const;
  /// Sigma_ijkl = 2 (L_ijk|l - L_ijl|k).
  const Field& stretch() const;

  /// Appends a lower slot m holding T_{|m}.
  Field horizontal(const Field& t) const;
  /// Appends a lower slot m holding dT/dy^m.
  Field vertical(const Field& t) const;
  /// T_{|m} y^m.
  Field along_spray(const Field& t) const;

  Field scalar(const Jet& s) const;
  SprayData spray_data() const;

private:
  template <typename Make>
  const Field& cached(std::optional<Field>& slot, Make make) const {
    if (!slot) {
      slot = make();
      slot->anchor(point_);
    }
    return *slot;
  }

  const Metric* metric_;
  EvalPoint point_;
  int n_;
  int order_;
  Jet f2_;

  mutable std::optional<Jet> f_;
  mutable std::optional<Field> y_, y_lower_, g_, g_inv_, h_, h_mixed_;
  mutable std::optional<Field> spray_, connection_, gamma_;
  mutable std::optional<Field> cartan_, mean_cartan_, matsumoto_, berwald_, mean_berwald_, douglas_;
  mutable std::optional<Field> landsberg_, landsberg_b_, mean_landsberg_, riemann_, hh_, h_curv_, stretch_;
};

SprayData spray(const Metric& metric, const EvalPoint& p);

/// Relative residuals of the Bianchi identities for the Berwald connection:
///   first:      R^i_jkl|m + R^i_jlm|k + R^i_jmk|l = 0
///   first_full: the same sum plus B^i_jkp R^p_lm + B^i_jlp R^p_mk + B^i_jmp R^p_kl,
///               with R^p_kl = y^j R^p_jkl
///   second:     B^i_jml|k - B^i_jkm|l = R^i_jkl,m
///   third:      B^i_jkl,m = B^i_jkm,l
/// Needs an expansion of order >= 7.
struct BianchiResiduals {
  double first = 0.0;
  double first_full = 0.0;
  double second = 0.0;
  double third = 0.0;
};
BianchiResiduals bianchi_residuals(const Geometry& geo);

/// Tensor-level horizontal derivative for a field already expanded at p.
inline Field horizontal_derivative(const Geometry& geo, const Field& t) { return geo.horizontal(t); }

/// K(P, y) for the flag spanned by y and u; throws DegenerateError when u is
/// (nearly) parallel to y.
double flag_curvature(const Geometry& geo, const Eigen::VectorXd& u);
double flag_curvature(const Metric& metric, const EvalPoint& p, const Eigen::VectorXd& u);

} // namespace finsler
