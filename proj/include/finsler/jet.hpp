#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "finsler/point.hpp"

namespace finsler {

/// Exponents of a monomial in the 2n variables (x^1..x^n, y^1..y^n).
struct MultiIndex {
  std::vector<int> exponents;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e) : exponents(std::move(e)) {}

  static MultiIndex zero(int num_vars) { return MultiIndex(std::vector<int>(num_vars, 0)); }
  static MultiIndex unit(int num_vars, int var);

  int size() const { return static_cast<int>(exponents.size()); }
  int order() const;
  /// alpha! = prod_q alpha_q!
  double factorial() const;

  MultiIndex& add(int var, int count = 1);
  MultiIndex plus(int var, int count = 1) const { return MultiIndex(*this).add(var, count); }

  bool operator==(const MultiIndex&) const = default;
};

/// Builds the multi-index d^k / (dy^{i1} ... dy^{ik}) in a 2n-variable space.
MultiIndex y_derivative(int n, std::initializer_list<int> ys);

/// Graded monomial enumeration and product tables for a (variables, order)
/// pair. Monomials are ordered by total degree, so the coefficients of
/// degree <= d form a prefix of length size(d). Shared and immutable.
class JetLayout {
public:
  struct Term {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
  };

  static std::shared_ptr<const JetLayout> get(int num_vars, int max_order);

  JetLayout(int num_vars, int max_order);

  int num_vars() const { return num_vars_; }
  int max_order() const { return max_order_; }

  /// Number of monomials of degree <= order.
  std::size_t size(int order) const { return degree_offset_[static_cast<std::size_t>(order) + 1]; }
  int degree(std::size_t k) const { return degree_[k]; }
  int exponent(std::size_t k, int var) const { return monomials_[k].exponents[var]; }
  const MultiIndex& monomial(std::size_t k) const { return monomials_[k]; }
  double factorial(std::size_t k) const { return factorial_[k]; }

  /// Position of a monomial; throws std::out_of_range when its order exceeds max_order().
  std::size_t index(const MultiIndex& alpha) const;

  /// Products a*b = out with degree(out) <= order, grouped by degree(out).
  std::span<const Term> products(int order) const;
  std::span<const Term> products_of_degree(int degree) const;

  /// Index of monomial k multiplied by variable var; requires degree(k) < max_order().
  std::uint32_t shifted(int var, std::size_t k) const { return shifted_[static_cast<std::size_t>(var) * size(max_order_ - 1) + k]; }

private:
  std::uint64_t key(const std::vector<int>& e) const;

  int num_vars_;
  int max_order_;
  std::vector<MultiIndex> monomials_;
  std::vector<int> degree_;
  std::vector<double> factorial_;
  std::vector<std::size_t> degree_offset_;
  std::unordered_map<std::uint64_t, std::uint32_t> lookup_;
  std::vector<Term> terms_;
  std::vector<std::size_t> term_offset_;
  std::vector<std::uint32_t> shifted_;
};

/// Truncated multivariate Taylor expansion about a point. Coefficient of
/// alpha is d^alpha f / alpha!. A jet without a layout is an exact constant
/// (valid to every order); it broadcasts against laid-out jets.
class Jet {
public:
  static constexpr int kExact = std::numeric_limits<int>::max();

  Jet() : c_{0.0} {}
  Jet(double value) : c_{value} {} // NOLINT: constants promote implicitly

  static Jet variable(std::shared_ptr<const JetLayout> layout, int var, double value);
  static Jet zero(std::shared_ptr<const JetLayout> layout, int order);

  bool is_constant() const { return !layout_; }
  const std::shared_ptr<const JetLayout>& layout() const { return layout_; }
  int order() const { return order_; }
  double value() const { return c_[0]; }

  std::span<const double> coefficients() const { return c_; }
  double coefficient(const MultiIndex& alpha) const;
  /// d^alpha f at the expansion point.
  double partial(const MultiIndex& alpha) const;

  Jet derivative(int var) const;
  Jet truncated(int order) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs);
  Jet& operator/=(const Jet& rhs);
  Jet& operator*=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }

  friend Jet sqrt(const Jet& a);
  friend Jet pow(const Jet& a, int exponent);

private:
  Jet(std::shared_ptr<const JetLayout> layout, int order, std::vector<double> c)
      : layout_(std::move(layout)), order_(order), c_(std::move(c)) {}

  std::shared_ptr<const JetLayout> layout_;
  int order_ = kExact;
  std::vector<double> c_;
};

Jet sqrt(const Jet& a);
Jet pow(const Jet& a, int exponent);

/// Coordinate function of variable var (0 <= var < 2n), expanded at point.
Jet lift(const EvalPoint& point, int var, int max_order);

/// All 2n coordinate jets at point, x first.
std::vector<Jet> lift_all(const EvalPoint& point, int max_order);

using ScalarField = std::function<Jet(std::span<const Jet> vars)>;

/// d^alpha field at point, by one jet evaluation of order |alpha|.
double partial(const ScalarField& field, const EvalPoint& point, const MultiIndex& alpha);

} // namespace finsler
