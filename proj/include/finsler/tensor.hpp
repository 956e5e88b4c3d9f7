#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "finsler/errors.hpp"
#include "finsler/point.hpp"

namespace finsler {

enum class Slot : std::uint8_t { upper, lower };
using Valence = std::vector<Slot>;

inline Valence valence(std::string_view code) {
  Valence v;
  for (char c : code) v.push_back(c == 'u' ? Slot::upper : Slot::lower);
  return v;
}

/// Dense tensor of dimension n. Entries are row-major with the first slot
/// varying slowest, so B^i_jkl lives at ((i*n + j)*n + k)*n + l.
template <typename Scalar>
class Tensor {
public:
  Tensor() = default;

  Tensor(int n, Valence valence, const Scalar& fill = Scalar(0))
      : n_(n), valence_(std::move(valence)), data_(count(n, valence_.size()), fill) {}

  static Tensor scalar(const Scalar& v) {
    Tensor t(1, {}, v);
    return t;
  }

  int dim() const { return n_; }
  int rank() const { return static_cast<int>(valence_.size()); }
  const Valence& valence() const { return valence_; }
  Slot slot(int s) const { return valence_[static_cast<std::size_t>(s)]; }
  std::size_t size() const { return data_.size(); }

  std::vector<Scalar>& data() { return data_; }
  const std::vector<Scalar>& data() const { return data_; }

  Scalar& operator[](std::size_t flat) { return data_[flat]; }
  const Scalar& operator[](std::size_t flat) const { return data_[flat]; }

  template <typename... I>
  Scalar& operator()(I... idx) {
    return data_[offset({static_cast<int>(idx)...})];
  }
  template <typename... I>
  const Scalar& operator()(I... idx) const {
    return data_[offset({static_cast<int>(idx)...})];
  }

  Scalar& at(std::span<const int> idx) { return data_[offset(idx)]; }
  const Scalar& at(std::span<const int> idx) const { return data_[offset(idx)]; }

  std::size_t offset(std::span<const int> idx) const {
    std::size_t k = 0;
    for (int i : idx) k = k * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    return k;
  }
  std::size_t offset(std::initializer_list<int> idx) const { return offset(std::span<const int>(idx.begin(), idx.size())); }

  void unravel(std::size_t flat, std::span<int> idx) const {
    for (int s = rank() - 1; s >= 0; --s) {
      idx[static_cast<std::size_t>(s)] = static_cast<int>(flat % static_cast<std::size_t>(n_));
      flat /= static_cast<std::size_t>(n_);
    }
  }

  const std::optional<EvalPoint>& point() const { return point_; }
  Tensor& anchor(const EvalPoint& p) {
    point_ = p;
    return *this;
  }
  Tensor& anchor(const std::optional<EvalPoint>& p) {
    point_ = p;
    return *this;
  }

  template <typename F>
  auto map(F f) const {
    using R = decltype(f(std::declval<const Scalar&>()));
    Tensor<R> out(n_, valence_);
    for (std::size_t k = 0; k < data_.size(); ++k) out[k] = f(data_[k]);
    out.anchor(point_);
    return out;
  }

  Tensor& operator+=(const Tensor& o) {
    check_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    check_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Tensor& operator*=(const Scalar& s) {
    for (auto& v : data_) v = v * s;
    return *this;
  }

  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(Tensor a, const Scalar& s) { return a *= s; }
  friend Tensor operator*(const Scalar& s, Tensor a) { return a *= s; }

  void check_shape(const Tensor& o) const {
    if (o.n_ != n_ || o.valence_ != valence_) throw Error("tensor shape or valence mismatch");
  }

private:
  static std::size_t count(int n, std::size_t rank) {
    std::size_t c = 1;
    for (std::size_t r = 0; r < rank; ++r) c *= static_cast<std::size_t>(n);
    return c;
  }

  int n_ = 0;
  Valence valence_;
  std::vector<Scalar> data_;
  std::optional<EvalPoint> point_;
};

namespace detail {

template <typename Scalar>
void check_same_point(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  if (a.point() && b.point() && !(*a.point() == *b.point())) throw Error("tensors anchored at different points");
}

inline void check_slot(int rank, int s) {
  if (s < 0 || s >= rank) throw Error("slot index out of range");
}

} // namespace detail

/// Slot-wise reordering: result slot s is input slot perm[s].
template <typename Scalar>
Tensor<Scalar> permute(const Tensor<Scalar>& t, std::span<const int> perm) {
  const int r = t.rank();
  if (static_cast<int>(perm.size()) != r) throw Error("permutation size mismatch");
  Valence v(static_cast<std::size_t>(r));
  for (int s = 0; s < r; ++s) v[static_cast<std::size_t>(s)] = t.slot(perm[static_cast<std::size_t>(s)]);
  Tensor<Scalar> out(t.dim(), v);
  std::vector<int> idx(static_cast<std::size_t>(r)), src(static_cast<std::size_t>(r));
  for (std::size_t k = 0; k < out.size(); ++k) {
    out.unravel(k, idx);
    for (int s = 0; s < r; ++s) src[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])] = idx[static_cast<std::size_t>(s)];
    out[k] = t.at(src);
  }
  out.anchor(t.point());
  return out;
}

template <typename Scalar>
Tensor<Scalar> permute(const Tensor<Scalar>& t, std::initializer_list<int> perm) {
  return permute(t, std::span<const int>(perm.begin(), perm.size()));
}

template <typename Scalar>
Tensor<Scalar> outer(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  if (a.dim() != b.dim() && a.rank() > 0 && b.rank() > 0) throw Error("outer product of different dimensions");
  detail::check_same_point(a, b);
  Valence v = a.valence();
  v.insert(v.end(), b.valence().begin(), b.valence().end());
  Tensor<Scalar> out(a.rank() > 0 ? a.dim() : b.dim(), v);
  std::size_t k = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[k++] = a[i] * b[j];
  out.anchor(a.point() ? a.point() : b.point());
  return out;
}

/// Trace over an upper/lower slot pair.
template <typename Scalar>
Tensor<Scalar> contract(const Tensor<Scalar>& t, int slot_a, int slot_b) {
  detail::check_slot(t.rank(), slot_a);
  detail::check_slot(t.rank(), slot_b);
  if (slot_a == slot_b) throw Error("cannot contract a slot with itself");
  if (t.slot(slot_a) == t.slot(slot_b)) throw Error("contraction needs one upper and one lower slot; supply a metric");
  const int r = t.rank();
  const int n = t.dim();
  Valence v;
  for (int s = 0; s < r; ++s)
    if (s != slot_a && s != slot_b) v.push_back(t.slot(s));
  Tensor<Scalar> out(n, v);
  std::vector<int> idx(static_cast<std::size_t>(r)), res(v.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out.unravel(k, res);
    for (int s = 0, q = 0; s < r; ++s)
      if (s != slot_a && s != slot_b) idx[static_cast<std::size_t>(s)] = res[static_cast<std::size_t>(q++)];
    Scalar acc(0);
    for (int m = 0; m < n; ++m) {
      idx[static_cast<std::size_t>(slot_a)] = m;
      idx[static_cast<std::size_t>(slot_b)] = m;
      acc += t.at(idx);
    }
    out[k] = acc;
  }
  out.anchor(t.point());
  return out;
}

/// Contraction of two same-variance slots through a supplied metric
/// (inverse metric for two lower slots, metric for two upper slots).
template <typename Scalar>
Tensor<Scalar> contract(const Tensor<Scalar>& t, int slot_a, int slot_b, const Tensor<Scalar>& metric) {
  detail::check_slot(t.rank(), slot_a);
  detail::check_slot(t.rank(), slot_b);
  if (t.slot(slot_a) != t.slot(slot_b)) return contract(t, slot_a, slot_b);
  if (metric.rank() != 2 || metric.slot(0) != metric.slot(1) || metric.slot(0) == t.slot(slot_a))
    throw Error("metric valence does not match the contracted slots");
  detail::check_same_point(t, metric);
  // t ⊗ metric, then contract slot_a with metric slot 0 and slot_b with metric slot 1.
  Tensor<Scalar> full = outer(t, metric);
  const int r = t.rank();
  Tensor<Scalar> once = contract(full, slot_a, r);
  const int b = slot_b > slot_a ? slot_b - 1 : slot_b;
  return contract(once, b, r - 1);
}

/// Contracts slot s of t with a rank-1 tensor of opposite variance; the slot disappears.
template <typename Scalar>
Tensor<Scalar> apply(const Tensor<Scalar>& t, int s, const Tensor<Scalar>& v) {
  detail::check_slot(t.rank(), s);
  if (v.rank() != 1 || v.slot(0) == t.slot(s)) throw Error("apply needs a rank-1 tensor of opposite variance");
  detail::check_same_point(t, v);
  const int r = t.rank();
  const int n = t.dim();
  Valence val;
  for (int q = 0; q < r; ++q)
    if (q != s) val.push_back(t.slot(q));
  Tensor<Scalar> out(n, val);
  std::vector<int> idx(static_cast<std::size_t>(r)), res(val.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out.unravel(k, res);
    for (int q = 0, p = 0; q < r; ++q)
      if (q != s) idx[static_cast<std::size_t>(q)] = res[static_cast<std::size_t>(p++)];
    Scalar acc(0);
    for (int m = 0; m < n; ++m) {
      idx[static_cast<std::size_t>(s)] = m;
      acc += t.at(idx) * v[static_cast<std::size_t>(m)];
    }
    out[k] = acc;
  }
  out.anchor(t.point() ? t.point() : v.point());
  return out;
}

namespace detail {

template <typename Scalar>
Tensor<Scalar> move_slot(const Tensor<Scalar>& t, int slot, const Tensor<Scalar>& metric, Slot from) {
  check_slot(t.rank(), slot);
  if (t.slot(slot) != from) throw Error(from == Slot::lower ? "raise: slot is not lower" : "lower: slot is not upper");
  if (metric.rank() != 2 || metric.slot(0) == from || metric.slot(1) == from)
    throw Error("metric has the wrong valence for this operation");
  check_same_point(t, metric);
  // metric^{a s} t_{..s..}: the new index comes out of metric slot 0.
  Tensor<Scalar> prod = outer(metric, t);
  Tensor<Scalar> c = contract(prod, 1, 2 + slot);
  // c has slot order (new, t-slots without `slot`); move `new` back into place.
  std::vector<int> perm;
  for (int s = 0; s < t.rank(); ++s) perm.push_back(s < slot ? s + 1 : (s == slot ? 0 : s));
  return permute(c, std::span<const int>(perm));
}

} // namespace detail

template <typename Scalar>
Tensor<Scalar> raise(const Tensor<Scalar>& t, int slot, const Tensor<Scalar>& g_inv) {
  return detail::move_slot(t, slot, g_inv, Slot::lower);
}

template <typename Scalar>
Tensor<Scalar> lower(const Tensor<Scalar>& t, int slot, const Tensor<Scalar>& g) {
  return detail::move_slot(t, slot, g, Slot::upper);
}

/// Average over all permutations of the listed slots.
template <typename Scalar>
Tensor<Scalar> sym(const Tensor<Scalar>& t, std::vector<int> slots) {
  std::sort(slots.begin(), slots.end());
  for (int s : slots) detail::check_slot(t.rank(), s);
  for (std::size_t a = 1; a < slots.size(); ++a)
    if (t.slot(slots[a]) != t.slot(slots[0])) throw Error("symmetrized slots must share variance");
  std::vector<int> order = slots;
  Tensor<Scalar> acc(t.dim(), t.valence());
  int count = 0;
  do {
    std::vector<int> perm(static_cast<std::size_t>(t.rank()));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t a = 0; a < slots.size(); ++a) perm[static_cast<std::size_t>(slots[a])] = order[a];
    acc += permute(t, std::span<const int>(perm));
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  acc *= Scalar(1.0 / count);
  acc.anchor(t.point());
  return acc;
}

inline double max_abs(const Tensor<double>& t) {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

/// max_abs(a - b) / (1 + max(max_abs(a), max_abs(b))).
inline double rel_residual(const Tensor<double>& a, const Tensor<double>& b) {
  if (a.dim() != b.dim() || a.size() != b.size()) throw Error("rel_residual: shape mismatch");
  double diff = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) diff = std::max(diff, std::abs(a[k] - b[k]));
  if (std::isnan(diff)) return diff;
  return diff / (1.0 + std::max(max_abs(a), max_abs(b)));
}

inline double rel_residual_zero(const Tensor<double>& a) {
  const double m = max_abs(a);
  return m / (1.0 + m);
}

inline Tensor<double> kronecker(int n) {
  Tensor<double> d(n, valence("ul"));
  for (int i = 0; i < n; ++i) d(i, i) = 1.0;
  return d;
}

inline Eigen::MatrixXd to_matrix(const Tensor<double>& t) {
  if (t.rank() != 2) throw Error("to_matrix needs a rank-2 tensor");
  Eigen::MatrixXd m(t.dim(), t.dim());
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j) m(i, j) = t(i, j);
  return m;
}

inline Tensor<double> from_matrix(const Eigen::MatrixXd& m, Valence v) {
  Tensor<double> t(static_cast<int>(m.rows()), std::move(v));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) t(i, j) = m(i, j);
  return t;
}

inline Eigen::VectorXd to_vector(const Tensor<double>& t) {
  if (t.rank() != 1) throw Error("to_vector needs a rank-1 tensor");
  return Eigen::Map<const Eigen::VectorXd>(t.data().data(), t.dim());
}

inline Tensor<double> from_vector(const Eigen::VectorXd& v, Slot s) {
  Tensor<double> t(static_cast<int>(v.size()), {s});
  for (int i = 0; i < v.size(); ++i) t[static_cast<std::size_t>(i)] = v[i];
  return t;
}

/// LDLT-based test with pivot threshold 1e-10 x (largest diagonal entry).
bool is_positive_definite(const Eigen::MatrixXd& m);

} // namespace finsler
