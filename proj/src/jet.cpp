#include "finsler/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "finsler/errors.hpp"

namespace finsler {

MultiIndex MultiIndex::unit(int num_vars, int var) {
  MultiIndex m = zero(num_vars);
  m.exponents.at(static_cast<std::size_t>(var)) = 1;
  return m;
}

int MultiIndex::order() const {
  int s = 0;
  for (int e : exponents) s += e;
  return s;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int e : exponents)
    for (int k = 2; k <= e; ++k) f *= k;
  return f;
}

MultiIndex& MultiIndex::add(int var, int count) {
  exponents.at(static_cast<std::size_t>(var)) += count;
  return *this;
}

MultiIndex y_derivative(int n, std::initializer_list<int> ys) {
  MultiIndex m = MultiIndex::zero(2 * n);
  for (int i : ys) m.add(n + i);
  return m;
}

// ---------------------------------------------------------------------------
// JetLayout

namespace {

void enumerate_degree(int num_vars, int degree, int var, std::vector<int>& current,
                      std::vector<MultiIndex>& out) {
  if (var == num_vars - 1) {
    current[var] = degree;
    out.emplace_back(current);
    current[var] = 0;
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[var] = e;
    enumerate_degree(num_vars, degree - e, var + 1, current, out);
  }
  current[var] = 0;
}

} // namespace

JetLayout::JetLayout(int num_vars, int max_order) : num_vars_(num_vars), max_order_(max_order) {
  if (num_vars < 1 || max_order < 0 || max_order > 12)
    throw std::invalid_argument("JetLayout: unsupported variable count or order");

  degree_offset_.push_back(0);
  std::vector<int> current(static_cast<std::size_t>(num_vars), 0);
  for (int d = 0; d <= max_order; ++d) {
    enumerate_degree(num_vars, d, 0, current, monomials_);
    degree_offset_.push_back(monomials_.size());
  }
  for (std::size_t k = 0; k < monomials_.size(); ++k) {
    degree_.push_back(monomials_[k].order());
    factorial_.push_back(monomials_[k].factorial());
    lookup_.emplace(key(monomials_[k].exponents), static_cast<std::uint32_t>(k));
  }

  term_offset_.push_back(0);
  std::vector<int> sum(static_cast<std::size_t>(num_vars));
  for (int d = 0; d <= max_order; ++d) {
    for (std::size_t a = 0; a < size(d); ++a) {
      const int rest = d - degree_[a];
      const std::size_t b_begin = rest == 0 ? 0 : degree_offset_[static_cast<std::size_t>(rest)];
      const std::size_t b_end = degree_offset_[static_cast<std::size_t>(rest) + 1];
      for (std::size_t b = b_begin; b < b_end; ++b) {
        for (int q = 0; q < num_vars; ++q) sum[q] = monomials_[a].exponents[q] + monomials_[b].exponents[q];
        terms_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), lookup_.at(key(sum))});
      }
    }
    term_offset_.push_back(terms_.size());
  }

  if (max_order > 0) {
    const std::size_t lower = size(max_order - 1);
    shifted_.resize(static_cast<std::size_t>(num_vars) * lower);
    for (int q = 0; q < num_vars; ++q)
      for (std::size_t k = 0; k < lower; ++k) {
        std::vector<int> e = monomials_[k].exponents;
        ++e[q];
        shifted_[static_cast<std::size_t>(q) * lower + k] = lookup_.at(key(e));
      }
  }
}

std::uint64_t JetLayout::key(const std::vector<int>& e) const {
  std::uint64_t k = 0;
  for (int q = num_vars_ - 1; q >= 0; --q) k = k * static_cast<std::uint64_t>(max_order_ + 1) + static_cast<std::uint64_t>(e[q]);
  return k;
}

std::size_t JetLayout::index(const MultiIndex& alpha) const {
  if (alpha.size() != num_vars_) throw std::out_of_range("multi-index has wrong variable count");
  for (int e : alpha.exponents)
    if (e < 0) throw std::out_of_range("negative exponent in multi-index");
  if (alpha.order() > max_order_) throw std::out_of_range("multi-index order exceeds jet order");
  return lookup_.at(key(alpha.exponents));
}

std::span<const JetLayout::Term> JetLayout::products(int order) const {
  return {terms_.data(), term_offset_[static_cast<std::size_t>(order) + 1]};
}

std::span<const JetLayout::Term> JetLayout::products_of_degree(int degree) const {
  const auto begin = term_offset_[static_cast<std::size_t>(degree)];
  const auto end = term_offset_[static_cast<std::size_t>(degree) + 1];
  return {terms_.data() + begin, end - begin};
}

std::shared_ptr<const JetLayout> JetLayout::get(int num_vars, int max_order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{num_vars, max_order}];
  if (!slot) slot = std::make_shared<const JetLayout>(num_vars, max_order);
  return slot;
}

// ---------------------------------------------------------------------------
// Jet

namespace {

const std::shared_ptr<const JetLayout>& common_layout(const Jet& a, const Jet& b) {
  if (a.is_constant()) return b.layout();
  if (!b.is_constant() && a.layout() != b.layout()) throw std::invalid_argument("jets from different layouts");
  return a.layout();
}

} // namespace

Jet Jet::variable(std::shared_ptr<const JetLayout> layout, int var, double value) {
  if (var < 0 || var >= layout->num_vars()) throw std::out_of_range("variable index out of range");
  const int order = layout->max_order();
  std::vector<double> c(layout->size(order), 0.0);
  c[0] = value;
  if (order >= 1) c[layout->index(MultiIndex::unit(layout->num_vars(), var))] = 1.0;
  return Jet(std::move(layout), order, std::move(c));
}

Jet Jet::zero(std::shared_ptr<const JetLayout> layout, int order) {
  std::vector<double> c(layout->size(order), 0.0);
  return Jet(std::move(layout), order, std::move(c));
}

double Jet::coefficient(const MultiIndex& alpha) const {
  if (is_constant()) return alpha.order() == 0 ? c_[0] : 0.0;
  if (alpha.order() > order_) throw std::out_of_range("requested coefficient beyond jet order");
  return c_[layout_->index(alpha)];
}

double Jet::partial(const MultiIndex& alpha) const { return coefficient(alpha) * alpha.factorial(); }

Jet Jet::derivative(int var) const {
  if (is_constant()) return Jet(0.0);
  if (order_ == 0) throw Error("jet order exhausted by differentiation; raise the expansion order");
  const int order = order_ - 1;
  std::vector<double> c(layout_->size(order));
  for (std::size_t k = 0; k < c.size(); ++k)
    c[k] = (layout_->exponent(k, var) + 1) * c_[layout_->shifted(var, k)];
  return Jet(layout_, order, std::move(c));
}

Jet Jet::truncated(int order) const {
  if (is_constant() || order >= order_) return *this;
  return Jet(layout_, order, std::vector<double>(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(layout_->size(order))));
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (double& v : r.c_) v = -v;
  return r;
}

Jet& Jet::operator+=(const Jet& rhs) {
  if (is_constant() && rhs.is_constant()) {
    c_[0] += rhs.c_[0];
    return *this;
  }
  if (is_constant()) {
    const double v = c_[0];
    *this = rhs;
    c_[0] += v;
    return *this;
  }
  if (rhs.is_constant()) {
    c_[0] += rhs.c_[0];
    return *this;
  }
  common_layout(*this, rhs);
  if (rhs.order_ < order_) *this = truncated(rhs.order_);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += rhs.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) { return *this += -rhs; }

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet& Jet::operator*=(const Jet& rhs) { return *this = *this * rhs; }
Jet& Jet::operator/=(const Jet& rhs) { return *this = *this / rhs; }

Jet operator*(const Jet& a, const Jet& b) {
  if (a.is_constant()) return b * a.c_[0];
  if (b.is_constant()) return a * b.c_[0];
  const auto& layout = common_layout(a, b);
  const int order = std::min(a.order_, b.order_);
  std::vector<double> c(layout->size(order), 0.0);
  const double* pa = a.c_.data();
  const double* pb = b.c_.data();
  for (const auto& t : layout->products(order)) c[t.out] += pa[t.lhs] * pb[t.rhs];
  return Jet(layout, order, std::move(c));
}

Jet operator/(const Jet& a, const Jet& b) {
  const double b0 = b.c_[0];
  if (b0 == 0.0 || !std::isfinite(b0)) throw DomainError("division by a jet with zero constant term");
  if (b.is_constant()) return a * (1.0 / b0);
  const auto& layout = common_layout(a, b);
  const int order = std::min(a.order_, b.order_);
  std::vector<double> c(layout->size(order), 0.0);
  if (a.is_constant())
    c[0] = a.c_[0];
  else
    std::copy_n(a.c_.begin(), c.size(), c.begin());
  const double* pb = b.c_.data();
  for (int d = 0; d <= order; ++d) {
    for (const auto& t : layout->products_of_degree(d))
      if (t.rhs != 0) c[t.out] -= pb[t.rhs] * c[t.lhs];
    for (std::size_t k = d == 0 ? 0 : layout->size(d - 1); k < layout->size(d); ++k) c[k] /= b0;
  }
  return Jet(layout, order, std::move(c));
}

Jet sqrt(const Jet& a) {
  const double a0 = a.c_[0];
  if (a.is_constant()) {
    if (!(a0 >= 0.0)) throw DomainError("sqrt of a negative constant");
    return Jet(std::sqrt(a0));
  }
  if (!(a0 > 0.0) || !std::isfinite(a0)) throw DomainError("sqrt of a jet with non-positive constant term");
  const auto& layout = a.layout_;
  const int order = a.order_;
  std::vector<double> c(a.c_);
  c[0] = std::sqrt(a0);
  const double twice = 2.0 * c[0];
  for (int d = 1; d <= order; ++d) {
    for (const auto& t : layout->products_of_degree(d))
      if (t.lhs != 0 && t.rhs != 0) c[t.out] -= c[t.lhs] * c[t.rhs];
    for (std::size_t k = layout->size(d - 1); k < layout->size(d); ++k) c[k] /= twice;
  }
  return Jet(layout, order, std::move(c));
}

Jet pow(const Jet& a, int exponent) {
  if (exponent == 0) return Jet(1.0);
  if (exponent < 0) return Jet(1.0) / pow(a, -exponent);
  Jet result(1.0);
  Jet base = a;
  unsigned e = static_cast<unsigned>(exponent);
  while (true) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e == 0) break;
    base = base * base;
  }
  return result;
}

// ---------------------------------------------------------------------------

Jet lift(const EvalPoint& point, int var, int max_order) {
  const int n = point.dim();
  if (var < 0 || var >= 2 * n) throw std::out_of_range("lift: variable index " + std::to_string(var) + " outside [0, 2n)");
  return Jet::variable(JetLayout::get(2 * n, max_order), var, point.coordinate(var));
}

std::vector<Jet> lift_all(const EvalPoint& point, int max_order) {
  std::vector<Jet> vars;
  for (int v = 0; v < 2 * point.dim(); ++v) vars.push_back(lift(point, v, max_order));
  return vars;
}

double partial(const ScalarField& field, const EvalPoint& point, const MultiIndex& alpha) {
  if (alpha.size() != 2 * point.dim()) throw std::invalid_argument("multi-index size must be 2n");
  const auto vars = lift_all(point, alpha.order());
  return field(vars).partial(alpha);
}

} // namespace finsler
