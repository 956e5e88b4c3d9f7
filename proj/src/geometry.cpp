#include "finsler/geometry.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "finsler/errors.hpp"

namespace finsler {

Tensor<double> value(const Field& f) { return f.map([](const Jet& j) { return j.value(); }); }

Geometry::Geometry(const Metric& metric, const EvalPoint& p, int order)
    : metric_(&metric), point_(p), n_(metric.dim()), order_(order) {
  if (order < 2) throw Error("expansion order must be at least 2");
  metric.validate(p);
  f2_ = metric.F2_jet(p, order);
}

const Jet& Geometry::F() const {
  if (!f_) f_ = sqrt(f2_);
  return *f_;
}

Field Geometry::scalar(const Jet& s) const {
  Field t = Field::scalar(s);
  t.anchor(point_);
  return t;
}

const Field& Geometry::y() const {
  return cached(y_, [&] {
    Field t(n_, valence("u"));
    for (int i = 0; i < n_; ++i) t(i) = lift(point_, n_ + i, order_);
    return t;
  });
}

const Field& Geometry::g() const {
  return cached(g_, [&] {
    Field t(n_, valence("ll"));
    std::vector<Jet> dy;
    for (int i = 0; i < n_; ++i) dy.push_back(f2_.derivative(n_ + i));
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) {
        t(i, j) = 0.5 * dy[i].derivative(n_ + j);
        t(j, i) = t(i, j);
      }
    const Eigen::MatrixXd gv = to_matrix(value(t));
    if (!is_positive_definite(gv)) throw DegenerateError("fundamental tensor is not positive definite at this point");
    return t;
  });
}

const Field& Geometry::g_inv() const {
  return cached(g_inv_, [&] {
    const Field& gl = g();
    const Eigen::MatrixXd gv = to_matrix(value(gl));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gv, Eigen::EigenvaluesOnly);
    const double cond = eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
    if (!(cond < 1e12)) throw DegenerateError("fundamental tensor condition number exceeds 1e12");

    // Gauss-Jordan on [g | I]; g is positive definite so no pivoting is needed.
    const int n = n_;
    std::vector<std::vector<Jet>> m(static_cast<std::size_t>(n), std::vector<Jet>(static_cast<std::size_t>(2 * n), Jet(0.0)));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m[i][j] = gl(i, j);
      m[i][n + i] = Jet(1.0);
    }
    for (int c = 0; c < n; ++c) {
      const Jet pivot = m[c][c];
      for (int j = 0; j < 2 * n; ++j) m[c][j] = m[c][j] / pivot;
      for (int r = 0; r < n; ++r) {
        if (r == c) continue;
        const Jet factor = m[r][c];
        for (int j = 0; j < 2 * n; ++j) m[r][j] -= factor * m[c][j];
      }
    }
    Field t(n, valence("uu"));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t(i, j) = m[i][n + j];
    return t;
  });
}

const Field& Geometry::y_lower() const {
  return cached(y_lower_, [&] { return apply(g(), 1, y()); });
}

const Field& Geometry::h() const {
  return cached(h_, [&] {
    const Field& yl = y_lower();
    Field t = g();
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) t(i, j) -= yl(i) * yl(j) / f2_;
    return t;
  });
}

const Field& Geometry::h_mixed() const {
  return cached(h_mixed_, [&] {
    const Field& yl = y_lower();
    const Field& yu = y();
    Field t(n_, valence("ul"));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) t(i, j) = Jet(i == j ? 1.0 : 0.0) - yu(i) * yl(j) / f2_;
    return t;
  });
}

const Field& Geometry::spray() const {
  return cached(spray_, [&] {
    // G^i = 1/4 g^il ( [F^2]_{x^k y^l} y^k - [F^2]_{x^l} )
    const Field& gi = g_inv();
    const Field& yu = y();
    std::vector<Jet> bracket;
    for (int l = 0; l < n_; ++l) {
      const Jet dyl = f2_.derivative(n_ + l);
      Jet acc = -f2_.derivative(l);
      for (int k = 0; k < n_; ++k) acc += dyl.derivative(k) * yu(k);
      bracket.push_back(acc);
    }
    Field t(n_, valence("u"));
    for (int i = 0; i < n_; ++i) {
      Jet acc(0.0);
      for (int l = 0; l < n_; ++l) acc += gi(i, l) * bracket[l];
      t(i) = 0.25 * acc;
    }
    return t;
  });
}

const Field& Geometry::nonlinear_connection() const {
  return cached(connection_, [&] {
    Field t = vertical(spray());
    return t;
  });
}

const Field& Geometry::berwald_connection() const {
  return cached(gamma_, [&] { return vertical(nonlinear_connection()); });
}

const Field& Geometry::cartan() const {
  return cached(cartan_, [&] {
    Field t = vertical(g());
    t *= Jet(0.5);
    return t;
  });
}

const Field& Geometry::mean_cartan() const {
  return cached(mean_cartan_, [&] { return contract(cartan(), 1, 2, g_inv()); });
}

const Field& Geometry::matsumoto() const {
  return cached(matsumoto_, [&] {
    const Field& c = cartan();
    const Field& in = mean_cartan();
    const Field& ha = h();
    Field t = c;
    const double w = 1.0 / (n_ + 1);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
          t(i, j, k) -= w * (in(i) * ha(j, k) + in(j) * ha(i, k) + in(k) * ha(i, j));
    return t;
  });
}

const Field& Geometry::berwald() const {
  return cached(berwald_, [&] { return vertical(berwald_connection()); });
}

const Field& Geometry::mean_berwald() const {
  return cached(mean_berwald_, [&] {
    Field t = contract(berwald(), 0, 3);
    t *= Jet(0.5);
    return t;
  });
}

const Field& Geometry::douglas() const {
  return cached(douglas_, [&] {
    const Field& gs = spray();
    const Field& nc = nonlinear_connection();
    const Field& yu = y();
    Jet trace(0.0);
    for (int m = 0; m < n_; ++m) trace += nc(m, m);
    Field p(n_, valence("u"));
    for (int i = 0; i < n_; ++i) p(i) = gs(i) - (1.0 / (n_ + 1)) * trace * yu(i);
    return vertical(vertical(vertical(p)));
  });
}

const Field& Geometry::landsberg() const {
  return cached(landsberg_, [&] { return along_spray(cartan()); });
}

const Field& Geometry::landsberg_from_berwald() const {
  return cached(landsberg_b_, [&] {
    Field t = apply(berwald(), 0, y_lower());
    t *= Jet(-0.5);
    return t;
  });
}

const Field& Geometry::mean_landsberg() const {
  return cached(mean_landsberg_, [&] { return contract(landsberg(), 1, 2, g_inv()); });
}

const Field& Geometry::riemann() const {
  return cached(riemann_, [&] {
    // R^i_k = 2 G^i_{x^k} - y^j G^i_{x^j y^k} + 2 G^j G^i_{y^j y^k} - G^i_{y^j} G^j_{y^k}
    const Field& gs = spray();
    const Field& nc = nonlinear_connection();
    const Field& gm = berwald_connection();
    const Field& yu = y();
    Field t(n_, valence("ul"));
    for (int i = 0; i < n_; ++i) {
      std::vector<Jet> dx;
      for (int k = 0; k < n_; ++k) dx.push_back(gs(i).derivative(k));
      for (int k = 0; k < n_; ++k) {
        Jet acc = 2.0 * dx[k];
        for (int j = 0; j < n_; ++j) {
          acc -= yu(j) * dx[j].derivative(n_ + k);
          acc += 2.0 * gs(j) * gm(i, j, k);
          acc -= nc(i, j) * nc(j, k);
        }
        t(i, k) = acc;
      }
    }
    return t;
  });
}

const Field& Geometry::hh_curvature() const {
  return cached(hh_, [&] {
    const Field second = vertical(vertical(riemann())); // d^2 R^i_k / dy^a dy^b at (i, k, a, b)
    Field t(n_, valence("ulll"));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
          for (int l = 0; l < n_; ++l) t(i, j, k, l) = (1.0 / 3.0) * (second(i, k, j, l) - second(i, l, j, k));
    return t;
  });
}

const Field& Geometry::h_curvature() const {
  return cached(h_curv_, [&] { return along_spray(mean_berwald()); });
}

Tensor<double> Geometry::h_curvature_explicit() const {
  // 2H_ij = y^m G^k_{y^i y^j y^k x^m} - 2 G^m G^k_{y^i y^j y^k y^m}
  //         - G^m_{y^i} G^k_{y^j y^k y^m} - G^m_{y^j} G^k_{y^i y^k y^m}
  const int n = n_;
  const Field& gs = spray();
  auto d = [&](int k, std::initializer_list<int> ys, int x = -1) {
    MultiIndex a = y_derivative(n, ys);
    if (x >= 0) a.add(x);
    return gs(k).partial(a);
  };
  Tensor<double> out(n, valence("ll"));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
          acc += point_.y[m] * d(k, {i, j, k}, m);
          acc -= 2.0 * gs(m).value() * d(k, {i, j, k, m});
          acc -= d(m, {i}) * d(k, {j, k, m});
          acc -= d(m, {j}) * d(k, {i, k, m});
        }
      out(i, j) = 0.5 * acc;
    }
  out.anchor(point_);
  return out;
}

const Field& Geometry::stretch() const {
  return cached(stretch_, [&] {
    const Field dl = horizontal(landsberg());
    Field t(n_, valence("llll"));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
          for (int l = 0; l < n_; ++l) t(i, j, k, l) = 2.0 * (dl(i, j, k, l) - dl(i, j, l, k));
    return t;
  });
}

Field Geometry::horizontal(const Field& t) const {
  const Field& nc = nonlinear_connection();
  const Field& gm = berwald_connection();
  const int n = n_;
  const int r = t.rank();
  Valence v = t.valence();
  v.push_back(Slot::lower);
  Field out(n, v);
  std::vector<int> idx(static_cast<std::size_t>(r)), moved(static_cast<std::size_t>(r));
  for (std::size_t k = 0; k < t.size(); ++k) {
    t.unravel(k, idx);
    std::vector<Jet> dy;
    for (int p = 0; p < n; ++p) dy.push_back(t[k].derivative(n + p));
    for (int m = 0; m < n; ++m) {
      Jet acc = t[k].derivative(m);
      for (int p = 0; p < n; ++p) acc -= nc(p, m) * dy[p];
      for (int s = 0; s < r; ++s) {
        moved = idx;
        for (int p = 0; p < n; ++p) {
          moved[static_cast<std::size_t>(s)] = p;
          const Jet& entry = t.at(moved);
          if (entry.is_constant() && entry.value() == 0.0) continue;
          const int a = idx[static_cast<std::size_t>(s)];
          if (t.slot(s) == Slot::upper)
            acc += gm(a, p, m) * entry;
          else
            acc -= gm(p, a, m) * entry;
        }
      }
      out[k * static_cast<std::size_t>(n) + static_cast<std::size_t>(m)] = acc;
    }
  }
  out.anchor(point_);
  return out;
}

Field Geometry::vertical(const Field& t) const {
  const int n = n_;
  Valence v = t.valence();
  v.push_back(Slot::lower);
  Field out(n, v);
  for (std::size_t k = 0; k < t.size(); ++k)
    for (int m = 0; m < n; ++m) out[k * static_cast<std::size_t>(n) + static_cast<std::size_t>(m)] = t[k].derivative(n + m);
  out.anchor(point_);
  return out;
}

Field Geometry::along_spray(const Field& t) const {
  const Field ht = horizontal(t);
  return apply(ht, ht.rank() - 1, y());
}

SprayData Geometry::spray_data() const {
  return {value(spray()), value(nonlinear_connection()), value(berwald_connection())};
}

SprayData spray(const Metric& metric, const EvalPoint& p) { return Geometry(metric, p, 4).spray_data(); }

BianchiResiduals bianchi_residuals(const Geometry& geo) {
  if (geo.order() < kBianchiOrder) throw Error("Bianchi identities need an expansion of order 7");
  const int n = geo.dim();
  const Tensor<double> hr = value(geo.horizontal(geo.hh_curvature()));
  const Tensor<double> vr = value(geo.vertical(geo.hh_curvature()));
  const Tensor<double> r = value(geo.hh_curvature());
  const Tensor<double> b = value(geo.berwald());
  const Tensor<double> hb = value(geo.horizontal(geo.berwald()));
  const Tensor<double> vb = value(geo.vertical(geo.berwald()));
  const Eigen::VectorXd& y = geo.point().y;

  Tensor<double> r3(n, valence("ull"));
  for (int p = 0; p < n; ++p)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j) r3(p, k, l) += y[j] * r(p, j, k, l);

  Tensor<double> cyc(n, valence("ullll")), corr(n, valence("ullll")), lhs2(n, valence("ullll")), swapped(n, valence("ullll"));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m) {
            cyc(i, j, k, l, m) = hr(i, j, k, l, m) + hr(i, j, l, m, k) + hr(i, j, m, k, l);
            double c = 0.0;
            for (int p = 0; p < n; ++p) c += b(i, j, k, p) * r3(p, l, m) + b(i, j, l, p) * r3(p, m, k) + b(i, j, m, p) * r3(p, k, l);
            corr(i, j, k, l, m) = -c;
            lhs2(i, j, k, l, m) = hb(i, j, m, l, k) - hb(i, j, k, m, l);
            swapped(i, j, k, l, m) = vb(i, j, k, m, l);
          }
  BianchiResiduals out;
  out.first = rel_residual_zero(cyc);
  out.first_full = rel_residual(cyc, corr);
  out.second = rel_residual(lhs2, vr);
  out.third = rel_residual(vb, swapped);
  return out;
}

double flag_curvature(const Geometry& geo, const Eigen::VectorXd& u) {
  const int n = geo.dim();
  if (u.size() != n) throw Error("flag vector has the wrong dimension");
  const Eigen::MatrixXd g = to_matrix(value(geo.g()));
  const Eigen::MatrixXd r = to_matrix(value(geo.riemann()));
  const Eigen::VectorXd& y = geo.point().y;
  const double gyy = y.dot(g * y);
  const double guu = u.dot(g * u);
  const double gyu = y.dot(g * u);
  if (!(std::abs(gyu) < 0.99 * std::sqrt(gyy) * std::sqrt(guu))) throw DegenerateError("flag is degenerate: u is nearly parallel to y");
  const double denom = gyy * guu - gyu * gyu;
  if (!(denom > 1e-10 * gyy * guu)) throw DegenerateError("flag curvature denominator vanishes");
  return u.dot(g * (r * u)) / denom;
}

double flag_curvature(const Metric& metric, const EvalPoint& p, const Eigen::VectorXd& u) {
  return flag_curvature(Geometry(metric, p, 4), u);
}

} // namespace finsler
