#include "finsler/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/QR>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

double scalar_value(const Field& f) { return f[0].value(); }

Eigen::VectorXd vector_value(const Field& f) { return to_vector(value(f)); }

// Sum over the three placements of a covector w into w_j h_kl + w_k h_jl + w_l h_jk.
template <typename W>
double h_sym(const W& w, const Tensor<double>& h, int j, int k, int l) {
  return w(j) * h(k, l) + w(k) * h(j, l) + w(l) * h(j, k);
}

} // namespace

MuLambda mu_lambda(const Geometry& geo) {
  const int n = geo.dim();
  if (n < 2) throw Error("the special-Berwald fit needs n >= 2 (the angular metric vanishes for n = 1)");
  const Field& e = geo.mean_berwald();
  const Field& gi = geo.g_inv();
  Jet trace(0.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) trace += gi(j, k) * e(j, k);
  MuLambda out;
  out.lambda = (2.0 / ((n + 1) * (n - 1))) * trace;
  const Field& jm = geo.mean_landsberg();
  out.mu = Field(n, valence("l"));
  for (int j = 0; j < n; ++j) out.mu(j) = (-2.0 / (n + 1)) * jm(j) / geo.F2();
  out.mu.anchor(geo.point());
  return out;
}

Tensor<double> special_berwald_form(const Geometry& geo, const Eigen::VectorXd& mu, double lambda) {
  const int n = geo.dim();
  const Tensor<double> h = value(geo.h());
  const Tensor<double> hm = value(geo.h_mixed());
  const Eigen::VectorXd& y = geo.point().y;
  Tensor<double> out(n, valence("ulll"));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          out(i, j, k, l) = h_sym(mu, h, j, k, l) * y[i] +
                            lambda * (hm(i, j) * h(k, l) + hm(i, k) * h(j, l) + hm(i, l) * h(j, k));
  out.anchor(geo.point());
  return out;
}

SpecialBerwaldFit fit_special_berwald(const Geometry& geo) {
  const MuLambda ml = mu_lambda(geo);
  SpecialBerwaldFit fit;
  fit.mu = vector_value(ml.mu);
  fit.lambda = ml.lambda.value();
  fit.residual = rel_residual(value(geo.berwald()), special_berwald_form(geo, fit.mu, fit.lambda));
  return fit;
}

SpecialBerwaldFit fit_special_berwald(const Metric& metric, const EvalPoint& p) {
  return fit_special_berwald(Geometry(metric, p, 5));
}

GdwResult gdw_check(const Geometry& geo) {
  if (geo.order() < kBianchiOrder) throw Error("gdw_check needs an expansion of order 7");
  const int n = geo.dim();
  const Tensor<double> dp = value(geo.along_spray(geo.douglas()));
  const Tensor<double> hm = value(geo.h_mixed());
  const Eigen::VectorXd yl = vector_value(geo.y_lower());
  const Eigen::VectorXd& y = geo.point().y;
  const double f2 = geo.F2().value();

  Tensor<double> proj(n, valence("ulll"));
  GdwResult r;
  r.witness = Tensor<double>(n, valence("lll"));
  Tensor<double> rebuilt(n, valence("ulll"));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        double t = 0.0;
        for (int a = 0; a < n; ++a) t += yl[a] * dp(a, j, k, l);
        r.witness(j, k, l) = t / f2;
        for (int i = 0; i < n; ++i) {
          double s = 0.0;
          for (int a = 0; a < n; ++a) s += hm(i, a) * dp(a, j, k, l);
          proj(i, j, k, l) = s;
          rebuilt(i, j, k, l) = y[i] * t / f2;
        }
      }
  r.witness.anchor(geo.point());
  r.residual = rel_residual_zero(proj);
  r.witness_residual = rel_residual(dp, rebuilt);
  return r;
}

std::vector<Predicate> predicates(const Geometry& geo, double tol) {
  const std::pair<const char*, const Field*> items[] = {
      {"is_riemannian", &geo.cartan()},          {"is_riemannian_deicke", &geo.mean_cartan()},
      {"is_c_reducible", &geo.matsumoto()},      {"is_berwald", &geo.berwald()},
      {"is_weakly_berwald", &geo.mean_berwald()}, {"is_landsberg", &geo.landsberg()},
      {"is_weakly_landsberg", &geo.mean_landsberg()}, {"is_douglas", &geo.douglas()},
      {"is_stretch", &geo.stretch()},
  };
  std::vector<Predicate> out;
  for (const auto& [name, field] : items) {
    const double r = rel_residual_zero(value(*field));
    out.push_back({name, r, r < tol});
  }
  return out;
}

LandsbergRelations landsberg_relations(const Geometry& geo, const SpecialBerwaldFit& fit) {
  const int n = geo.dim();
  const Tensor<double> L = value(geo.landsberg());
  const Tensor<double> J = value(geo.mean_landsberg());
  const Tensor<double> h = value(geo.h());
  const double f2 = geo.F2().value();
  Tensor<double> lf(n, valence("lll")), jf(n, valence("l"));
  for (int j = 0; j < n; ++j) {
    jf(j) = -0.5 * (n + 1) * f2 * fit.mu[j];
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) lf(j, k, l) = -0.5 * f2 * h_sym(fit.mu, h, j, k, l);
  }
  return {rel_residual(L, lf), rel_residual(J, jf), rel_residual_zero(L), rel_residual_zero(J)};
}

Theorem3Report theorem3_check(const Metric& metric, const std::vector<EvalPoint>& samples, double tol) {
  Theorem3Report rep;
  std::vector<LandsbergRelations> rel;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    Geometry geo(metric, samples[s], 5);
    const SpecialBerwaldFit fit = fit_special_berwald(geo);
    if (!fit.special()) {
      rep.reason = "sample " + std::to_string(s) + " fails the special-Berwald fit (residual " + std::to_string(fit.residual) + ")";
      return rep;
    }
    rel.push_back(landsberg_relations(geo, fit));
  }
  rep.applicable = true;
  for (const auto& r : rel) {
    rep.landsberg_form = std::max(rep.landsberg_form, r.landsberg_form);
    rep.mean_landsberg_form = std::max(rep.mean_landsberg_form, r.mean_landsberg_form);
    if ((r.L_norm < tol) != (r.J_norm < tol)) ++rep.equivalence_violations;
  }
  return rep;
}

Isotropy flag_isotropy(const Metric& metric, const Eigen::VectorXd& x, unsigned long long seed, int flags) {
  const int n = metric.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto random_vector = [&] {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    return v;
  };
  std::vector<double> ks;
  int tries = 0;
  while (static_cast<int>(ks.size()) < flags) {
    if (++tries > 100 * flags) throw DegenerateError("could not draw non-degenerate flags");
    const Eigen::VectorXd y = random_vector();
    const Eigen::VectorXd u = random_vector();
    if (y.norm() < 1e-6) continue;
    try {
      ks.push_back(flag_curvature(Geometry(metric, {x, y}, 4), u));
    } catch (const DegenerateError&) {
    }
  }
  Isotropy iso;
  const auto [lo, hi] = std::minmax_element(ks.begin(), ks.end());
  double peak = 0.0, sum = 0.0;
  for (double k : ks) {
    peak = std::max(peak, std::abs(k));
    sum += k;
  }
  iso.K = sum / static_cast<double>(ks.size());
  iso.spread = (*hi - *lo) / (1.0 + peak);
  iso.isotropic = iso.spread < 1e-6;
  return iso;
}

Conditional theorem2_relation(const Geometry& geo, const Isotropy& iso) {
  if (!iso.isotropic) return Conditional::na("flag curvature is not isotropic at x");
  const MuLambda ml = mu_lambda(geo);
  const SpecialBerwaldFit fit = fit_special_berwald(geo);
  if (!fit.special()) return Conditional::na("special-Berwald fit fails");
  const int n = geo.dim();
  const Tensor<double> mu_prime = value(geo.along_spray(ml.mu));
  Tensor<double> rhs = value(geo.mean_cartan());
  rhs *= 2.0 * iso.K / (n + 1);
  return Conditional::ok(rel_residual(mu_prime, rhs));
}

Conditional lambda_prime_check(const Geometry& geo) {
  const SpecialBerwaldFit fit = fit_special_berwald(geo);
  if (!fit.special()) return Conditional::na("special-Berwald fit fails");
  const int n = geo.dim();
  const MuLambda ml = mu_lambda(geo);
  const double lambda_prime = scalar_value(geo.along_spray(geo.scalar(ml.lambda)));
  Tensor<double> lhs = value(geo.h_curvature());
  lhs *= 2.0;
  Tensor<double> rhs = value(geo.h());
  rhs *= (n + 1) * lambda_prime;
  return Conditional::ok(rel_residual(lhs, rhs));
}

Conditional stretch_mu_check(const Geometry& geo, double stretch_tol) {
  const SpecialBerwaldFit fit = fit_special_berwald(geo);
  if (!fit.special()) return Conditional::na("special-Berwald fit fails");
  if (rel_residual_zero(value(geo.stretch())) >= stretch_tol) return Conditional::na("stretch curvature does not vanish");
  return Conditional::ok(max_abs(value(geo.along_spray(mu_lambda(geo).mu))));
}

double isotropic_riemann_residual(const Geometry& geo, double K) {
  const int n = geo.dim();
  const Tensor<double> r = value(geo.hh_curvature());
  const Tensor<double> g = value(geo.g());
  Tensor<double> rhs(n, valence("ulll"));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) rhs(i, j, k, l) = K * (g(j, l) * (i == k) - g(j, k) * (i == l));
  return rel_residual(r, rhs);
}

double isotropic_berwald_residual(const Geometry& geo, double K) {
  const int n = geo.dim();
  const Tensor<double> lhs = value(geo.along_spray(geo.berwald()));
  const Tensor<double> c = value(geo.cartan());
  const Eigen::VectorXd& y = geo.point().y;
  Tensor<double> rhs(n, valence("ulll"));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < n; ++m)
        for (int l = 0; l < n; ++l) rhs(i, j, m, l) = 2.0 * K * c(j, m, l) * y[i];
  return rel_residual(lhs, rhs);
}

Conditional cartan_reducible_trace(const Geometry& geo) {
  const int n = geo.dim();
  if (n < 2) return Conditional::na("needs n >= 2");
  const Tensor<double> c = value(geo.cartan());
  const Tensor<double> h = value(geo.h());
  const int rows = n * n * n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, n);
  Eigen::VectorXd b(rows);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const int r = (i * n + j) * n + k;
        b[r] = c(i, j, k);
        a(r, i) += h(j, k);
        a(r, j) += h(i, k);
        a(r, k) += h(i, j);
      }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  Tensor<double> fitted(n, valence("lll"));
  fitted.data().assign(rows, 0.0);
  const Eigen::VectorXd recon = a * coef;
  for (int r = 0; r < rows; ++r) fitted[static_cast<std::size_t>(r)] = recon[r];
  if (rel_residual(c, fitted) >= 1e-8) return Conditional::na("Cartan torsion is not of reducible form");
  Tensor<double> rhs = from_vector(coef, Slot::lower);
  rhs *= static_cast<double>(n + 1);
  Tensor<double> in = value(geo.mean_cartan());
  rhs.anchor(in.point());
  return Conditional::ok(rel_residual(in, rhs));
}

double lambda_vertical_relation(const Geometry& geo) {
  const int n = geo.dim();
  const MuLambda ml = mu_lambda(geo);
  const Eigen::VectorXd yl = vector_value(geo.y_lower());
  const double f2 = geo.F2().value();
  Tensor<double> v(n, valence("l"));
  for (int l = 0; l < n; ++l) v(l) = ml.lambda.value() * yl[l] / f2 + ml.lambda.derivative(n + l).value();
  return rel_residual_zero(v);
}

} // namespace finsler
