#include <gtest/gtest.h>

#include "finsler/errors.hpp"
#include "finsler/geodesic.hpp"
#include "finsler/geometry.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace finsler;
using testing_support::rel;

namespace {

const std::vector<std::string> kRiemannian = {"euclidean", "conformal", "sphere"};

// Christoffel symbols of a_ij(x) from Richardson-extrapolated central differences.
struct Christoffel {
  const Metric& m;

  Eigen::MatrixXd da(const Eigen::VectorXd& x, int k) const {
    auto d = [&](double h) {
      Eigen::VectorXd p = x, q = x;
      p[k] += h;
      q[k] -= h;
      return Eigen::MatrixXd((m.a_matrix(p) - m.a_matrix(q)) / (2 * h));
    };
    const Eigen::MatrixXd d0 = d(1e-3), d1 = d(5e-4), d2 = d(2.5e-4);
    const Eigen::MatrixXd r0 = (4 * d1 - d0) / 3, r1 = (4 * d2 - d1) / 3;
    return (16 * r1 - r0) / 15;
  }

  // gamma[i](j, k) = Gamma^i_jk
  std::vector<Eigen::MatrixXd> at(const Eigen::VectorXd& x) const {
    const int n = m.dim();
    std::vector<Eigen::MatrixXd> d;
    for (int k = 0; k < n; ++k) d.push_back(da(x, k));
    const Eigen::MatrixXd ai = m.a_matrix(x).inverse();
    std::vector<Eigen::MatrixXd> gamma(n, Eigen::MatrixXd::Zero(n, n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) gamma[i](j, k) += 0.5 * ai(i, l) * (d[j](l, k) + d[k](l, j) - d[l](j, k));
    return gamma;
  }

  // Classical sectional curvature of span(u, v) at x.
  double sectional(const Eigen::VectorXd& x, const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    const int n = m.dim();
    const auto g0 = at(x);
    std::vector<std::vector<Eigen::MatrixXd>> dg(n); // dg[k][i] = d_k Gamma^i
    for (int k = 0; k < n; ++k) {
      auto d = [&](double h) {
        Eigen::VectorXd p = x, q = x;
        p[k] += h;
        q[k] -= h;
        const auto gp = at(p), gq = at(q);
        std::vector<Eigen::MatrixXd> out;
        for (int i = 0; i < n; ++i) out.push_back((gp[i] - gq[i]) / (2 * h));
        return out;
      };
      const auto d0 = d(1e-2), d1 = d(5e-3), d2 = d(2.5e-3);
      for (int i = 0; i < n; ++i) {
        const Eigen::MatrixXd r0 = (4 * d1[i] - d0[i]) / 3, r1 = (4 * d2[i] - d1[i]) / 3;
        dg[k].push_back((16 * r1 - r0) / 15);
      }
    }
    // R^i_jkl = d_k Gamma^i_lj - d_l Gamma^i_kj + Gamma^i_km Gamma^m_lj - Gamma^i_lm Gamma^m_kj
    auto R = [&](int i, int j, int k, int l) {
      double r = dg[k][i](l, j) - dg[l][i](k, j);
      for (int mm = 0; mm < n; ++mm) r += g0[i](k, mm) * g0[mm](l, j) - g0[i](l, mm) * g0[mm](k, j);
      return r;
    };
    const Eigen::MatrixXd a = m.a_matrix(x);
    double num = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            for (int q = 0; q < n; ++q) num += a(q, i) * R(i, j, k, l) * u[k] * v[l] * v[j] * u[q];
    const double den = u.dot(a * u) * v.dot(a * v) - std::pow(u.dot(a * v), 2);
    return num / den;
  }
};

// Berwald curvature from third y-differences of the finite-difference spray.
Tensor<double> berwald_oracle(const Metric& m, const EvalPoint& p) {
  const int n = m.dim();
  const auto G = oracle::spray_fn(m);
  const auto z = oracle::point(p);
  Tensor<double> b(n, valence("ulll"));
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k)
      for (int l = k; l < n; ++l) {
        const oracle::VecL d = oracle::derivative(G, z, oracle::alpha(n, {}, {j, k, l}), 2e-2L);
        for (int i = 0; i < n; ++i) {
          const int idx[3] = {j, k, l};
          int perm[3] = {0, 1, 2};
          do b(i, idx[perm[0]], idx[perm[1]], idx[perm[2]]) = static_cast<double>(d[i]);
          while (std::next_permutation(perm, perm + 3));
        }
      }
  return b;
}

// R^i_k from nested finite differences of the finite-difference spray.
Eigen::MatrixXd riemann_oracle(const Metric& m, const EvalPoint& p) {
  const int n = m.dim();
  const auto Gf = oracle::spray_fn(m);
  const auto z = oracle::point(p);
  const oracle::VecL G = Gf(z);
  auto d = [&](std::initializer_list<int> xs, std::initializer_list<int> ys) { return oracle::derivative(Gf, z, oracle::alpha(n, xs, ys)); };
  std::vector<oracle::VecL> gx, gy;
  for (int k = 0; k < n; ++k) {
    gx.push_back(d({k}, {}));
    gy.push_back(d({}, {k}));
  }
  Eigen::MatrixXd R(n, n);
  for (int k = 0; k < n; ++k) {
    std::vector<oracle::VecL> gxy, gyy;
    for (int j = 0; j < n; ++j) {
      gxy.push_back(d({j}, {k}));
      gyy.push_back(d({}, {j, k}));
    }
    for (int i = 0; i < n; ++i) {
      long double r = 2 * gx[k][i];
      for (int j = 0; j < n; ++j) r += -z[n + j] * gxy[j][i] + 2 * G[j] * gyy[j][i] - gy[j][i] * gy[k][j];
      R(i, k) = static_cast<double>(r);
    }
  }
  return R;
}

Eigen::VectorXd transverse(const EvalPoint& p, unsigned seed) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(p.dim());
  u[static_cast<int>(seed % p.dim())] = 1.0;
  u += 0.3 * Eigen::VectorXd::Ones(p.dim());
  if (std::abs(u.normalized().dot(p.y.normalized())) > 0.9) u[0] -= 2.0;
  return u;
}

} // namespace

TEST(Spray, EuclideanVanishes) {
  const Metric m(builtin_spec("euclidean", 3));
  for (const auto& p : testing_support::points(m, 5, 1)) EXPECT_EQ(max_abs(spray(m, p).G), 0.0);
}

TEST(Spray, RiemannianMatchesChristoffelSymbols) {
  for (const char* name : {"conformal", "sphere"}) {
    const Metric m(builtin_spec(name, 3));
    const Christoffel ch{m};
    for (const auto& p : testing_support::points(m, 10, 2)) {
      const auto gamma = ch.at(p.x);
      const SprayData sd = spray(m, p);
      for (int i = 0; i < 3; ++i) {
        EXPECT_LT(rel(sd.G(i), 0.5 * p.y.dot(gamma[i] * p.y)), 1e-9) << name;
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k) EXPECT_LT(rel(sd.Gamma(i, j, k), gamma[i](j, k)), 1e-9);
      }
    }
  }
}

TEST(Spray, MatchesFiniteDifferenceSprayForEveryBuiltin) {
  for (const auto& [name, n] : testing_support::builtins()) {
    const Metric m(builtin_spec(name, n));
    for (const auto& p : testing_support::points(m, 5, 3)) {
      const oracle::VecL G = oracle::spray(m, oracle::point(p));
      const SprayData sd = spray(m, p);
      for (int i = 0; i < n; ++i) EXPECT_LT(rel(sd.G(i), G[i]), 1e-6) << name;
      Tensor<double> twice = sd.G;
      twice *= 2.0;
      const Tensor<double> y = from_vector(p.y, Slot::upper);
      EXPECT_LT(rel_residual(apply(apply(sd.Gamma, 2, y), 1, y), twice), 1e-8);
    }
  }
}

TEST(Cartan, VanishesExactlyForRiemannian) {
  for (const auto& name : kRiemannian) {
    const Metric m(builtin_spec(name, 3));
    for (const auto& p : testing_support::points(m, 10, 4)) {
      const Geometry geo(m, p, 3);
      EXPECT_LT(max_abs(value(geo.cartan())), 1e-9) << name;
      EXPECT_LT(max_abs(value(geo.mean_cartan())), 1e-9) << name;
    }
  }
}

TEST(Cartan, RandersMatchesOracle) {
  const Metric m(builtin_spec("randers", 3));
  const auto f = oracle::f2(m);
  for (const auto& p : testing_support::points(m, 5, 5)) {
    const Tensor<double> c = value(Geometry(m, p, 3).cartan());
    const auto z = oracle::point(p);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) EXPECT_LT(rel(c(i, j, k), 0.25L * oracle::partial(f, z, oracle::alpha(3, {}, {i, j, k}))), 1e-6);
    EXPECT_LT(rel_residual_zero(apply(c, 0, from_vector(p.y, Slot::upper))), 1e-12);
  }
}

TEST(Matsumoto, RiemannianAndRandersVanish) {
  for (const char* name : {"conformal", "randers", "randers-closed", "randers-twisted", "funk"}) {
    const Metric m(builtin_spec(name, 3));
    for (const auto& p : testing_support::points(m, 10, 6)) {
      const Geometry geo(m, p, 3);
      const double c = max_abs(value(geo.cartan()));
      EXPECT_LT(max_abs(value(geo.matsumoto())) / std::max(1.0, c), 1e-8) << name;
    }
  }
}

TEST(Matsumoto, QuarticMetricIsNotCReducible) {
  MetricSpec s;
  s.name = "quartic";
  s.kind = MetricKind::custom;
  s.dimension = 3;
  s.F = "sqrt(sqrt(y1^4 + y2^4 + y3^4))";
  const Metric m(s);
  for (const auto& p : testing_support::points(m, 5, 7)) {
    const Tensor<double> M = value(Geometry(m, p, 3).matsumoto());
    // The quartic indicatrix is far from an ellipsoid shifted off-centre.
    EXPECT_GT(max_abs(M) * p.y.norm(), 1e-2);
    EXPECT_LT(rel_residual(M, sym(M, {0, 1, 2})), 1e-13);
    EXPECT_LT(rel_residual_zero(apply(M, 0, from_vector(p.y, Slot::upper))), 1e-12);
  }
}

TEST(Berwald, RiemannianVanishes) {
  for (const auto& name : kRiemannian) {
    const Metric m(builtin_spec(name, 3));
    for (const auto& p : testing_support::points(m, 5, 8)) EXPECT_LT(max_abs(value(Geometry(m, p, 5).berwald())), 1e-9);
  }
}

TEST(Berwald, FunkClosedForm) {
  for (int n : {2, 3}) {
    const Metric m(builtin_spec("funk", n));
    for (const auto& p : testing_support::points(m, 20, 9)) {
      const Geometry geo(m, p, 5);
      const Tensor<double> b = value(geo.berwald()), hm = value(geo.h_mixed()), h = value(geo.h()), c = value(geo.cartan());
      const double F = std::sqrt(geo.F2().value());
      Tensor<double> expect(n, valence("ulll"));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
              expect(i, j, k, l) = (hm(i, j) * h(k, l) + hm(i, k) * h(j, l) + hm(i, l) * h(j, k) + 2 * c(j, k, l) * p.y[i]) / (2 * F);
      EXPECT_LT(rel_residual(b, expect), 1e-6);
    }
  }
}

TEST(Berwald, MatchesFiniteDifferenceOracle) {
  for (const char* name : {"randers", "funk"}) {
    const Metric m(builtin_spec(name, 3));
    for (const auto& p : testing_support::points(m, 3, 10)) {
      const Geometry geo(m, p, 5);
      const Tensor<double> b = value(geo.berwald());
      const Tensor<double> bo = berwald_oracle(m, p);
      // Third differences of a differenced spray bottom out around 1e-5.
      EXPECT_LT(rel_residual(b, bo), 5e-5) << name;
      Tensor<double> eo = contract(bo, 0, 3);
      eo *= 0.5;
      EXPECT_LT(rel_residual(value(geo.mean_berwald()), eo), 5e-5) << name;
      EXPECT_LT(rel_residual_zero(apply(value(geo.mean_berwald()), 0, from_vector(p.y, Slot::upper))), 1e-10);
    }
  }
}

TEST(Douglas, RiemannianAndClosedRandersVanish) {
  for (const char* name : {"conformal", "sphere", "randers-closed"}) {
    const Metric m(builtin_spec(name, 3));
    for (const auto& p : testing_support::points(m, 10, 11)) EXPECT_LT(rel_residual_zero(value(Geometry(m, p, 6).douglas())), 1e-10) << name;
  }
}

TEST(Douglas, TraceFreeAndFunkIsProjectivelyFlat) {
  for (const auto& [name, n] : testing_support::builtins()) {
    const Metric m(builtin_spec(name, n));
    for (const auto& p : testing_support::points(m, 5, 12)) {
      const Tensor<double> d = value(Geometry(m, p, 6).douglas());
      double worst = 0.0;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double trace = 0.0;
            for (int mm = 0; mm < n; ++mm) trace += d(mm, j, k, mm);
            worst = std::max(worst, std::abs(trace));
          }
      EXPECT_LT(worst / (1 + max_abs(d)), 1e-8) << name;
      // Funk has G^i = F y^i / 2, so D vanishes identically.
      if (name == "funk") {
        EXPECT_LT(rel_residual_zero(d), 1e-10);
      }
    }
  }
  const Metric r(builtin_spec("randers", 3));
  EXPECT_GT(max_abs(value(Geometry(r, testing_support::points(r, 1, 1)[0], 6).douglas())), 1e-3);
}

TEST(Horizontal, FIsParallelAlongTheSpray) {
  for (const auto& [name, n] : testing_support::builtins()) {
    const Metric m(builtin_spec(name, n));
    for (const auto& p : testing_support::points(m, 5, 14)) {
      const Geometry geo(m, p, 4);
      EXPECT_LT(std::abs(geo.along_spray(geo.scalar(geo.F()))[0].value()), 1e-10) << name;
    }
    // Oracle: F is constant along integrated geodesics.
    const auto p = testing_support::points(m, 1, 15)[0];
    EXPECT_LT(geodesic(m, p.x, 0.3 * p.y, 0.5, 500).F_drift(), 1e-9) << name;
  }
}

TEST(Horizontal, ScalarRuleHasNoConnectionTerms) {
  const Metric m(builtin_spec("randers-twisted", 3));
  for (const auto& p : testing_support::points(m, 5, 16)) {
    const Geometry geo(m, p, 4);
    const auto v = lift_all(p, 4);
    const Jet lambda = v[0] * v[4] / geo.F() + v[1] * v[1];
    const double lhs = geo.along_spray(geo.scalar(lambda))[0].value();
    const Tensor<double> G = value(geo.spray());
    double rhs = 0.0;
    for (int mm = 0; mm < 3; ++mm) rhs += p.y[mm] * lambda.derivative(mm).value() - 2 * G(mm) * lambda.derivative(3 + mm).value();
    EXPECT_LT(rel(lhs, rhs), 1e-13);
  }
}

TEST(Landsberg, TwoRoutesAgreeForEveryBuiltin) {
  for (const auto& [name, n] : testing_support::builtins()) {
    const Metric m(builtin_spec(name, n));
    for (const auto& p : testing_support::points(m, 10, 17)) {
      const Geometry geo(m, p, 6);
      const Tensor<double> L = value(geo.landsberg());
      EXPECT_LT(rel_residual(value(geo.landsberg_from_berwald()), L), 1e-6) << name;
      EXPECT_LT(rel_residual(L, sym(L, {0, 1, 2})), 1e-10);
      EXPECT_LT(rel_residual_zero(apply(L, 0, from_vector(p.y, Slot::upper))), 1e-10);
      if (name == "euclidean" || name == "conformal" || name == "sphere") {
        EXPECT_LT(max_abs(L), 1e-9);
      }
    }
  }
}

TEST(FlagCurvature, EuclideanIsFlat) {
  const Metric m(builtin_spec("euclidean", 3));
  for (const auto& p : testing_support::points(m, 5, 18)) {
    const Geometry geo(m, p, 4);
    EXPECT_EQ(max_abs(value(geo.riemann())), 0.0);
    EXPECT_EQ(flag_curvature(geo, transverse(p, 1)), 0.0);
  }
}

TEST(FlagCurvature, RiemannianMatchesClassicalSectionalCurvature) {
  for (const char* name : {"sphere", "conformal"}) {
    const Metric m(builtin_spec(name, 3));
    const Christoffel ch{m};
    unsigned s = 0;
    for (const auto& p : testing_support::points(m, 10, 19)) {
      const Eigen::VectorXd u = transverse(p, s++);
      const double K = flag_curvature(m, p, u);
      EXPECT_LT(rel(K, ch.sectional(p.x, p.y, u)), 1e-6) << name;
      if (std::string(name) == "sphere") {
        EXPECT_NEAR(K, 1.0, 1e-10);
      }
    }
  }
}

TEST(FlagCurvature, FunkIsConstantMinusQuarter) {
  const Metric m(builtin_spec("funk", 3));
  for (const auto& p : testing_support::points(m, 10, 20)) {
    const Geometry geo(m, p, 4);
    for (unsigned s = 0; s < 4; ++s) EXPECT_NEAR(flag_curvature(geo, transverse(p, s)), -0.25, 1e-6);
  }
}

TEST(FlagCurvature, RiemannCurvatureMatchesNestedOracle) {
  for (const char* name : {"funk", "randers"}) {
    const Metric m(builtin_spec(name, 3));
    for (const auto& p : testing_support::points(m, 3, 21)) {
      const Eigen::MatrixXd R = to_matrix(value(Geometry(m, p, 4).riemann()));
      const Eigen::MatrixXd Ro = riemann_oracle(m, p);
      EXPECT_LT((R - Ro).cwiseAbs().maxCoeff() / (1 + R.cwiseAbs().maxCoeff()), 1e-5) << name;
    }
  }
}

TEST(FlagCurvature, DegenerateFlagsAreRejected) {
  const Metric m(builtin_spec("randers", 3));
  const auto p = testing_support::points(m, 1, 22)[0];
  const Geometry geo(m, p, 4);
  EXPECT_THROW(flag_curvature(geo, 2.0 * p.y), DegenerateError);
  EXPECT_THROW(flag_curvature(geo, p.y + 1e-9 * Eigen::VectorXd::Ones(3)), DegenerateError);
  EXPECT_THROW(flag_curvature(geo, Eigen::VectorXd::Ones(2)), Error);
}

TEST(HCurvature, TwoRoutesSymmetryAndAnnihilation) {
  for (const auto& [name, n] : testing_support::builtins()) {
    const Metric m(builtin_spec(name, n));
    for (const auto& p : testing_support::points(m, 5, 23)) {
      const Geometry geo(m, p, 6);
      const Tensor<double> H = value(geo.h_curvature());
      EXPECT_LT(rel_residual(H, geo.h_curvature_explicit()), 1e-6) << name;
      EXPECT_LT(rel_residual(H, permute(H, {1, 0})), 1e-8);
      EXPECT_LT(rel_residual_zero(apply(H, 0, from_vector(p.y, Slot::upper))), 1e-8);
      if (name == "conformal" || name == "sphere" || name == "funk") {
        EXPECT_LT(max_abs(H), 1e-9) << name;
      }
    }
  }
}

TEST(Stretch, AntisymmetryAndNullCases) {
  for (const auto& [name, n] : testing_support::builtins()) {
    const Metric m(builtin_spec(name, n));
    for (const auto& p : testing_support::points(m, 5, 24)) {
      const Geometry geo(m, p, 6);
      const Tensor<double> s = value(geo.stretch());
      EXPECT_LT(max_abs(s + permute(s, {0, 1, 3, 2})), 1e-14 * (1 + max_abs(s)));
      EXPECT_LT(rel_residual_zero(apply(s, 0, from_vector(p.y, Slot::upper))), 1e-8) << name;
      if (name == "conformal" || name == "sphere") {
        EXPECT_LT(max_abs(s), 1e-9);
      }
    }
  }
}

TEST(Bianchi, SecondAndThirdIdentitiesForEveryBuiltin) {
  for (const auto& [name, n] : testing_support::builtins()) {
    const Metric m(builtin_spec(name, n));
    for (const auto& p : testing_support::points(m, 5, 25)) {
      const BianchiResiduals r = bianchi_residuals(Geometry(m, p, kBianchiOrder));
      EXPECT_LT(r.second, 1e-5) << name;
      EXPECT_LT(r.third, 1e-8) << name;
      EXPECT_LT(r.first_full, 1e-5) << name;
    }
  }
}

TEST(Bianchi, FirstIdentityWithoutConnectionTermsWhereTheyCancel) {
  for (const auto& [name, n] : testing_support::builtins()) {
    if (name.rfind("randers", 0) == 0 && name != "randers-closed" && n > 2) continue;
    const Metric m(builtin_spec(name, n));
    for (const auto& p : testing_support::points(m, 5, 26)) EXPECT_LT(bianchi_residuals(Geometry(m, p, kBianchiOrder)).first, 1e-5) << name;
  }
}

TEST(Bianchi, GenericRandersNeedsTheConnectionTerms) {
  // The cyclic sum alone leaves B^i_jkp R^p_lm (cyclic) behind for a non-closed Randers metric.
  const Metric m(builtin_spec("randers", 3));
  for (const auto& p : testing_support::points(m, 5, 27)) {
    const BianchiResiduals r = bianchi_residuals(Geometry(m, p, kBianchiOrder));
    EXPECT_GT(r.first, 1e-5);
    EXPECT_LT(r.first_full, 1e-12);
  }
  EXPECT_THROW(bianchi_residuals(Geometry(m, testing_support::points(m, 1, 1)[0], 6)), Error);
}

TEST(IsotropicCurvature, RiemannAndBerwaldForms) {
  for (const auto& [name, K] : std::vector<std::pair<std::string, double>>{{"sphere", 1.0}, {"funk", -0.25}, {"euclidean", 0.0}}) {
    const Metric m(builtin_spec(name, 3));
    for (const auto& p : testing_support::points(m, 5, 28)) {
      const Geometry geo(m, p, 6);
      const Tensor<double> R = value(geo.hh_curvature()), g = value(geo.g());
      Tensor<double> expect(3, valence("ulll"));
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) expect(i, j, k, l) = K * (g(j, l) * (i == k) - g(j, k) * (i == l));
      EXPECT_LT(rel_residual(R, expect), 1e-5) << name;
      // B^i_jml|k y^k = 2K C_jml y^i
      const Tensor<double> lhs = value(geo.along_spray(geo.berwald())), c = value(geo.cartan());
      Tensor<double> rhs(3, valence("ulll"));
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) rhs(i, j, k, l) = 2 * K * c(j, k, l) * p.y[i];
      EXPECT_LT(rel_residual(lhs, rhs), 1e-5) << name;
    }
  }
}

TEST(Geometry, OrderAndDomainErrors) {
  const Metric m(builtin_spec("funk", 2));
  EXPECT_THROW(Geometry(m, {Eigen::Vector2d(0.99, 0.2), Eigen::Vector2d(1, 0)}, 4), DomainError);
  EXPECT_THROW(Geometry(m, {Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(0, 0)}, 4), DomainError);
  const Geometry low(m, {Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(1, 0)}, 3);
  EXPECT_NO_THROW(low.cartan());
  EXPECT_THROW(low.berwald(), Error); // B needs five derivatives
}
