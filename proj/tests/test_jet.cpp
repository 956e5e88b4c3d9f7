#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"
#include "finsler/metric.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace finsler;
using testing_support::rel;

namespace {

EvalPoint pt(std::vector<double> x, std::vector<double> y) {
  return {Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())),
          Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()))};
}

MultiIndex idx(std::vector<int> e) { return MultiIndex(std::move(e)); }

// Random polynomial in the jet variables: sums of products of powers.
Jet random_polynomial(const std::vector<Jet>& v, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> var(0, static_cast<int>(v.size()) - 1), deg(1, 3), terms(1, 4);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  Jet acc(coef(rng));
  for (int t = terms(rng); t > 0; --t) {
    Jet term(coef(rng));
    for (int f = deg(rng); f > 0; --f) term = term * v[static_cast<std::size_t>(var(rng))];
    acc += term;
  }
  return acc;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

} // namespace

TEST(Jet, LiftIsCoordinateFunction) {
  const EvalPoint p = pt({0, 0}, {1, 2});
  const Jet j = lift(p, 2, 2);
  EXPECT_EQ(j.value(), 1.0);
  EXPECT_EQ(j.coefficient(idx({0, 0, 1, 0})), 1.0);
  EXPECT_EQ(j.coefficient(idx({1, 0, 0, 0})), 0.0);
  EXPECT_EQ(j.coefficient(idx({0, 0, 2, 0})), 0.0);
  EXPECT_EQ(j.coefficient(idx({0, 0, 0, 1})), 0.0);
}

TEST(Jet, LiftRejectsOutOfRangeIndex) {
  const EvalPoint p = pt({0, 0}, {1, 2});
  EXPECT_THROW(lift(p, 5, 2), std::out_of_range);
  EXPECT_THROW(lift(p, -1, 2), std::out_of_range);
}

TEST(Jet, SquareOfCoordinate) {
  const EvalPoint p = pt({0, 0}, {3, 0});
  const Jet y1 = lift(p, 2, 3);
  const Jet s = y1 * y1;
  EXPECT_EQ(s.value(), 9.0);
  EXPECT_EQ(s.coefficient(idx({0, 0, 1, 0})), 6.0);
  EXPECT_EQ(s.coefficient(idx({0, 0, 2, 0})), 1.0);
  EXPECT_EQ(s.coefficient(idx({0, 0, 3, 0})), 0.0);
}

TEST(Jet, PartialOfSumOfSquares) {
  ScalarField f = [](std::span<const Jet> v) { return v[2] * v[2] + v[3] * v[3]; };
  for (auto p : {pt({0.3, -1}, {1, 2}), pt({5, 5}, {-0.1, 0.7})}) EXPECT_DOUBLE_EQ(partial(f, p, idx({0, 0, 2, 0})), 2.0);
}

TEST(Jet, FunkSquareAtOriginIsEuclidean) {
  const Metric funk(builtin_spec("funk", 2));
  const EvalPoint p = pt({0, 0}, {1, 1});
  EXPECT_NEAR(partial(funk.F2_field(), p, idx({0, 0, 1, 1})), 0.0, 1e-14);
  EXPECT_NEAR(partial(funk.F2_field(), p, idx({0, 0, 2, 0})), 2.0, 1e-14);
}

TEST(Jet, RandersFourthOrderMixedMatchesOracle) {
  const Metric m(builtin_spec("randers", 3));
  const auto f = oracle::f2(m);
  for (const auto& p : testing_support::points(m, 5, 11)) {
    const auto z = oracle::point(p);
    for (auto a : {std::vector<int>{1, 0, 0, 1, 1, 1}, std::vector<int>{0, 1, 0, 2, 0, 1}, std::vector<int>{2, 0, 0, 0, 2, 0},
                   std::vector<int>{0, 0, 0, 1, 1, 2}}) {
      const double jet = partial(m.F2_field(), p, idx(a));
      EXPECT_LT(rel(jet, oracle::partial(f, z, a)), 1e-5);
    }
  }
}

TEST(Jet, DomainErrorsAreStructured) {
  const EvalPoint p = pt({0}, {0});
  const Jet x = lift(p, 0, 2);
  EXPECT_THROW(Jet(1.0) / x, DomainError);
  EXPECT_THROW(sqrt(x), DomainError);
  EXPECT_THROW(sqrt(x - 1.0), DomainError);
  EXPECT_NO_THROW(sqrt(x + 1.0));
}

TEST(Jet, DifferentiationLowersOrder) {
  const EvalPoint p = pt({0.5}, {1});
  const Jet x = lift(p, 0, 2);
  const Jet c = x * x * x;
  EXPECT_EQ(c.order(), 2);
  const Jet d = c.derivative(0);
  EXPECT_EQ(d.order(), 1);
  EXPECT_DOUBLE_EQ(d.value(), 3 * 0.25);
  EXPECT_DOUBLE_EQ(d.derivative(0).value(), 6 * 0.5);
  EXPECT_THROW(d.derivative(0).derivative(0), Error);
}

TEST(Jet, ProductTruncatesToSmallerOrder) {
  const EvalPoint p = pt({0.5}, {1});
  const Jet a = lift(p, 0, 4);
  const Jet b = a.derivative(0) * a + a * a * a;
  EXPECT_EQ(b.order(), 3);
}

TEST(Jet, SqrtAndDivisionSeriesAreExact) {
  // sqrt(1 + t) and 1/(1 - t) about t = 0.
  const EvalPoint p = pt({0}, {1});
  const Jet t = lift(p, 0, 6);
  const Jet s = sqrt(1.0 + t);
  const Jet g = 1.0 / (1.0 - t);
  double c = 1.0; // binomial(1/2, k)
  for (int k = 0; k <= 6; ++k) {
    EXPECT_NEAR(s.coefficient(idx({k, 0})), c, 1e-15);
    EXPECT_NEAR(g.coefficient(idx({k, 0})), 1.0, 1e-15);
    c *= (0.5 - k) / (k + 1);
  }
}

TEST(Jet, NegativePowerIsReciprocal) {
  const EvalPoint p = pt({0.7, -0.2}, {1.1, 0.4});
  const auto v = lift_all(p, 4);
  const Jet a = v[0] * v[2] + 2.0;
  const Jet lhs = pow(a, -2);
  const Jet rhs = 1.0 / (a * a);
  for (std::size_t k = 0; k < lhs.coefficients().size(); ++k) EXPECT_NEAR(lhs.coefficients()[k], rhs.coefficients()[k], 1e-14);
}

TEST(JetProperty, MultiIndexOrderDoesNotMatter) {
  const Metric m(builtin_spec("randers-twisted", 2));
  for (const auto& p : testing_support::points(m, 5, 5)) {
    const Jet f2 = m.F2_jet(p, 4);
    const double direct = f2.partial(idx({1, 0, 2, 1}));
    const double a = f2.derivative(0).derivative(2).derivative(3).derivative(2).value();
    const double b = f2.derivative(2).derivative(2).derivative(3).derivative(0).value();
    EXPECT_NEAR(direct, a, 1e-12 * (1 + std::abs(direct)));
    EXPECT_NEAR(direct, b, 1e-12 * (1 + std::abs(direct)));
  }
}

TEST(JetProperty, LeibnizRuleOnRandomPolynomials) {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(0, 2);
  for (int trial = 0; trial < 50; ++trial) {
    const EvalPoint p = pt({coord(rng), coord(rng)}, {coord(rng), coord(rng)});
    const auto v = lift_all(p, 6);
    const Jet f = random_polynomial(v, rng), g = random_polynomial(v, rng);
    const Jet fg = f * g;
    std::vector<int> a(4);
    for (int& e : a) e = expo(rng);
    if (std::accumulate(a.begin(), a.end(), 0) > 6) continue;
    // sum over beta <= alpha of prod binom(alpha_i, beta_i) d^beta f d^(alpha-beta) g
    double sum = 0.0;
    for (int b0 = 0; b0 <= a[0]; ++b0)
      for (int b1 = 0; b1 <= a[1]; ++b1)
        for (int b2 = 0; b2 <= a[2]; ++b2)
          for (int b3 = 0; b3 <= a[3]; ++b3) {
            const double w = binomial(a[0], b0) * binomial(a[1], b1) * binomial(a[2], b2) * binomial(a[3], b3);
            sum += w * f.partial(idx({b0, b1, b2, b3})) * g.partial(idx({a[0] - b0, a[1] - b1, a[2] - b2, a[3] - b3}));
          }
    EXPECT_LT(rel(fg.partial(idx(a)), sum), 1e-12);
  }
}

TEST(JetOracle, EveryBuiltinMatchesFiniteDifferencesToOrderFour) {
  for (const auto& [name, n] : testing_support::builtins()) {
    const Metric m(builtin_spec(name, n));
    const auto f = oracle::f2(m);
    std::mt19937_64 rng(99);
    for (const auto& p : testing_support::points(m, 4, 17)) {
      const Jet j = m.F2_jet(p, 4);
      const auto z = oracle::point(p);
      for (int draw = 0; draw < 6; ++draw) {
        std::vector<int> a(static_cast<std::size_t>(2 * n), 0);
        const int order = 1 + draw % 4;
        std::uniform_int_distribution<int> var(0, 2 * n - 1);
        for (int k = 0; k < order; ++k) ++a[static_cast<std::size_t>(var(rng))];
        EXPECT_LT(rel(j.partial(idx(a)), oracle::partial(f, z, a)), 1e-5) << name << " n=" << n;
      }
    }
  }
}
