#include "lindstedt/fourier.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "lindstedt/errors.hpp"
#include "test_util.hpp"

namespace lindstedt {
namespace {

using testing::C;
using testing::Poly;
using testing::constant;
using testing::cos_theta;
using testing::max_coeff_diff;
using testing::random_real;
using testing::sin_theta;

TEST(LinearCombine, CancellationGivesZero) {
  auto p = sin_theta() + cos_theta(2);
  auto z = linear_combine<double>({{1.0, p}, {-1.0, p}});
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(z.degree(), 2);
}

TEST(LinearCombine, ScalingDoublesMode) {
  auto e = Poly::single_mode(1, Mode{1}, {C(1, 0)});
  auto d = linear_combine<double>({{2.0, e}});
  EXPECT_EQ(d.coeff(Mode{1}, 0), C(2, 0));
  EXPECT_FALSE(d.is_real());
}

TEST(LinearCombine, SinPlusCosByHand) {
  auto s = sin_theta() + cos_theta();
  // sin + cos: l=1 -> 1/2 - i/2, l=-1 -> 1/2 + i/2
  EXPECT_EQ(s.coeff(Mode{1}, 0), C(0.5, -0.5));
  EXPECT_EQ(s.coeff(Mode{-1}, 0), C(0.5, 0.5));
  EXPECT_TRUE(s.is_real());
}

TEST(LinearCombine, ComplexScalarDropsRealFlag) {
  auto p = linear_combine<double>({{C(0, 1), sin_theta()}});
  EXPECT_FALSE(p.is_real());
}

TEST(LinearCombine, ShapeMismatchThrows) {
  Poly a(1, 1), b(1, 2);
  EXPECT_THROW(a + b, DimensionMismatch);
}

TEST(TrigPoly, RejectsModeAboveDegree) {
  Poly::Terms t;
  t[Mode{3}] = {C(1, 0)};
  EXPECT_THROW(Poly(1, 1, 2, t, false), DimensionMismatch);
}

TEST(TrigPoly, RealFlagEnforcesConjugateSymmetry) {
  Poly::Terms t;
  t[Mode{1}] = {C(1, 2)};
  Poly p(1, 1, 1, t, true);
  EXPECT_EQ(p.coeff(Mode{-1}, 0), std::conj(p.coeff(Mode{1}, 0)));
  EXPECT_EQ(reality_defect(p), 0.0);
}

TEST(TrigPoly, AbsentModeIsZero) {
  EXPECT_EQ(sin_theta().coeff(Mode{5}, 0), C(0, 0));
}

TEST(Convolve, InverseModesGiveOne) {
  auto a = Poly::single_mode(1, Mode{1}, {C(1, 0)});
  auto b = Poly::single_mode(1, Mode{-1}, {C(1, 0)});
  auto p = convolve_product(a, b);
  EXPECT_EQ(p.size(), 1u);
  EXPECT_EQ(p.coeff(Mode{0}, 0), C(1, 0));
}

TEST(Convolve, SinSquaredByProductToSum) {
  auto p = convolve_product(sin_theta(), sin_theta());
  EXPECT_NEAR(std::abs(p.coeff(Mode{0}, 0) - C(0.5, 0)), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(p.coeff(Mode{2}, 0) - C(-0.25, 0)), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(p.coeff(Mode{-2}, 0) - C(-0.25, 0)), 0.0, 1e-16);
  EXPECT_EQ(p.size(), 3u);
  EXPECT_TRUE(p.is_real());
}

TEST(Convolve, ZeroAnnihilates) {
  EXPECT_TRUE(convolve_product(Poly(1, 1), sin_theta()).is_zero());
}

TEST(Convolve, PointwiseProductOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    auto p = random_real(rng, 1, 1, 8);
    auto q = random_real(rng, 1, 1, 8);
    auto pq = convolve_product(p, q);
    EXPECT_LE(pq.degree(), p.degree() + q.degree());
    for (const auto& pt : testing::uniform_grid_1d(37)) {
      std::span<const double> s(pt);
      auto lhs = evaluate(pq, s)[0];
      auto rhs = evaluate(p, s)[0] * evaluate(q, s)[0];
      EXPECT_LE(std::abs(lhs - rhs), 1e-13 * (1 + std::abs(rhs)));
      EXPECT_LE(std::abs(lhs.imag()), 1e-12 * (1 + std::abs(lhs)));
    }
  }
}

TEST(Convolve, DenseAndSparsePathsAgree) {
  // Full fill takes the dense path; removing most modes takes the sparse one.
  std::mt19937_64 rng(5);
  auto p = random_real(rng, 2, 1, 6);
  auto q = random_real(rng, 2, 2, 6);
  auto dense = convolve_product(p, q);
  Poly::Terms sparse_terms;
  for (std::size_t i = 0; i < p.size(); i += 3) {
    auto c = p.coeff_at(i);
    sparse_terms[p.modes()[i]] = Poly::Coeff(c.begin(), c.end());
  }
  Poly ps(2, 1, 6, sparse_terms, false);
  auto sparse = convolve_product(ps, q);
  for (const auto& pt : std::vector<std::vector<double>>{{0.3, 1.1}, {2.0, -0.7}}) {
    std::span<const double> s(pt);
    auto want = evaluate(ps, s)[0];
    auto got = evaluate(sparse, s);
    auto qv = evaluate(q, s);
    for (int d = 0; d < 2; ++d) {
      EXPECT_LE(std::abs(got[d] - want * qv[d]), 1e-11 * (1 + std::abs(got[d])));
    }
    auto gd = evaluate(dense, s);
    auto pv = evaluate(p, s)[0];
    for (int d = 0; d < 2; ++d) {
      EXPECT_LE(std::abs(gd[d] - pv * qv[d]), 1e-11 * (1 + std::abs(gd[d])));
    }
  }
}

TEST(Shift, ZeroIsIdentity) {
  std::mt19937_64 rng(1);
  auto p = random_real(rng, 1, 2, 5);
  std::vector<double> zero{0.0};
  EXPECT_EQ(max_coeff_diff(shift(p, std::span<const double>(zero)), p), 0.0);
}

TEST(Shift, HalfPeriodFlipsSign) {
  auto e = Poly::single_mode(1, Mode{1}, {C(1, 0)});
  std::vector<double> d{M_PI};
  auto s = shift(e, std::span<const double>(d));
  EXPECT_NEAR(std::abs(s.coeff(Mode{1}, 0) - C(-1, 0)), 0.0, 1e-15);
}

TEST(Shift, MatchesGridEvaluation) {
  const double w = M_PI * (std::sqrt(5.0) - 1);
  std::vector<double> d{w};
  auto s = shift(sin_theta(), std::span<const double>(d));
  for (const auto& pt : testing::uniform_grid_1d(50)) {
    auto v = evaluate(s, std::span<const double>(pt))[0];
    EXPECT_NEAR(v.real(), std::sin(pt[0] + w), 1e-14);
  }
}

TEST(Derivative, ConstantToZero) {
  EXPECT_TRUE(derivative(constant(3.0), 0).is_zero());
}

TEST(Derivative, SinToCos) {
  EXPECT_LE(max_coeff_diff(derivative(sin_theta(), 0), cos_theta()), 1e-16);
}

TEST(Derivative, SecondDerivativeOfCos) {
  auto dd = derivative(derivative(cos_theta(), 0), 0);
  EXPECT_LE(max_coeff_diff(dd, -1.0 * cos_theta()), 1e-16);
}

TEST(Average, Examples) {
  EXPECT_EQ(average(sin_theta())[0], C(0, 0));
  EXPECT_EQ(average(constant(1.0) + cos_theta())[0], C(1, 0));
  EXPECT_NEAR(average(convolve_product(sin_theta(), sin_theta()))[0].real(),
              0.5, 1e-16);
}

TEST(Norm, SingleModeClosedForm) {
  auto e = Poly::single_mode(1, Mode{1}, {C(1, 0)});
  EXPECT_NEAR(norm(e, NormParams<double>(1.0, 1.0)),
              std::sqrt(std::exp(2.0) * 2.0), 1e-14);
}

TEST(Norm, ConstantIgnoresWeights) {
  auto c = Poly::constant(2, {C(3, 0), C(0, 4)}, false);
  EXPECT_DOUBLE_EQ(norm(c, NormParams<double>(2.5, 3.0)), 5.0);
}

TEST(Norm, ProjectionDoesNotIncrease) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_real(rng, 2, 2, 6);
    Poly avg = Poly::constant(2, average(p), true);
    NormParams<double> np(0.5, 1.5);
    EXPECT_LE(norm(p - avg, np), norm(p, np));
  }
}

TEST(Norm, OverflowIsReported) {
  auto e = Poly::single_mode(1, Mode{400}, {C(1, 0)});
  EXPECT_THROW(norm(e, NormParams<double>(1.0, 0.0)), NormOverflow);
}

TEST(Norm, NegativeParamsRejected) {
  EXPECT_THROW(NormParams<double>(-1.0, 0.0), std::invalid_argument);
}

// C^2 = sup_l sum_m w(l) / (w(m) w(l-m)) with w(l) = (1+l^2)^r; the
// exponential part only helps by the triangle inequality.
double banach_constant_1d(double r, int cutoff) {
  double sup = 0;
  for (int l = -cutoff / 4; l <= cutoff / 4; ++l) {
    double s = 0;
    for (int m = -cutoff; m <= cutoff; ++m) {
      s += std::pow(1.0 + l * l, r) /
           (std::pow(1.0 + m * m, r) * std::pow(1.0 + (l - m) * (l - m), r));
    }
    sup = std::max(sup, s);
  }
  return std::sqrt(sup);
}

TEST(Norm, BanachAlgebraConstant) {
  const double r = 1.0;
  const double c = banach_constant_1d(r, 4000) * (1 + 1e-3);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    auto p = random_real(rng, 1, 1, 10);
    auto q = random_real(rng, 1, 1, 10);
    NormParams<double> np(0.7, r);
    EXPECT_LE(norm(convolve_product(p, q), np), c * norm(p, np) * norm(q, np));
  }
}

TEST(Evaluate, Examples) {
  std::vector<double> pt{1.234};
  EXPECT_EQ(evaluate(constant(1.0), std::span<const double>(pt))[0], C(1, 0));
  std::vector<double> half{M_PI / 2};
  auto e = Poly::single_mode(1, Mode{1}, {C(1, 0)});
  auto v = evaluate(e, std::span<const double>(half))[0];
  EXPECT_NEAR(std::abs(v - C(0, 1)), 0.0, 1e-15);
}

TEST(RestrictToLine, PicksUpPhase) {
  // cos q1 + cos q2 on the line q = (t, pi): cos t - 1.
  auto V = Potential<double>::from_amplitudes(
      2, {{Mode{1, 0}, 1.0, 0.0}, {Mode{0, 1}, 1.0, 0.0}});
  std::vector<double> off{0.0, M_PI};
  auto line = restrict_to_line(V.values(), Mode{1, 0}, std::span<const double>(off));
  EXPECT_EQ(line.domain_dim(), 1);
  EXPECT_NEAR(line.coeff(Mode{0}, 0).real(), -1.0, 1e-15);
  EXPECT_NEAR(line.coeff(Mode{1}, 0).real(), 0.5, 1e-15);
}

TEST(Potential, GradientAndUpsilonForSine) {
  // V = -cos q, V' = sin q, alpha_{+-1} = -+ i/2
  auto V = Potential<double>::from_amplitudes(1, {{Mode{1}, -1.0, 0.0}});
  EXPECT_NEAR(std::abs(V.gradient().coeff(Mode{1}, 0) - C(0, -0.5)), 0, 1e-16);
  EXPECT_NEAR(std::abs(V.gradient().coeff(Mode{-1}, 0) - C(0, 0.5)), 0, 1e-16);
  EXPECT_DOUBLE_EQ(V.upsilon(), 1.0);
  std::vector<double> q{0.4};
  EXPECT_NEAR(V.gradient_at(std::span<const double>(q))[0], std::sin(0.4), 1e-15);
}

TEST(Potential, GradientProportionalToMode) {
  std::mt19937_64 rng(9);
  Potential<double> V(random_real(rng, 2, 1, 3));
  const auto& g = V.gradient();
  EXPECT_EQ(g.coeff(Mode{0, 0})[0], C(0, 0));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Mode& l = g.modes()[i];
    auto a = g.coeff_at(i);
    // a is i l V_l: cross product with l vanishes
    EXPECT_NEAR(std::abs(a[0] * double(l[1]) - a[1] * double(l[0])), 0, 1e-14);
    auto b = g.coeff(-l);
    EXPECT_EQ(b[0], std::conj(a[0]));
  }
}

TEST(Reality, OperationsPreserveFlag) {
  std::mt19937_64 rng(21);
  auto p = random_real(rng, 1, 1, 4);
  auto q = random_real(rng, 1, 2, 4);
  std::vector<double> d{0.3};
  EXPECT_TRUE(convolve_product(p, q).is_real());
  EXPECT_TRUE(shift(q, std::span<const double>(d)).is_real());
  EXPECT_TRUE(derivative(q, 0).is_real());
  EXPECT_TRUE((p + p).is_real());
}

TEST(Precision, MpRealMatchesDouble) {
  PrecisionScope scope(200);
  using MP = TrigPoly<MpReal>;
  MP::Terms t;
  t[Mode{1}] = {Complex<MpReal>(MpReal(0), MpReal(-0.5))};
  MP s(1, 1, 1, t, true);
  auto sq = convolve_product(s, s);
  EXPECT_EQ(sq.coeff(Mode{0}, 0).real(), MpReal("0.5"));
  EXPECT_GE(ScalarTraits<MpReal>::bits(), 200);
}

}  // namespace
}  // namespace lindstedt
