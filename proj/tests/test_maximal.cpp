#include "lindstedt/maximal.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "lindstedt/diagnostics.hpp"
#include "lindstedt/errors.hpp"
#include "lindstedt/scalar.hpp"
#include "test_util.hpp"

namespace lindstedt {
namespace {

using testing::C;
using testing::Poly;
using testing::max_coeff_diff;
using testing::sin_theta;

// V'(q) = sin q, i.e. V = -cos q.
template <class Real = double>
Potential<Real> sine_force(const Real& amp = Real(1)) {
  return Potential<Real>::from_amplitudes(1, {{Mode{1}, Real(-amp), Real(0)}});
}

MaximalModel<double> standard_map(double gamma, int N) {
  return {sine_force(), Frequency<double>::golden_mean(), gamma, N};
}

const NormParams<double> kNorm(1.0, 1.0);

TEST(Maximal, OrderZeroOnly) {
  auto e = expand(standard_map(0.1, 0), kNorm);
  ASSERT_EQ(e.order(), 0);
  EXPECT_TRUE(e.u[0].is_zero());
  EXPECT_EQ(e.mu[0], std::vector<double>{0.0});
}

TEST(Maximal, FirstOrderClosedForm) {
  auto e = expand(standard_map(0.1, 1), kNorm);
  const double w = Frequency<double>::golden_mean().omega()[0];
  EXPECT_EQ(e.mu[1][0], 0.0);
  EXPECT_LE(max_coeff_diff(e.u[1], (1.0 / (2 * (std::cos(w) - 1))) * sin_theta()),
            1e-15);
}

// sin(t + eps u1) = sin t + eps u1 cos t + ..., with u1 = sin t / m1, so the
// order-2 right-hand side is sin 2t / (2 m1) and has zero average.
TEST(Maximal, SecondOrderByHand) {
  auto e = expand(standard_map(0.1, 2), kNorm);
  const auto f = Frequency<double>::golden_mean();
  const double m1 = multiplier(Mode{1}, f);
  const double m2 = multiplier(Mode{2}, f);
  EXPECT_EQ(e.mu[2][0], 0.0);
  EXPECT_LE(max_coeff_diff(e.u[2], (1.0 / (2 * m1 * m2)) * sin_theta(2)), 1e-15);
}

TEST(Maximal, ThirdOrderDriftCarriesDissipation) {
  const double gamma = 0.1;
  auto e = expand(standard_map(gamma, 3), kNorm);
  const double w = Frequency<double>::golden_mean().omega()[0];
  // The E-sum average vanishes at order 3 for V' = sin, leaving gamma omega.
  EXPECT_NEAR(e.mu[3][0], gamma * w, 1e-14);
}

TEST(Maximal, DriftIsMinusAverageOfRhs) {
  auto model = standard_map(0.1, 6);
  model.potential = Potential<double>::from_amplitudes(
      1, {{Mode{1}, -1.0, 0.0}, {Mode{2}, 0.2, 0.3}});
  auto e = start_maximal(model);
  for (int n = 1; n <= 6; ++n) {
    auto r = step(model, e);
    EXPECT_NEAR(std::abs(average(r.rhs)[0]), 0.0, 1e-14) << "n = " << n;
    commit(e, r, kNorm);
  }
}

TEST(Maximal, ZeroForce) {
  const double gamma = 0.25;
  MaximalModel<double> model(Potential<double>::from_amplitudes(1, {}),
                             Frequency<double>::golden_mean(), gamma, 8);
  auto e = expand(model, kNorm);
  const double w = model.freq.omega()[0];
  for (int n = 1; n <= 8; ++n) {
    EXPECT_TRUE(e.u[static_cast<std::size_t>(n)].is_zero()) << n;
    EXPECT_EQ(e.mu[static_cast<std::size_t>(n)][0], n == 3 ? gamma * w : 0.0) << n;
  }
}

TEST(Maximal, StandardMapDegreesAndNormalization) {
  auto e = expand(standard_map(0.1, 30), kNorm);
  for (int n = 1; n <= 30; ++n) {
    const auto& u = e.u[static_cast<std::size_t>(n)];
    EXPECT_TRUE(u.is_real());
    EXPECT_EQ(average(u)[0], C(0, 0));
    if (!u.is_zero()) EXPECT_EQ(u.attained_degree(), n) << "n = " << n;
  }
  EXPECT_TRUE(degree_audit(e.u, 1).ok());
}

TEST(Maximal, DegreeTwoPotential) {
  MaximalModel<double> model(
      Potential<double>::from_amplitudes(1, {{Mode{1}, 1.0, 0.0}, {Mode{2}, 0.0, 0.4}}),
      Frequency<double>::golden_mean(), 0.1, 12);
  auto e = expand(model, kNorm);
  const auto audit = degree_audit(e.u, 2);
  EXPECT_TRUE(audit.ok());
  EXPECT_EQ(audit.attained[4], 8);
}

TEST(Maximal, TwoDimensional) {
  MaximalModel<double> model(
      Potential<double>::from_amplitudes(2, {{Mode{1, 0}, 1.0, 0.0},
                                             {Mode{0, 1}, 0.5, 0.0},
                                             {Mode{1, 1}, 0.0, 0.2}}),
      Frequency<double>({Frequency<double>::golden_mean().omega()[0], std::sqrt(2.0)}),
      0.1, 6);
  auto e = expand(model, kNorm);
  for (int n = 1; n <= 6; ++n) {
    const auto avg = average(e.u[static_cast<std::size_t>(n)]);
    EXPECT_EQ(avg[0], C(0, 0));
    EXPECT_EQ(avg[1], C(0, 0));
    EXPECT_LE(e.u[static_cast<std::size_t>(n)].attained_degree(),
              n * model.potential.degree());
  }
  auto r = residual(model, e, 3, std::span<const double>(std::vector<double>{1e-2, 1e-3}), kNorm);
  EXPECT_NEAR(std::log(r[0].value / r[1].value) / std::log(10.0), 4.0, 0.1);
}

TEST(Maximal, ConservativeWarning) {
  EXPECT_TRUE(standard_map(0.1, 3).warnings().empty());
  auto w = standard_map(0.0, 3).warnings();
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].find("ConservativeMaximal"), std::string::npos);
}

TEST(Maximal, BadModel) {
  EXPECT_THROW(MaximalModel<double>(sine_force(), Frequency<double>({1.0, 2.0}), 0.1, 3),
               DimensionMismatch);
  EXPECT_THROW(standard_map(0.1, -1), std::invalid_argument);
}

TEST(Maximal, ResonantFrequencyPropagates) {
  MaximalModel<double> model(sine_force(), Frequency<double>({M_PI}), 0.1, 3);
  EXPECT_THROW(expand(model, kNorm), ExactResonance);
}

TEST(Maximal, Deterministic) {
  auto a = expand(standard_map(0.1, 15), kNorm);
  auto b = expand(standard_map(0.1, 15), kNorm);
  for (std::size_t n = 0; n < a.u.size(); ++n) {
    EXPECT_EQ(a.u[n].terms(), b.u[n].terms());
    EXPECT_EQ(a.mu[n], b.mu[n]);
  }
}

TEST(Maximal, ScalingCovariance) {
  const double eta = 0.5;
  const auto base = expand(standard_map(0.1, 20), kNorm);
  MaximalModel<double> scaled(sine_force().scaled(eta),
                              Frequency<double>::golden_mean(),
                              0.1 * eta * eta * eta, 20);
  const auto direct = expand(scaled, kNorm);
  const auto mapped = scale_series(base, eta);
  const NormParams<double> plain(0, 0);
  for (int n = 1; n <= 20; ++n) {
    const auto i = static_cast<std::size_t>(n);
    const double ref = norm(mapped.u[i], plain);
    EXPECT_LE(norm(direct.u[i] - mapped.u[i], plain), 1e-11 * ref) << n;
    EXPECT_LE(std::abs(direct.mu[i][0] - mapped.mu[i][0]),
              1e-11 * std::abs(mapped.mu[i][0]))
        << n;
  }
}

TEST(Maximal, ResidualAtZeroEps) {
  auto model = standard_map(0.1, 4);
  auto e = expand(model, kNorm);
  std::vector<double> eps{0.0};
  EXPECT_EQ(residual(model, e, 4, std::span<const double>(eps), kNorm)[0].value, 0.0);
}

TEST(Maximal, ResidualSlopeLowOrder) {
  auto model = standard_map(0.1, 4);
  auto e = expand(model, kNorm);
  std::vector<double> eps{1e-2, 3e-3, 1e-3, 3e-4};
  auto r = residual(model, e, 2, std::span<const double>(eps), kNorm);
  EXPECT_NEAR(residual_order_fit<double>(r), 3.0, 0.1);
}

TEST(Maximal, HigherTruncationVanishesFaster) {
  auto model = standard_map(0.1, 4);
  auto e = expand(model, kNorm);
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  auto r2 = residual(model, e, 2, std::span<const double>(eps), kNorm);
  auto r1 = residual(model, e, 1, std::span<const double>(eps), kNorm);
  double prev = 1e300;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double ratio = r2[i].value / r1[i].value;
    EXPECT_LT(ratio, prev);
    prev = ratio;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(Maximal, ResidualSlopeHighPrecision) {
  PrecisionScope scope(256);
  using R = MpReal;
  MaximalModel<R> model(sine_force<R>(), Frequency<R>::golden_mean(),
                        ScalarTraits<R>::from_string("0.1"), 6);
  auto e = expand(model, NormParams<R>(R(1), R(1)));
  std::vector<R> eps;
  for (const char* s : {"1e-2", "3e-3", "1e-3", "3e-4"}) {
    eps.push_back(ScalarTraits<R>::from_string(s));
  }
  auto r = residual(model, e, 5, std::span<const R>(eps), NormParams<R>(R(1), R(1)));
  EXPECT_NEAR(residual_order_fit<R>(r), 6.0, 0.1);
}

}  // namespace
}  // namespace lindstedt
