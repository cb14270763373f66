#include "lindstedt/diagnostics.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "lindstedt/errors.hpp"
#include "test_util.hpp"

namespace lindstedt {
namespace {

using testing::C;
using testing::Poly;

std::vector<NormPoint> synthetic(int lo, int hi, double logA, double logR,
                                 double sigma) {
  std::vector<NormPoint> pts;
  for (int n = lo; n <= hi; ++n) {
    pts.push_back({n, logA + n * logR + sigma * std::lgamma(n + 1.0)});
  }
  return pts;
}

MaximalExpansion<double> standard_map(double gamma, int N) {
  MaximalModel<double> model(
      Potential<double>::from_amplitudes(1, {{Mode{1}, -1.0, 0.0}}),
      Frequency<double>::golden_mean(), gamma, N);
  return expand(model, NormParams<double>(1.0, 1.0));
}

TEST(GevreyFit, RecoversFactorial) {
  const auto pts = synthetic(3, 30, 0, 0, 1);
  const auto fit = gevrey_fit(pts, 3, 30);
  EXPECT_NEAR(fit.sigma, 1.0, 1e-9);
  EXPECT_NEAR(fit.R, 1.0, 1e-9);
  EXPECT_NEAR(fit.A, 1.0, 1e-9);
  EXPECT_LT(fit.residual_rms, 1e-10);
}

TEST(GevreyFit, GeometricHasNoFactorialPart) {
  const auto pts = synthetic(3, 30, 0.5, std::log(2.0), 0);
  const auto fit = gevrey_fit(pts, 3, 30);
  EXPECT_NEAR(fit.sigma, 0.0, 1e-6);
  EXPECT_NEAR(fit.R, 2.0, 1e-6);
}

TEST(GevreyFit, ExactOnOwnModel) {
  const auto pts = synthetic(5, 25, -1.3, 0.7, 1.6);
  const auto fit = gevrey_fit(pts, 5, 25);
  EXPECT_LT(fit.residual_rms, 1e-9);
  EXPECT_NEAR(fit.log_bound(12), pts[7].log_norm, 1e-8);
}

TEST(GevreyFit, SkipsZeroNorms) {
  auto pts = synthetic(3, 12, 0, 0, 1);
  pts[2].log_norm = -std::numeric_limits<double>::infinity();
  pts[5].log_norm = -std::numeric_limits<double>::infinity();
  const auto fit = gevrey_fit(pts, 3, 12);
  EXPECT_EQ(fit.skipped, (std::vector<int>{5, 8}));
  EXPECT_NEAR(fit.sigma, 1.0, 1e-9);
}

TEST(GevreyFit, InsufficientData) {
  const auto pts = synthetic(3, 12, 0, 0, 1);
  EXPECT_THROW(gevrey_fit(pts, 3, 5), InsufficientData);
  EXPECT_THROW(gevrey_fit(pts, 2, 12), InsufficientData);
  auto zeros = synthetic(3, 8, 0, 0, 1);
  for (int i = 0; i < 3; ++i) zeros[static_cast<std::size_t>(i)].log_norm = -INFINITY;
  EXPECT_THROW(gevrey_fit(zeros, 3, 8), InsufficientData);
}

TEST(GevreyFit, StirlingCrossCheckClose) {
  const auto fit = gevrey_fit(synthetic(10, 40, 0, 0.2, 1.0), 10, 40);
  EXPECT_NEAR(fit.stirling_sigma, 1.0, 0.1);
  EXPECT_DOUBLE_EQ(fit.stirling_difference, fit.stirling_sigma - fit.sigma);
}

TEST(GevreyFit, DissipativeStandardMapExtrapolates) {
  const auto e = standard_map(0.1, 40);
  const auto pts = log_norms(e.norm_log);
  const auto full = gevrey_fit(pts, 15, 40);
  EXPECT_TRUE(std::isfinite(full.sigma));
  EXPECT_GT(full.sigma, 0.0);
  const auto early = gevrey_fit(pts, 15, 27);
  for (const auto& p : pts) {
    if (p.n < 28 || !std::isfinite(p.log_norm)) continue;
    EXPECT_LE(p.log_norm, early.log_bound(p.n, 0.1)) << "n = " << p.n;
  }
}

TEST(GammaSigma, EightThirds) {
  const auto g = gamma_sigma_detail(1.0, 10000);
  EXPECT_NEAR(g.value, 8.0 / 3.0, 1e-9);
  EXPECT_EQ(g.argmax, (std::vector<int>{3, 4}));
}

TEST(GammaSigma, LowerBoundAndMonotone) {
  double prev = 1e300;
  for (double s : {0.5, 1.0, 1.5, 2.0, 3.0, 5.0}) {
    const double g = gamma_sigma(s, 2000);
    EXPECT_GE(g, 2.0);
    EXPECT_LE(g, prev);
    prev = g;
  }
  EXPECT_LT(gamma_sigma(2.0, 10000), gamma_sigma(1.0, 10000));
}

TEST(GammaSigma, RunningMaxSettlesEarly) {
  for (double s : {1.0, 1.5, 2.0, 3.0}) {
    EXPECT_EQ(gamma_sigma(s, 10), gamma_sigma(s, 10000)) << s;
  }
}

TEST(GammaSigma, RejectsBadInput) {
  EXPECT_THROW(gamma_sigma(0.0, 10), std::invalid_argument);
  EXPECT_THROW(gamma_sigma(1.0, 0), std::invalid_argument);
}

TEST(ProductBound, ConstantSeries) {
  std::vector<double> ones(40, 1.0);
  for (double s : {1.0, 1.5, 2.0}) {
    const auto r = product_bound_check(ones, ones, s, 1.0, 1.0);
    EXPECT_TRUE(r.ok) << s;
  }
}

TEST(ProductBound, ZeroSeries) {
  std::vector<double> zeros(20, 0.0);
  EXPECT_TRUE(product_bound_check(zeros, zeros, 1.0, 1.0, 1.0).ok);
}

TEST(ProductBound, SaturatedRandomDraws) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int draw = 0; draw < 100; ++draw) {
    const double A = 0.1 + 5 * unit(rng), B = 0.1 + 5 * unit(rng);
    std::vector<double> u, v;
    for (int j = 0; j < 30; ++j) {
      const double f = std::exp(std::lgamma(j + 1.0));
      // Every other draw sits exactly on the hypothesis.
      u.push_back(A * f * (draw % 2 ? 1.0 : unit(rng)));
      v.push_back(B * f * (draw % 2 ? 1.0 : unit(rng)));
    }
    const auto r = product_bound_check(u, v, 1.0, A, B);
    EXPECT_TRUE(r.ok) << "draw " << draw << " n " << r.violating_n;
    EXPECT_NEAR(r.gamma, 8.0 / 3.0, 1e-9);
  }
}

TEST(ProductBound, ReportsViolation) {
  std::vector<double> u{1, 1, 100, 1};
  const auto r = product_bound_check(u, u, 1.0, 1.0, 1.0);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.violating_n, 2);
  EXPECT_GT(r.worst_ratio, 1.0);
}

TEST(ProductBound, PolynomialCoefficients) {
  std::vector<Poly> u, v;
  for (int j = 0; j < 12; ++j) {
    const double f = std::exp(std::lgamma(j + 1.0));
    u.push_back(Poly::single_mode(1, Mode{j}, {C(2.0 * f, 0)}));
    v.push_back(Poly::single_mode(1, Mode{-j}, {C(0, 3.0 * f)}));
  }
  const auto r = product_bound_check(u, v, 1.0, 2.0, 3.0, NormParams<double>(0, 0));
  EXPECT_TRUE(r.ok);
}

TEST(InductiveConditions, ConservativeSmallForcePasses) {
  ConditionInputs in{.A = 3, .B = 0.3, .sigma = 3, .tau = 1, .nu = 2.6, .J = 1,
                     .upsilon = 1e-3, .gamma = 0};
  const auto r = check_inductive_conditions(ConditionKind::kLowerConservative, in);
  EXPECT_TRUE(r.solve_ok);
  EXPECT_TRUE(r.exponent_ok);
  EXPECT_TRUE(r.product_ok);
  EXPECT_TRUE(r.all());
}

TEST(InductiveConditions, ExponentFailsWhenSigmaTooSmall) {
  ConditionInputs in{.A = 3, .B = 0.3, .sigma = 2, .tau = 1, .nu = 2.6, .J = 1,
                     .upsilon = 1e-6, .gamma = 1e-6};
  const auto r = check_inductive_conditions(ConditionKind::kMaximal, in);
  EXPECT_FALSE(r.exponent_ok);
  EXPECT_FALSE(r.all());
}

TEST(InductiveConditions, DissipationEntersOnlyDissipativeSets) {
  ConditionInputs in{.A = 3, .B = 0.3, .sigma = 3, .tau = 1, .nu = 2.6, .J = 1,
                     .upsilon = 1e-3, .gamma = 100};
  EXPECT_FALSE(check_inductive_conditions(ConditionKind::kMaximal, in).solve_ok);
  EXPECT_FALSE(check_inductive_conditions(ConditionKind::kLowerDissipative, in).solve_ok);
  EXPECT_TRUE(check_inductive_conditions(ConditionKind::kLowerConservative, in).solve_ok);
}

TEST(InductiveConditions, ScaledStandardMap) {
  const int N = 40;
  const auto e = standard_map(0.1, N);
  const auto freq = Frequency<double>::golden_mean();
  const auto prof = diophantine_profile(freq, 200);
  const auto pot = Potential<double>::from_amplitudes(1, {{Mode{1}, -1.0, 0.0}});
  const auto s = find_inductive_scale(ConditionKind::kMaximal, prof.tau, prof.nu, 1,
                                      pot.upsilon(), 0.1, 1.0, 1.0);
  ASSERT_TRUE(s.found);
  EXPECT_GT(s.eta, 0.0);
  EXPECT_LE(s.eta, 1.0);
  const auto scaled = scale_series(e, s.eta);
  for (const auto& entry : scaled.norm_log) {
    if (entry.n < 4) continue;
    EXPECT_LE(std::log(entry.norm),
              std::log(s.inputs.B) + s.inputs.sigma * std::lgamma(entry.n + 1.0))
        << "n = " << entry.n;
  }
}

TEST(ScaleSeries, IdentityAndPowerLaw) {
  const auto e = standard_map(0.1, 6);
  const auto same = scale_series(e, 1.0);
  for (std::size_t n = 0; n < e.u.size(); ++n) {
    EXPECT_EQ(same.u[n].terms(), e.u[n].terms());
    EXPECT_EQ(same.mu[n], e.mu[n]);
  }
  const auto half = scale_series(e, 0.5);
  EXPECT_LE(testing::max_coeff_diff(half.u[4], (1.0 / 16) * e.u[4]), 0.0);
  EXPECT_EQ(half.mu[3][0], e.mu[3][0] / 8);
  EXPECT_EQ(half.norm_log[4].norm, e.norm_log[4].norm / 16);
  EXPECT_TRUE(half.caches.empty());
  EXPECT_THROW(scale_series(e, 0.0), std::invalid_argument);
}

TEST(ScaleSeries, Companions) {
  const auto c = scale_companions(2.0, 0.8, 0.5);
  EXPECT_EQ(c.upsilon, 1.0);
  EXPECT_EQ(c.gamma, 0.1);
  const auto p = Potential<double>::from_amplitudes(1, {{Mode{1}, 1.0, 0.0}});
  EXPECT_EQ(scale_potential(p, 0.5).upsilon(), 0.5 * p.upsilon());
}

TEST(ResidualOrderFit, SyntheticPowerLaw) {
  for (int N : {2, 5, 8}) {
    std::vector<ResidualPoint<double>> t;
    for (double eps : {1e-2, 3e-3, 1e-3, 3e-4}) {
      t.push_back({eps, 7.5 * std::pow(eps, N + 1)});
    }
    EXPECT_NEAR(residual_order_fit<double>(t), N + 1, 1e-6);
  }
}

TEST(ResidualOrderFit, InsufficientData) {
  std::vector<ResidualPoint<double>> two{{1e-2, 1e-4}, {1e-3, 1e-6}};
  EXPECT_THROW(residual_order_fit<double>(two), InsufficientData);
  std::vector<ResidualPoint<double>> narrow{{1e-2, 1e-4}, {8e-3, 6e-5}, {5e-3, 2e-5}};
  EXPECT_THROW(residual_order_fit<double>(narrow), InsufficientData);
  std::vector<ResidualPoint<double>> zero{{1e-2, 1e-4}, {1e-3, 0.0}, {1e-4, 1e-8}};
  EXPECT_THROW(residual_order_fit<double>(zero), InsufficientData);
}

TEST(DegreeAudit, StandardMapAttainsBudget) {
  const auto e = standard_map(0.1, 12);
  const auto a = degree_audit(e.u, 1);
  EXPECT_TRUE(a.ok());
  for (int n = 1; n <= 12; ++n) EXPECT_EQ(a.attained[static_cast<std::size_t>(n)], n);
}

TEST(DegreeAudit, ZeroPotential) {
  MaximalModel<double> model(Potential<double>::from_amplitudes(1, {}),
                             Frequency<double>::golden_mean(), 0.1, 6);
  const auto e = expand(model, NormParams<double>(1, 1));
  const auto a = degree_audit(e.u, 1);
  for (int d : a.attained) EXPECT_EQ(d, 0);
}

TEST(DegreeAudit, FlagsViolations) {
  std::vector<Poly> s{Poly(1, 1), testing::sin_theta(1), testing::sin_theta(5)};
  const auto a = degree_audit(s, 2);
  EXPECT_FALSE(a.ok());
  EXPECT_EQ(a.violations, std::vector<int>{2});
}

}  // namespace
}  // namespace lindstedt
