#include "lindstedt/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lindstedt/errors.hpp"

namespace lindstedt {

namespace {

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1); }

// Least-squares coefficients and RMS residual for y ~ X c.
std::pair<Eigen::VectorXd, double> least_squares(const Eigen::MatrixXd& X,
                                                 const Eigen::VectorXd& y) {
  Eigen::VectorXd c = X.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd r = X * c - y;
  return {c, std::sqrt(r.squaredNorm() / static_cast<double>(y.size()))};
}

}  // namespace

double GevreyFit::log_bound(int n, double inflation) const {
  const double s = sigma + inflation * std::abs(sigma);
  return std::log(A) + std::log1p(inflation) +
         n * (std::log(R) + std::log1p(inflation)) + s * log_factorial(n);
}

template <class Real>
std::vector<NormPoint> log_norms(const std::vector<NormLogEntry<Real>>& log) {
  std::vector<NormPoint> out;
  out.reserve(log.size());
  for (const auto& e : log) {
    out.push_back({e.n, e.norm == 0 ? -std::numeric_limits<double>::infinity()
                                    : log_abs(e.norm)});
  }
  return out;
}

GevreyFit gevrey_fit(std::span<const NormPoint> points, int n_lo, int n_hi) {
  if (n_lo < 3) throw InsufficientData("Gevrey window must start at n >= 3");
  if (n_hi < n_lo) throw InsufficientData("empty Gevrey window");
  GevreyFit fit;
  fit.n_lo = n_lo;
  fit.n_hi = n_hi;
  std::vector<const NormPoint*> used;
  for (const auto& p : points) {
    if (p.n < n_lo || p.n > n_hi) continue;
    if (!std::isfinite(p.log_norm)) {
      fit.skipped.push_back(p.n);
      continue;
    }
    used.push_back(&p);
  }
  if (used.size() < 4) {
    throw InsufficientData("Gevrey fit needs at least 4 nonzero norms");
  }
  const auto rows = static_cast<Eigen::Index>(used.size());
  Eigen::MatrixXd X(rows, 3), S(rows, 3);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double n = used[static_cast<std::size_t>(i)]->n;
    X(i, 0) = S(i, 0) = 1;
    X(i, 1) = S(i, 1) = n;
    X(i, 2) = log_factorial(static_cast<int>(n));
    S(i, 2) = n * std::log(n);
    y(i) = used[static_cast<std::size_t>(i)]->log_norm;
  }
  const auto [c, rms] = least_squares(X, y);
  fit.A = std::exp(c(0));
  fit.R = std::exp(c(1));
  fit.sigma = c(2);
  fit.residual_rms = rms;
  const auto [cs, rms_s] = least_squares(S, y);
  (void)rms_s;
  fit.stirling_sigma = cs(2);
  fit.stirling_difference = fit.stirling_sigma - fit.sigma;
  return fit;
}

GammaSigma gamma_sigma_detail(double sigma, int n_max) {
  if (!(sigma > 0)) throw std::invalid_argument("sigma must be positive");
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  std::vector<double> sums(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    // Terms shrink towards j = n/2, so the tail is dropped once negligible.
    double half = 0;
    double log_binom = 0;
    const int mid = n / 2;
    for (int j = 0; j <= mid; ++j) {
      if (j > 0) log_binom += std::log(double(n - j + 1)) - std::log(double(j));
      const double term = std::exp(-sigma * log_binom);
      const bool centre = 2 * j == n;
      half += centre ? term / 2 : term;
      if (term < 1e-18 * half) break;
    }
    sums[static_cast<std::size_t>(n)] = 2 * half;
  }
  GammaSigma out;
  out.value = *std::max_element(sums.begin(), sums.end());
  for (int n = 0; n <= n_max; ++n) {
    if (sums[static_cast<std::size_t>(n)] >= out.value * (1 - 1e-12)) {
      out.argmax.push_back(n);
    }
  }
  return out;
}

double gamma_sigma(double sigma, int n_max) {
  return gamma_sigma_detail(sigma, n_max).value;
}

namespace {

ProductCheck compare_products(const std::vector<double>& lhs, double sigma,
                              double A, double B) {
  ProductCheck out;
  const int n_max = std::max(1, static_cast<int>(lhs.size()) - 1);
  out.gamma = gamma_sigma(sigma, n_max);
  for (std::size_t n = 0; n < lhs.size(); ++n) {
    const double rhs = out.gamma * A * B *
                       std::exp(sigma * log_factorial(static_cast<int>(n)));
    const double ratio = lhs[n] / rhs;
    out.worst_ratio = std::max(out.worst_ratio, ratio);
    // Saturated inputs hit the bound exactly at n = 3, 4 for sigma = 1.
    if (ratio > 1 + 1e-12 && out.ok) {
      out.ok = false;
      out.violating_n = static_cast<int>(n);
    }
  }
  return out;
}

}  // namespace

ProductCheck product_bound_check(std::span<const double> u_norms,
                                 std::span<const double> v_norms,
                                 double sigma, double A, double B) {
  const std::size_t len = std::min(u_norms.size(), v_norms.size());
  std::vector<double> lhs(len, 0.0);
  for (std::size_t n = 0; n < len; ++n) {
    for (std::size_t j = 0; j <= n; ++j) lhs[n] += u_norms[n - j] * v_norms[j];
  }
  return compare_products(lhs, sigma, A, B);
}

template <class Real>
ProductCheck product_bound_check(const std::vector<TrigPoly<Real>>& u,
                                 const std::vector<TrigPoly<Real>>& v,
                                 double sigma, double A, double B,
                                 const NormParams<Real>& np) {
  const std::size_t len = std::min(u.size(), v.size());
  std::vector<double> lhs(len, 0.0);
  for (std::size_t n = 0; n < len; ++n) {
    std::vector<TrigPoly<Real>> products;
    for (std::size_t j = 0; j <= n; ++j) {
      products.push_back(convolve_product(u[n - j], v[j]));
    }
    std::vector<Scaled<Real>> terms;
    for (const auto& p : products) terms.push_back({Complex<Real>(1), p});
    lhs[n] = to_double(
        norm(linear_combine(std::span<const Scaled<Real>>(terms)), np));
  }
  return compare_products(lhs, sigma, A, B);
}

ConditionReport check_inductive_conditions(ConditionKind kind,
                                           const ConditionInputs& in,
                                           int gamma_n_max) {
  ConditionReport rep;
  rep.exponent_ok = 2 * in.tau < in.sigma;
  rep.gamma_sigma = in.sigma > 0 ? gamma_sigma(in.sigma, gamma_n_max)
                                 : std::numeric_limits<double>::infinity();
  rep.product_lhs = in.J * rep.gamma_sigma * in.A * in.B;
  rep.product_ok = rep.product_lhs <= in.A;
  const double pre =
      4.0 / (in.nu * in.nu) * std::pow(double(in.J), 2 * in.tau);
  const double inner = kind == ConditionKind::kLowerConservative
                           ? in.upsilon * in.A
                           : in.upsilon * in.A + 2 * in.gamma * in.B;
  rep.solve_lhs = pre * inner;
  rep.solve_ok = rep.solve_lhs <= in.B;
  return rep;
}

InductiveScale find_inductive_scale(ConditionKind kind, double tau, double nu,
                                    int J, double upsilon, double gamma,
                                    double rho, double r,
                                    double sigma_margin) {
  InductiveScale out;
  ConditionInputs in;
  in.sigma = 2 * tau + sigma_margin;
  in.tau = tau;
  in.nu = nu;
  in.J = J;
  in.A = 1.01 * std::exp(J * rho) * std::pow(1.0 + J * J, r / 2);
  in.B = 0.999 / (J * gamma_sigma(in.sigma, 10000));
  const auto at = [&](double eta) {
    ConditionInputs s = in;
    s.upsilon = eta * upsilon;
    s.gamma = eta * eta * eta * gamma;
    return std::pair{s, check_inductive_conditions(kind, s)};
  };
  double lo = 0, hi = 1;
  if (at(1).second.all()) {
    lo = 1;
  } else {
    for (int it = 0; it < 200; ++it) {
      const double mid = (lo + hi) / 2;
      if (at(mid).second.all()) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  out.eta = lo;
  auto [inputs, report] = at(lo);
  out.inputs = inputs;
  out.report = report;
  out.found = lo > 0 && report.all();
  return out;
}

template <class Real>
Companions<Real> scale_companions(const Real& upsilon, const Real& gamma,
                                  const Real& eta) {
  return {eta * upsilon, eta * eta * eta * gamma};
}

template <class Real>
Potential<Real> scale_potential(const Potential<Real>& potential,
                                const Real& eta) {
  return potential.scaled(eta);
}

namespace {

template <class Real>
void scale_logs(std::vector<NormLogEntry<Real>>& norms,
                std::vector<SolveLogEntry<Real>>& solves, const Real& eta) {
  using std::pow;
  for (auto& e : norms) {
    const Real f = pow(eta, e.n);
    e.norm *= f;
    e.mu_abs *= f;
  }
  for (auto& s : solves) {
    const Real f = pow(eta, s.n);
    s.norm_A *= f;
    s.norm_B *= f;
  }
}

}  // namespace

template <class Real>
MaximalExpansion<Real> scale_series(const MaximalExpansion<Real>& e,
                                    const Real& eta) {
  if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
  MaximalExpansion<Real> out = e;
  out.caches.clear();
  Real f(1);
  for (std::size_t n = 0; n < out.u.size(); ++n) {
    out.u[n] = f * e.u[n];
    for (auto& m : out.mu[n]) m *= f;
    f *= eta;
  }
  scale_logs(out.norm_log, out.solve_log, eta);
  return out;
}

template <class Real>
LowerExpansion<Real> scale_series(const LowerExpansion<Real>& e,
                                  const Real& eta) {
  if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
  LowerExpansion<Real> out = e;
  out.caches.clear();
  Real f(1);
  for (std::size_t n = 0; n < out.g.size(); ++n) {
    out.g[n] = f * e.g[n];
    for (auto& m : out.mu[n]) m *= f;
    out.beta[n] *= f;
    f *= eta;
  }
  scale_logs(out.norm_log, out.solve_log, eta);
  return out;
}

template <class Real>
double residual_order_fit(std::span<const ResidualPoint<Real>> table) {
  if (table.size() < 3) {
    throw InsufficientData("residual fit needs at least 3 points");
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::vector<double> xs, ys;
  for (const auto& p : table) {
    if (!(p.eps > 0) || !(p.value > 0)) {
      throw InsufficientData("residual fit needs positive eps and residuals");
    }
    xs.push_back(log_abs(p.eps));
    ys.push_back(log_abs(p.value));
    lo = std::min(lo, xs.back());
    hi = std::max(hi, xs.back());
  }
  if (hi - lo < std::log(10.0) * (1 - 1e-12)) {
    throw InsufficientData("eps values must span at least one decade");
  }
  Eigen::MatrixXd X(static_cast<Eigen::Index>(xs.size()), 2);
  Eigen::VectorXd y(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    X(static_cast<Eigen::Index>(i), 0) = 1;
    X(static_cast<Eigen::Index>(i), 1) = xs[i];
    y(static_cast<Eigen::Index>(i)) = ys[i];
  }
  return least_squares(X, y).first(1);
}

template <class Real>
DegreeAudit degree_audit(const std::vector<TrigPoly<Real>>& series, int J) {
  DegreeAudit out;
  for (std::size_t n = 0; n < series.size(); ++n) {
    const int d = series[n].attained_degree();
    out.attained.push_back(d);
    if (d > static_cast<int>(n) * J) out.violations.push_back(static_cast<int>(n));
  }
  return out;
}

#define LINDSTEDT_INSTANTIATE_DIAGNOSTICS(R)                                  \
  template std::vector<NormPoint> log_norms(                                  \
      const std::vector<NormLogEntry<R>>&);                                   \
  template ProductCheck product_bound_check(                                  \
      const std::vector<TrigPoly<R>>&, const std::vector<TrigPoly<R>>&,       \
      double, double, double, const NormParams<R>&);                          \
  template Companions<R> scale_companions(const R&, const R&, const R&);      \
  template Potential<R> scale_potential(const Potential<R>&, const R&);       \
  template MaximalExpansion<R> scale_series(const MaximalExpansion<R>&,       \
                                            const R&);                        \
  template LowerExpansion<R> scale_series(const LowerExpansion<R>&,           \
                                          const R&);                          \
  template double residual_order_fit(std::span<const ResidualPoint<R>>);      \
  template DegreeAudit degree_audit(const std::vector<TrigPoly<R>>&, int);

LINDSTEDT_INSTANTIATE_DIAGNOSTICS(double)
LINDSTEDT_INSTANTIATE_DIAGNOSTICS(MpReal)

}  // namespace lindstedt
