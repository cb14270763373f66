#pragma once

#include <span>
#include <string>
#include <vector>

#include "lindstedt/fourier.hpp"
#include "lindstedt/lower.hpp"
#include "lindstedt/maximal.hpp"
#include "lindstedt/records.hpp"

namespace lindstedt {

// ---- Gevrey growth -------------------------------------------------------

struct NormPoint {
  int n = 0;
  double log_norm = 0;  // -inf marks an exactly vanishing coefficient
};

// log ||u_n|| = log A + n log R + sigma log n!
struct GevreyFit {
  double A = 0;
  double R = 0;
  double sigma = 0;
  int n_lo = 0;
  int n_hi = 0;
  double residual_rms = 0;
  std::vector<int> skipped;  // zero-norm orders inside the window
  // Same fit with n log n in place of log n!.
  double stirling_sigma = 0;
  double stirling_difference = 0;

  // log of A' R'^n (n!)^sigma' with every parameter inflated by `inflation`
  // (relative) in the direction that enlarges the bound.
  double log_bound(int n, double inflation = 0) const;
};

template <class Real>
std::vector<NormPoint> log_norms(const std::vector<NormLogEntry<Real>>& log);

GevreyFit gevrey_fit(std::span<const NormPoint> points, int n_lo, int n_hi);

// ---- Product estimates ---------------------------------------------------

struct GammaSigma {
  double value = 0;
  std::vector<int> argmax;  // every n attaining the maximum (rel. 1e-12)
};

// max_{0<=n<=n_max} sum_{j=0}^{n} C(n,j)^{-sigma}
GammaSigma gamma_sigma_detail(double sigma, int n_max);
double gamma_sigma(double sigma, int n_max);

struct ProductCheck {
  bool ok = true;
  int violating_n = -1;
  double worst_ratio = 0;  // max_n lhs / rhs
  double gamma = 0;
};

// Checks sum_j ||u_{n-j}|| ||v_j|| <= Gamma_sigma A B (n!)^sigma.
ProductCheck product_bound_check(std::span<const double> u_norms,
                                 std::span<const double> v_norms,
                                 double sigma, double A, double B);

// Same with the actual Cauchy-product coefficients sum_j u_{n-j} v_j
// (u scalar-valued) measured in the given norm.
template <class Real>
ProductCheck product_bound_check(const std::vector<TrigPoly<Real>>& u,
                                 const std::vector<TrigPoly<Real>>& v,
                                 double sigma, double A, double B,
                                 const NormParams<Real>& np);

// ---- Inductive conditions ------------------------------------------------

enum class ConditionKind { kMaximal, kLowerDissipative, kLowerConservative };

struct ConditionInputs {
  double A = 0;
  double B = 0;
  double sigma = 0;
  double tau = 0;
  double nu = 0;
  int J = 1;
  double upsilon = 0;
  double gamma = 0;
};

struct ConditionReport {
  bool exponent_ok = false;  // 2 tau < sigma
  bool product_ok = false;   // J Gamma_sigma A B <= A
  bool solve_ok = false;     // 4 nu^-2 J^{2 tau} (Upsilon A + 2 gamma B) <= B
  double gamma_sigma = 0;
  double product_lhs = 0;
  double solve_lhs = 0;
  bool all() const { return exponent_ok && product_ok && solve_ok; }
};

ConditionReport check_inductive_conditions(ConditionKind kind,
                                           const ConditionInputs& in,
                                           int gamma_n_max = 10000);

struct InductiveScale {
  ConditionInputs inputs;  // with the scaled Upsilon and gamma
  double eta = 0;
  ConditionReport report;
  bool found = false;
};

// Picks sigma = 2 tau + sigma_margin, A just above e^{J rho} (1+J^2)^{r/2},
// B = 0.999 / (J Gamma_sigma), then bisects for the largest eta in (0, 1]
// at which (eta Upsilon, eta^3 gamma) satisfy all three conditions.
InductiveScale find_inductive_scale(ConditionKind kind, double tau, double nu,
                                    int J, double upsilon, double gamma,
                                    double rho, double r,
                                    double sigma_margin = 0.5);

// ---- Scaling ---------------------------------------------------------------

template <class Real>
struct Companions {
  Real upsilon;
  Real gamma;
};

template <class Real>
Companions<Real> scale_companions(const Real& upsilon, const Real& gamma,
                                  const Real& eta);

template <class Real>
Potential<Real> scale_potential(const Potential<Real>& potential,
                                const Real& eta);

// Order-n data multiplied by eta^n. Caches are dropped; norm_log is rescaled.
template <class Real>
MaximalExpansion<Real> scale_series(const MaximalExpansion<Real>& e,
                                    const Real& eta);
template <class Real>
LowerExpansion<Real> scale_series(const LowerExpansion<Real>& e,
                                  const Real& eta);

// ---- Residual order and degrees -------------------------------------------

template <class Real>
double residual_order_fit(std::span<const ResidualPoint<Real>> table);

struct DegreeAudit {
  std::vector<int> attained;
  std::vector<int> violations;  // orders with attained degree > n J
  bool ok() const { return violations.empty(); }
};

template <class Real>
DegreeAudit degree_audit(const std::vector<TrigPoly<Real>>& series, int J);

}  // namespace lindstedt
