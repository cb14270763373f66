#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lindstedt/cohomology.hpp"
#include "lindstedt/exprec.hpp"
#include "lindstedt/fourier.hpp"
#include "lindstedt/records.hpp"

namespace lindstedt {

// Winding data for a one-frequency torus in a two-degree-of-freedom system.
// The hull is h(theta) = theta k + g(theta) with g 2*pi-periodic, so
// h(theta + 2 pi) = h(theta) + 2 pi k for the integer vector k.
class LowerTopology {
 public:
  // k_perp defaults to (-k2, k1) / gcd(k1, k2).
  explicit LowerTopology(Mode k);
  LowerTopology(Mode k, Mode k_perp);

  const Mode& k() const { return k_; }
  const Mode& k_perp() const { return k_perp_; }

  template <class Real>
  std::vector<Real> k_vector() const {
    return {Real(k_[0]), Real(k_[1])};
  }
  template <class Real>
  std::vector<Real> k_perp_vector() const {
    return {Real(k_perp_[0]), Real(k_perp_[1])};
  }

 private:
  Mode k_;
  Mode k_perp_;
};

// phi(beta) = int_0^{2pi} k_perp . V'(theta k + beta k_perp) dtheta as a
// trigonometric polynomial in beta.
template <class Real>
TrigPoly<Real> beta_average_function(const Potential<Real>& potential,
                                     const LowerTopology& topology);

// Roots of phi in [0, 2 pi), sorted. Sign scan on scan_points nodes, then
// bisection to working precision. Throws DegenerateAverage when phi = 0.
template <class Real>
std::vector<Real> find_beta0(const Potential<Real>& potential,
                             const LowerTopology& topology,
                             int scan_points = 0);

// c = int_0^{2pi} k_perp . D^2V(theta k + beta0 k_perp) k_perp dtheta.
// Throws NondegeneracyFailure when |c| < tol (default 1e-10 Upsilon).
template <class Real>
Real nondegeneracy_constant(const Potential<Real>& potential,
                            const LowerTopology& topology, const Real& beta0,
                            std::optional<Real> tol = std::nullopt);

template <class Real>
struct KAverageEntry {
  int n = 0;
  Real value{0};  // |int k . R_n dtheta|
  Real scale{0};  // 2 pi Upsilon max_{m<n} ||g_m||
};

template <class Real>
struct LowerExpansion {
  std::vector<TrigPoly<Real>> g;       // orders 0..N, domain 1, range 2
  std::vector<std::vector<Real>> mu;   // orders 0..N
  std::vector<Real> beta;              // k_perp constant of g_n; beta[N] free (0)
  Real chosen_beta0{0};
  Real nondeg_constant{0};
  std::vector<ExpCache<Real>> caches;
  std::vector<NormLogEntry<Real>> norm_log;
  std::vector<SolveLogEntry<Real>> solve_log;
  std::vector<KAverageEntry<Real>> k_average_log;
  std::vector<std::string> warnings;

  int order() const { return static_cast<int>(g.size()) - 1; }
};

template <class Real>
struct LowerOptions {
  std::optional<Real> nondeg_tol;
};

template <class Real>
LowerExpansion<Real> expand_lower(const Potential<Real>& potential,
                                  const Frequency<Real>& freq,
                                  const LowerTopology& topology,
                                  const Real& gamma, const Real& beta0, int N,
                                  const NormParams<Real>& np,
                                  const LowerOptions<Real>& options = {});

// Defect of the lower invariance equation
//   L G - eps V'(theta k + G) - Mu + gamma eps^3 (G - G(. - omega) + omega k)
// for a summed hull G (including g_0), projected onto |j| <= degree.
template <class Real>
TrigPoly<Real> lower_defect(const Potential<Real>& potential,
                            const Frequency<Real>& freq,
                            const LowerTopology& topology, const Real& gamma,
                            const TrigPoly<Real>& G,
                            const std::vector<Real>& Mu, const Real& eps,
                            int degree);

// Sum_{n <= n_trunc} eps^n g_n and eps^n mu_n.
template <class Real>
std::pair<TrigPoly<Real>, std::vector<Real>> lower_partial_sum(
    const LowerExpansion<Real>& expansion, int n_trunc, const Real& eps);

template <class Real>
std::vector<ResidualPoint<Real>> residual_lower(
    const Potential<Real>& potential, const Frequency<Real>& freq,
    const LowerTopology& topology, const Real& gamma,
    const LowerExpansion<Real>& expansion, int n_trunc,
    std::span<const Real> eps_list, const NormParams<Real>& np);

// Projection degree used by residual_lower for a given truncation.
int lower_residual_degree(int potential_degree, const LowerTopology& topology,
                          int n_trunc);

}  // namespace lindstedt
