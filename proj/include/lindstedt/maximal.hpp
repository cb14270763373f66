#pragma once

#include <span>
#include <string>
#include <vector>

#include "lindstedt/cohomology.hpp"
#include "lindstedt/exprec.hpp"
#include "lindstedt/fourier.hpp"
#include "lindstedt/records.hpp"

namespace lindstedt {

// Invariance equation for a maximal torus theta + u(theta) of
//   q'' = eps V'(q) + mu - gamma eps^3 (velocity)
// written as
//   L_omega u = eps V'(theta + u) + mu - gamma eps^3 (u - u(. - omega) + omega).
template <class Real>
struct MaximalModel {
  Potential<Real> potential;
  Frequency<Real> freq;
  Real gamma{0};
  int order = 0;

  MaximalModel(Potential<Real> potential, Frequency<Real> freq, Real gamma,
               int order);
  std::vector<std::string> warnings() const;
};

template <class Real>
struct MaximalExpansion {
  std::vector<TrigPoly<Real>> u;        // orders 0..n
  std::vector<std::vector<Real>> mu;    // orders 0..n
  std::vector<ExpCache<Real>> caches;   // one per mode of V'
  std::vector<NormLogEntry<Real>> norm_log;
  std::vector<SolveLogEntry<Real>> solve_log;
  std::vector<std::string> warnings;

  int order() const { return static_cast<int>(u.size()) - 1; }
};

template <class Real>
struct StepResult {
  TrigPoly<Real> u;
  std::vector<Real> mu;
  TrigPoly<Real> rhs;  // zero-average right-hand side that was inverted
  SolveReport<Real> report;
};

// Expansion holding order 0 only (u_0 = 0, mu_0 = 0) with caches at layer 0.
template <class Real>
MaximalExpansion<Real> start_maximal(const MaximalModel<Real>& model);

// Order n = expansion.order() + 1. Caches must hold layer n - 1.
template <class Real>
StepResult<Real> step(const MaximalModel<Real>& model,
                      const MaximalExpansion<Real>& expansion);

// Appends a step result and extends the caches to layer n.
template <class Real>
void commit(MaximalExpansion<Real>& expansion, StepResult<Real> result,
            const NormParams<Real>& np);

template <class Real>
MaximalExpansion<Real> expand(const MaximalModel<Real>& model,
                              const NormParams<Real>& np);

// Pointwise defect of the invariance equation for given sums
// U = sum eps^n u_n and Mu = sum eps^n mu_n, projected onto |l| <= degree.
template <class Real>
TrigPoly<Real> maximal_defect(const MaximalModel<Real>& model,
                              const TrigPoly<Real>& U,
                              const std::vector<Real>& Mu, const Real& eps,
                              int degree);

template <class Real>
std::vector<ResidualPoint<Real>> residual(
    const MaximalModel<Real>& model, const MaximalExpansion<Real>& expansion,
    int n_trunc, std::span<const Real> eps_list, const NormParams<Real>& np);

}  // namespace lindstedt
