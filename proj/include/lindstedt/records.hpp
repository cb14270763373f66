#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lindstedt/fourier.hpp"

namespace lindstedt {

template <class Real>
struct NormLogEntry {
  int n = 0;
  Real norm{0};    // ||u_n||_{rho,r} or ||g_n||_{rho,r}
  Real mu_abs{0};  // Euclidean length of mu_n
  int attained_degree = 0;
};

// One cohomology solve L A = B at order n.
template <class Real>
struct SolveLogEntry {
  int n = 0;
  Real norm_A{0};
  Real norm_B{0};
  int degree_B = 0;
  Real max_inverse_multiplier{0};
  bool near_resonance = false;
  std::optional<Real> lemma_bound;
};

template <class Real>
struct ResidualPoint {
  Real eps{0};
  Real value{0};
};

// Constant vector polynomial on T^L.
template <class Real>
TrigPoly<Real> constant_vector(int domain_dim, const std::vector<Real>& v) {
  typename TrigPoly<Real>::Coeff c(v.size());
  for (std::size_t d = 0; d < v.size(); ++d) c[d] = Complex<Real>(v[d]);
  return TrigPoly<Real>::constant(domain_dim, c, true);
}

template <class Real>
Real euclidean(const std::vector<Real>& v) {
  using std::sqrt;
  Real s(0);
  for (const auto& x : v) s += x * x;
  return sqrt(s);
}

}  // namespace lindstedt
