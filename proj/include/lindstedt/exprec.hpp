#pragma once

#include <span>
#include <vector>

#include "lindstedt/fourier.hpp"

namespace lindstedt {

enum class ExpVariant { kMaximal, kLower };

// Layers of the epsilon expansion of e^{i l.(base + sum_n eps^n s_n)}:
//   maximal: base = theta in T^L, layer 0 = e^{i l.theta};
//   lower:   base = theta k + g0 on T^1, layer 0 = e^{i l.g0} e^{i (l.k) theta}.
// Layer n follows from layers 0..n-1 and s_1..s_n by
//   n E_n = sum_{m<n} (m+1) (i l.s_{m+1}) E_{n-1-m}.
template <class Real>
class ExpCache {
 public:
  using Poly = TrigPoly<Real>;

  static ExpCache init_maximal(const Mode& ell, int dim);
  static ExpCache init_lower(const Mode& ell, const Mode& k,
                             std::span<const Real> g0);

  const Mode& mode() const { return ell_; }
  ExpVariant variant() const { return variant_; }
  // Highest populated layer.
  int order() const { return static_cast<int>(layers_.size()) - 1; }
  const Poly& layer(int n) const;
  const std::vector<Poly>& layers() const { return layers_; }

  // Layer order()+1 from series[0..order()] (series[m] holds s_{m+1}).
  // Entries below the newest must be the ones already committed.
  Poly next_layer(std::span<const Poly> series) const;
  // Computes and appends next_layer(series).
  void extend(std::span<const Poly> series);

 private:
  ExpCache(Mode ell, int range_dim, ExpVariant variant, Poly layer0);
  Poly contraction(const Poly& s) const;

  Mode ell_;
  int range_dim_;
  ExpVariant variant_;
  std::vector<Poly> layers_;
  // i l.s_m for committed orders, index m-1.
  std::vector<Poly> contractions_;
};

template <class Real>
ExpCache<Real> extend(const ExpCache<Real>& cache,
                      std::span<const TrigPoly<Real>> series);

}  // namespace lindstedt
