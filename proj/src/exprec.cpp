#include "lindstedt/exprec.hpp"

#include <cmath>
#include <string>

#include "lindstedt/errors.hpp"

namespace lindstedt {

template <class Real>
ExpCache<Real>::ExpCache(Mode ell, int range_dim, ExpVariant variant,
                         Poly layer0)
    : ell_(ell), range_dim_(range_dim), variant_(variant) {
  layers_.push_back(std::move(layer0));
}

template <class Real>
ExpCache<Real> ExpCache<Real>::init_maximal(const Mode& ell, int dim) {
  return ExpCache(ell, dim, ExpVariant::kMaximal,
                  Poly::single_mode(dim, ell, {Complex<Real>(1)}));
}

template <class Real>
ExpCache<Real> ExpCache<Real>::init_lower(const Mode& ell, const Mode& k,
                                          std::span<const Real> g0) {
  using std::cos;
  using std::sin;
  const Real phase = dot(ell, g0);
  return ExpCache(ell, static_cast<int>(g0.size()), ExpVariant::kLower,
                  Poly::single_mode(1, Mode{dot(ell, k)},
                                    {Complex<Real>(cos(phase), sin(phase))}));
}

template <class Real>
const TrigPoly<Real>& ExpCache<Real>::layer(int n) const {
  if (n < 0 || n > order()) {
    throw MissingOrder("layer " + std::to_string(n) + " not computed");
  }
  return layers_[static_cast<std::size_t>(n)];
}

template <class Real>
TrigPoly<Real> ExpCache<Real>::contraction(const Poly& s) const {
  if (s.range_dim() != range_dim_) {
    throw DimensionMismatch("series range differs from the mode dimension");
  }
  std::vector<Complex<Real>> v(static_cast<std::size_t>(range_dim_));
  for (int d = 0; d < range_dim_; ++d) {
    v[static_cast<std::size_t>(d)] = Complex<Real>(Real(0), Real(ell_[d]));
  }
  return contract(s, std::span<const Complex<Real>>(v));
}

template <class Real>
TrigPoly<Real> ExpCache<Real>::next_layer(std::span<const Poly> series) const {
  const int n = order() + 1;
  if (static_cast<int>(series.size()) < n) {
    throw MissingOrder("layer " + std::to_string(n) + " needs " +
                       std::to_string(n) + " series orders, got " +
                       std::to_string(series.size()));
  }
  const Poly newest = contraction(series[static_cast<std::size_t>(n - 1)]);
  std::vector<Poly> products;
  products.reserve(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    const Poly& c = m + 1 == n ? newest
                               : contractions_[static_cast<std::size_t>(m)];
    products.push_back(
        convolve_product(c, layers_[static_cast<std::size_t>(n - 1 - m)]));
  }
  std::vector<Scaled<Real>> terms;
  terms.reserve(products.size());
  for (int m = 0; m < n; ++m) {
    terms.push_back({Complex<Real>(Real(m + 1) / Real(n)),
                     products[static_cast<std::size_t>(m)]});
  }
  return linear_combine(std::span<const Scaled<Real>>(terms));
}

template <class Real>
void ExpCache<Real>::extend(std::span<const Poly> series) {
  Poly next = next_layer(series);
  const int n = order() + 1;
  contractions_.push_back(contraction(series[static_cast<std::size_t>(n - 1)]));
  layers_.push_back(std::move(next));
}

template <class Real>
ExpCache<Real> extend(const ExpCache<Real>& cache,
                      std::span<const TrigPoly<Real>> series) {
  ExpCache<Real> out = cache;
  out.extend(series);
  return out;
}

template class ExpCache<double>;
template class ExpCache<MpReal>;
template ExpCache<double> extend(const ExpCache<double>&,
                                 std::span<const TrigPoly<double>>);
template ExpCache<MpReal> extend(const ExpCache<MpReal>&,
                                 std::span<const TrigPoly<MpReal>>);

}  // namespace lindstedt
