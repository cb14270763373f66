#include "lindstedt/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "lindstedt/errors.hpp"

namespace lindstedt {

Mode::Mode(std::initializer_list<int> entries) {
  if (entries.size() > static_cast<std::size_t>(kMaxDim)) {
    throw DimensionMismatch("mode has more than kMaxDim entries");
  }
  std::copy(entries.begin(), entries.end(), k.begin());
}

Mode Mode::unit(int axis, int value) {
  Mode m;
  m[axis] = value;
  return m;
}

int Mode::l1() const {
  int s = 0;
  for (int v : k) s += std::abs(v);
  return s;
}

int Mode::linf() const {
  int s = 0;
  for (int v : k) s = std::max(s, std::abs(v));
  return s;
}

Mode Mode::operator-() const {
  Mode m;
  for (int i = 0; i < kMaxDim; ++i) m[i] = -k[static_cast<std::size_t>(i)];
  return m;
}

Mode operator+(Mode a, const Mode& b) {
  for (int i = 0; i < kMaxDim; ++i) a[i] += b[i];
  return a;
}

Mode operator-(Mode a, const Mode& b) {
  for (int i = 0; i < kMaxDim; ++i) a[i] -= b[i];
  return a;
}

int dot(const Mode& a, const Mode& b) {
  int s = 0;
  for (int i = 0; i < kMaxDim; ++i) s += a[i] * b[i];
  return s;
}

long long lattice_count(int domain_dim, int degree) {
  // sum_i 2^i C(L,i) C(J,i)
  long long total = 0;
  long long c_l = 1;
  long long c_j = 1;
  long long pow2 = 1;
  for (int i = 0; i <= std::min(domain_dim, degree); ++i) {
    total += pow2 * c_l * c_j;
    c_l = c_l * (domain_dim - i) / (i + 1);
    c_j = c_j * (degree - i) / (i + 1);
    pow2 *= 2;
  }
  return total;
}

namespace {

template <class Real>
bool is_zero_coeff(std::span<const Complex<Real>> c) {
  for (const auto& z : c) {
    if (z.real() != 0 || z.imag() != 0) return false;
  }
  return true;
}

void check_mode(const Mode& ell, int domain_dim, int degree) {
  for (int i = domain_dim; i < kMaxDim; ++i) {
    if (ell[i] != 0) throw DimensionMismatch("mode outside the domain");
  }
  if (ell.l1() > degree) {
    throw DimensionMismatch("mode |l| = " + std::to_string(ell.l1()) +
                            " exceeds degree " + std::to_string(degree));
  }
}

template <class Real>
void require_same_shape(const TrigPoly<Real>& a, const TrigPoly<Real>& b) {
  if (a.domain_dim() != b.domain_dim() || a.range_dim() != b.range_dim()) {
    throw DimensionMismatch("polynomial shapes differ");
  }
}

}  // namespace

template <class Real>
TrigPoly<Real>::TrigPoly(int domain_dim, int range_dim, int degree, bool real)
    : domain_dim_(domain_dim),
      range_dim_(range_dim),
      degree_(degree),
      real_(real) {
  if (domain_dim < 1 || domain_dim > kMaxDim || range_dim < 1 || degree < 0) {
    throw DimensionMismatch("invalid polynomial shape");
  }
}

template <class Real>
TrigPoly<Real>::TrigPoly(int domain_dim, int range_dim, int degree,
                         const Terms& terms, bool real)
    : TrigPoly(domain_dim, range_dim, degree, real) {
  build(terms);
}

template <class Real>
void TrigPoly<Real>::symmetrize(Terms& terms) const {
  // c_l <- (c_l + conj(c_{-l})) / 2 is exactly conjugate-symmetric in
  // floating point and leaves already symmetric input unchanged. A mode given
  // on one side only supplies its own partner.
  const auto D = static_cast<std::size_t>(range_dim_);
  Terms out;
  const auto visit = [&](const Mode& ell) {
    if (out.count(ell)) return;
    auto pos = terms.find(ell);
    auto neg = terms.find(-ell);
    Coeff c(D);
    for (std::size_t d = 0; d < D; ++d) {
      if (neg == terms.end()) {
        c[d] = pos->second[d];
      } else if (pos == terms.end()) {
        c[d] = std::conj(neg->second[d]);
      } else {
        c[d] = (pos->second[d] + std::conj(neg->second[d])) / Real(2);
      }
    }
    out.emplace(ell, std::move(c));
  };
  for (const auto& entry : terms) {
    visit(entry.first);
    visit(-entry.first);
  }
  terms.swap(out);
}

template <class Real>
void TrigPoly<Real>::build(const Terms& input) {
  Terms terms = input;
  for (const auto& [ell, c] : terms) {
    check_mode(ell, domain_dim_, degree_);
    if (static_cast<int>(c.size()) != range_dim_) {
      throw DimensionMismatch("coefficient length differs from range_dim");
    }
  }
  if (real_) symmetrize(terms);
  modes_.clear();
  data_.clear();
  modes_.reserve(terms.size());
  data_.reserve(terms.size() * static_cast<std::size_t>(range_dim_));
  for (const auto& [ell, c] : terms) {
    if (is_zero_coeff<Real>(c)) continue;
    modes_.push_back(ell);
    data_.insert(data_.end(), c.begin(), c.end());
  }
}

template <class Real>
TrigPoly<Real> TrigPoly<Real>::constant(int domain_dim, const Coeff& value,
                                        bool real) {
  Terms t;
  t.emplace(Mode{}, value);
  return TrigPoly(domain_dim, static_cast<int>(value.size()), 0, t, real);
}

template <class Real>
TrigPoly<Real> TrigPoly<Real>::single_mode(int domain_dim, const Mode& ell,
                                           const Coeff& value) {
  Terms t;
  t.emplace(ell, value);
  return TrigPoly(domain_dim, static_cast<int>(value.size()), ell.l1(), t,
                  false);
}

template <class Real>
int TrigPoly<Real>::attained_degree() const {
  int d = 0;
  for (const auto& m : modes_) d = std::max(d, m.l1());
  return d;
}

template <class Real>
typename TrigPoly<Real>::Coeff TrigPoly<Real>::coeff(const Mode& ell) const {
  auto it = std::lower_bound(modes_.begin(), modes_.end(), ell);
  if (it == modes_.end() || *it != ell) {
    return Coeff(static_cast<std::size_t>(range_dim_), Complex(0));
  }
  auto c = coeff_at(static_cast<std::size_t>(it - modes_.begin()));
  return Coeff(c.begin(), c.end());
}

template <class Real>
typename TrigPoly<Real>::Complex TrigPoly<Real>::coeff(const Mode& ell,
                                                      int component) const {
  auto it = std::lower_bound(modes_.begin(), modes_.end(), ell);
  if (it == modes_.end() || *it != ell) return Complex(0);
  return coeff_at(static_cast<std::size_t>(it - modes_.begin()))
      [static_cast<std::size_t>(component)];
}

template <class Real>
typename TrigPoly<Real>::Terms TrigPoly<Real>::terms() const {
  Terms t;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    auto c = coeff_at(i);
    t.emplace(modes_[i], Coeff(c.begin(), c.end()));
  }
  return t;
}

template <class Real>
TrigPoly<Real> TrigPoly<Real>::component(int index) const {
  if (index < 0 || index >= range_dim_) {
    throw DimensionMismatch("component index out of range");
  }
  Terms t;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    t.emplace(modes_[i], Coeff{coeff_at(i)[static_cast<std::size_t>(index)]});
  }
  return TrigPoly(domain_dim_, 1, degree_, t, real_);
}

template <class Real>
TrigPoly<Real> TrigPoly<Real>::with_degree(int degree) const {
  TrigPoly out = *this;
  if (degree < attained_degree()) {
    throw DimensionMismatch("degree bound below attained degree");
  }
  out.degree_ = degree;
  return out;
}

template <class Real>
NormParams<Real>::NormParams(Real rho_, Real r_)
    : rho(std::move(rho_)), r(std::move(r_)) {
  if (rho < 0 || r < 0) {
    throw std::invalid_argument("norm parameters must be non-negative");
  }
}

template <class Real>
TrigPoly<Real> linear_combine(std::span<const Scaled<Real>> terms) {
  if (terms.empty()) throw DimensionMismatch("empty linear combination");
  const auto& first = terms.front().poly;
  int degree = 0;
  bool real = true;
  for (const auto& t : terms) {
    require_same_shape(first, t.poly);
    degree = std::max(degree, t.poly.degree());
    real = real && t.poly.is_real() && t.scale.imag() == 0;
  }
  typename TrigPoly<Real>::Terms acc;
  const auto D = static_cast<std::size_t>(first.range_dim());
  for (const auto& t : terms) {
    for (std::size_t i = 0; i < t.poly.size(); ++i) {
      auto& slot = acc[t.poly.modes()[i]];
      if (slot.empty()) slot.assign(D, Complex<Real>(0));
      auto c = t.poly.coeff_at(i);
      for (std::size_t d = 0; d < D; ++d) slot[d] += t.scale * c[d];
    }
  }
  return TrigPoly<Real>(first.domain_dim(), first.range_dim(), degree, acc,
                        real);
}

namespace {

// Dense accumulation is used when both factors fill more than half of their
// |l| <= degree lattice and the box [-deg, deg]^L stays small.
constexpr long long kMaxDenseBox = 1LL << 22;

template <class Real>
bool prefer_dense(const TrigPoly<Real>& p, const TrigPoly<Real>& q,
                  long long box) {
  if (box > kMaxDenseBox) return false;
  const auto fill = [](const TrigPoly<Real>& a) {
    return 2 * static_cast<long long>(a.size()) >
           lattice_count(a.domain_dim(), a.degree());
  };
  return fill(p) && fill(q);
}

}  // namespace

template <class Real>
TrigPoly<Real> convolve_product(const TrigPoly<Real>& p,
                                const TrigPoly<Real>& q) {
  if (p.range_dim() != 1) throw DimensionMismatch("left factor must be scalar");
  if (p.domain_dim() != q.domain_dim()) {
    throw DimensionMismatch("domain dimensions differ");
  }
  const int L = q.domain_dim();
  const int degree = p.degree() + q.degree();
  const bool real = p.is_real() && q.is_real();
  const auto D = static_cast<std::size_t>(q.range_dim());
  using Cx = Complex<Real>;

  long long side = 2LL * degree + 1;
  long long box = 1;
  for (int i = 0; i < L && box <= kMaxDenseBox; ++i) box *= side;

  typename TrigPoly<Real>::Terms out;
  if (prefer_dense(p, q, box)) {
    std::vector<Cx> buf(static_cast<std::size_t>(box) * D, Cx(0));
    std::vector<char> touched(static_cast<std::size_t>(box), 0);
    const auto index = [&](const Mode& m) {
      long long idx = 0;
      for (int i = L - 1; i >= 0; --i) idx = idx * side + (m[i] + degree);
      return static_cast<std::size_t>(idx);
    };
    for (std::size_t a = 0; a < p.size(); ++a) {
      const Cx pa = p.coeff_at(a)[0];
      for (std::size_t b = 0; b < q.size(); ++b) {
        const std::size_t idx = index(p.modes()[a] + q.modes()[b]);
        touched[idx] = 1;
        auto qb = q.coeff_at(b);
        for (std::size_t d = 0; d < D; ++d) buf[idx * D + d] += pa * qb[d];
      }
    }
    for (std::size_t idx = 0; idx < touched.size(); ++idx) {
      if (!touched[idx]) continue;
      Mode m;
      long long rem = static_cast<long long>(idx);
      for (int i = 0; i < L; ++i) {
        m[i] = static_cast<int>(rem % side) - degree;
        rem /= side;
      }
      out.emplace(m, typename TrigPoly<Real>::Coeff(
                         buf.begin() + static_cast<std::ptrdiff_t>(idx * D),
                         buf.begin() + static_cast<std::ptrdiff_t>((idx + 1) * D)));
    }
  } else {
    for (std::size_t a = 0; a < p.size(); ++a) {
      const Cx pa = p.coeff_at(a)[0];
      for (std::size_t b = 0; b < q.size(); ++b) {
        auto& slot = out[p.modes()[a] + q.modes()[b]];
        if (slot.empty()) slot.assign(D, Cx(0));
        auto qb = q.coeff_at(b);
        for (std::size_t d = 0; d < D; ++d) slot[d] += pa * qb[d];
      }
    }
  }
  return TrigPoly<Real>(L, q.range_dim(), degree, out, real);
}

namespace {

template <class Real, class Factor>
TrigPoly<Real> map_coefficients(const TrigPoly<Real>& p, bool real,
                                Factor&& factor) {
  typename TrigPoly<Real>::Terms t;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Complex<Real> f = factor(p.modes()[i]);
    auto c = p.coeff_at(i);
    typename TrigPoly<Real>::Coeff out(c.size());
    for (std::size_t d = 0; d < c.size(); ++d) out[d] = f * c[d];
    t.emplace(p.modes()[i], std::move(out));
  }
  return TrigPoly<Real>(p.domain_dim(), p.range_dim(), p.degree(), t, real);
}

}  // namespace

template <class Real>
TrigPoly<Real> shift(const TrigPoly<Real>& p, std::span<const Real> delta) {
  if (static_cast<int>(delta.size()) != p.domain_dim()) {
    throw DimensionMismatch("shift vector length differs from domain_dim");
  }
  return map_coefficients(p, p.is_real(), [&](const Mode& ell) {
    using std::cos;
    using std::sin;
    const Real phase = dot(ell, delta);
    return Complex<Real>(cos(phase), sin(phase));
  });
}

template <class Real>
TrigPoly<Real> derivative(const TrigPoly<Real>& p,
                          std::span<const Real> direction) {
  if (static_cast<int>(direction.size()) != p.domain_dim()) {
    throw DimensionMismatch("direction length differs from domain_dim");
  }
  return map_coefficients(p, p.is_real(), [&](const Mode& ell) {
    return Complex<Real>(Real(0), dot(ell, direction));
  });
}

template <class Real>
TrigPoly<Real> derivative(const TrigPoly<Real>& p, int axis) {
  std::vector<Real> dir(static_cast<std::size_t>(p.domain_dim()), Real(0));
  dir.at(static_cast<std::size_t>(axis)) = Real(1);
  return derivative(p, std::span<const Real>(dir));
}

template <class Real>
typename TrigPoly<Real>::Coeff average(const TrigPoly<Real>& p) {
  return p.coeff(Mode{});
}

template <class Real>
Real norm(const TrigPoly<Real>& p, const NormParams<Real>& np) {
  using std::exp;
  using std::pow;
  using std::sqrt;
  Real total(0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    Real mag2(0);
    for (const auto& z : p.coeff_at(i)) mag2 += std::norm(z);
    const int l1 = p.modes()[i].l1();
    if (l1 != 0) {
      const Real weight =
          exp(Real(2 * l1) * np.rho) * pow(Real(1 + l1 * l1), np.r);
      if (!ScalarTraits<Real>::is_finite(weight)) {
        throw NormOverflow("norm weight overflows at |l| = " +
                           std::to_string(l1));
      }
      mag2 *= weight;
    }
    total += mag2;
  }
  if (!ScalarTraits<Real>::is_finite(total)) {
    throw NormOverflow("norm overflows");
  }
  return sqrt(total);
}

template <class Real>
typename TrigPoly<Real>::Coeff evaluate(const TrigPoly<Real>& p,
                                        std::span<const Real> point) {
  using std::cos;
  using std::sin;
  if (static_cast<int>(point.size()) != p.domain_dim()) {
    throw DimensionMismatch("point length differs from domain_dim");
  }
  typename TrigPoly<Real>::Coeff value(static_cast<std::size_t>(p.range_dim()),
                                       Complex<Real>(0));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Real phase = dot(p.modes()[i], point);
    const Complex<Real> e(cos(phase), sin(phase));
    auto c = p.coeff_at(i);
    for (std::size_t d = 0; d < value.size(); ++d) value[d] += c[d] * e;
  }
  return value;
}

template <class Real>
std::vector<typename TrigPoly<Real>::Coeff> evaluate_grid(
    const TrigPoly<Real>& p, const std::vector<std::vector<Real>>& points) {
  std::vector<typename TrigPoly<Real>::Coeff> out;
  out.reserve(points.size());
  for (const auto& pt : points) {
    out.push_back(evaluate(p, std::span<const Real>(pt)));
  }
  return out;
}

template <class Real>
TrigPoly<Real> contract(const TrigPoly<Real>& p,
                        std::span<const Complex<Real>> v) {
  if (static_cast<int>(v.size()) != p.range_dim()) {
    throw DimensionMismatch("contraction vector length differs from range_dim");
  }
  bool real_vector = true;
  for (const auto& z : v) real_vector = real_vector && z.imag() == 0;
  typename TrigPoly<Real>::Terms t;
  for (std::size_t i = 0; i < p.size(); ++i) {
    Complex<Real> s(0);
    auto c = p.coeff_at(i);
    for (std::size_t d = 0; d < c.size(); ++d) s += v[d] * c[d];
    t.emplace(p.modes()[i], typename TrigPoly<Real>::Coeff{s});
  }
  return TrigPoly<Real>(p.domain_dim(), 1, p.degree(), t,
                        p.is_real() && real_vector);
}

template <class Real>
TrigPoly<Real> outer(std::span<const Complex<Real>> v,
                     const TrigPoly<Real>& q) {
  if (q.range_dim() != 1) throw DimensionMismatch("outer needs scalar q");
  bool real_vector = true;
  for (const auto& z : v) real_vector = real_vector && z.imag() == 0;
  typename TrigPoly<Real>::Terms t;
  for (std::size_t i = 0; i < q.size(); ++i) {
    typename TrigPoly<Real>::Coeff c(v.size());
    for (std::size_t d = 0; d < v.size(); ++d) c[d] = v[d] * q.coeff_at(i)[0];
    t.emplace(q.modes()[i], std::move(c));
  }
  return TrigPoly<Real>(q.domain_dim(), static_cast<int>(v.size()), q.degree(),
                        t, q.is_real() && real_vector);
}

template <class Real>
TrigPoly<Real> restrict_to_line(const TrigPoly<Real>& p, const Mode& k,
                                std::span<const Real> offset) {
  using std::cos;
  using std::sin;
  if (static_cast<int>(offset.size()) != p.domain_dim()) {
    throw DimensionMismatch("offset length differs from domain_dim");
  }
  typename TrigPoly<Real>::Terms t;
  const auto D = static_cast<std::size_t>(p.range_dim());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Mode& ell = p.modes()[i];
    const Real phase = dot(ell, offset);
    const Complex<Real> e(cos(phase), sin(phase));
    auto& slot = t[Mode{dot(ell, k)}];
    if (slot.empty()) slot.assign(D, Complex<Real>(0));
    auto c = p.coeff_at(i);
    for (std::size_t d = 0; d < D; ++d) slot[d] += e * c[d];
  }
  return TrigPoly<Real>(1, p.range_dim(), p.degree() * k.linf(), t,
                        p.is_real());
}

template <class Real>
Real reality_defect(const TrigPoly<Real>& p) {
  using std::sqrt;
  Real worst(0);
  Real total(0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto c = p.coeff_at(i);
    auto partner = p.coeff(-p.modes()[i]);
    Real dev(0);
    for (std::size_t d = 0; d < c.size(); ++d) {
      dev += std::norm(c[d] - std::conj(partner[d]));
      total += std::norm(c[d]);
    }
    if (dev > worst) worst = dev;
  }
  if (total == 0) return Real(0);
  return sqrt(worst / total);
}

template <class Real>
TrigPoly<Real> enforce_real(const TrigPoly<Real>& p, const Real& rel_tol) {
  const Real defect = reality_defect(p);
  if (defect > rel_tol) {
    throw LindstedtError("polynomial is not real: defect " +
                         ScalarTraits<Real>::to_string(defect));
  }
  return TrigPoly<Real>(p.domain_dim(), p.range_dim(), p.degree(), p.terms(),
                        true);
}

template <class Real>
Potential<Real>::Potential(TrigPoly<Real> values)
    : values_(std::move(values)), upsilon_(0) {
  using std::sqrt;
  if (values_.range_dim() != 1) {
    throw DimensionMismatch("potential must be scalar-valued");
  }
  if (!values_.is_real()) throw LindstedtError("potential must be real");
  const auto D = static_cast<std::size_t>(values_.domain_dim());
  typename TrigPoly<Real>::Terms grad;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const Mode& ell = values_.modes()[i];
    if (ell.is_zero()) continue;
    const Complex<Real> v = values_.coeff_at(i)[0];
    typename TrigPoly<Real>::Coeff alpha(D);
    Real mag2(0);
    for (std::size_t d = 0; d < D; ++d) {
      alpha[d] = Complex<Real>(Real(0), Real(ell.k[d])) * v;
      mag2 += std::norm(alpha[d]);
    }
    upsilon_ += sqrt(mag2);
    grad.emplace(ell, std::move(alpha));
  }
  gradient_ = TrigPoly<Real>(values_.domain_dim(), values_.domain_dim(),
                             values_.degree(), grad, true);
}

template <class Real>
Potential<Real> Potential<Real>::from_amplitudes(int dim,
                                                 const std::vector<Term>& terms) {
  typename TrigPoly<Real>::Terms t;
  int degree = 0;
  const Complex<Real> zero(0);
  for (const auto& term : terms) {
    if (term.mode.is_zero()) continue;  // constants do not affect V'
    degree = std::max(degree, term.mode.l1());
    auto& pos = t[term.mode];
    auto& neg = t[-term.mode];
    if (pos.empty()) pos.assign(1, zero);
    if (neg.empty()) neg.assign(1, zero);
    // a cos x + b sin x = (a/2 - i b/2) e^{ix} + (a/2 + i b/2) e^{-ix}
    pos[0] += Complex<Real>(term.cos_amp / 2, -term.sin_amp / 2);
    neg[0] += Complex<Real>(term.cos_amp / 2, term.sin_amp / 2);
  }
  return Potential(TrigPoly<Real>(dim, 1, degree, t, true));
}

template <class Real>
std::vector<Real> Potential<Real>::gradient_at(std::span<const Real> q) const {
  auto v = evaluate(gradient_, q);
  std::vector<Real> out(v.size());
  for (std::size_t d = 0; d < v.size(); ++d) out[d] = v[d].real();
  return out;
}

template <class Real>
Potential<Real> Potential<Real>::scaled(const Real& eta) const {
  return Potential(eta * values_);
}

#define LINDSTEDT_INSTANTIATE_FOURIER(R)                                       \
  template class TrigPoly<R>;                                                  \
  template struct NormParams<R>;                                               \
  template class Potential<R>;                                                 \
  template TrigPoly<R> linear_combine(std::span<const Scaled<R>>);             \
  template TrigPoly<R> convolve_product(const TrigPoly<R>&,                    \
                                        const TrigPoly<R>&);                   \
  template TrigPoly<R> shift(const TrigPoly<R>&, std::span<const R>);          \
  template TrigPoly<R> derivative(const TrigPoly<R>&, std::span<const R>);     \
  template TrigPoly<R> derivative(const TrigPoly<R>&, int);                    \
  template TrigPoly<R>::Coeff average(const TrigPoly<R>&);                     \
  template R norm(const TrigPoly<R>&, const NormParams<R>&);                   \
  template TrigPoly<R>::Coeff evaluate(const TrigPoly<R>&, std::span<const R>); \
  template std::vector<TrigPoly<R>::Coeff> evaluate_grid(                      \
      const TrigPoly<R>&, const std::vector<std::vector<R>>&);                 \
  template TrigPoly<R> contract(const TrigPoly<R>&,                            \
                                std::span<const Complex<R>>);                  \
  template TrigPoly<R> outer(std::span<const Complex<R>>, const TrigPoly<R>&); \
  template TrigPoly<R> restrict_to_line(const TrigPoly<R>&, const Mode&,       \
                                        std::span<const R>);                   \
  template R reality_defect(const TrigPoly<R>&);                               \
  template TrigPoly<R> enforce_real(const TrigPoly<R>&, const R&);

LINDSTEDT_INSTANTIATE_FOURIER(double)
LINDSTEDT_INSTANTIATE_FOURIER(MpReal)

}  // namespace lindstedt
