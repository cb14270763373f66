#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "lindstedt/scalar.hpp"

namespace lindstedt {

// Largest supported torus / configuration dimension.
inline constexpr int kMaxDim = 4;

// Frequency index l in Z^L. Entries past the owning polynomial's domain
// dimension are zero.
struct Mode {
  std::array<int, kMaxDim> k{};

  Mode() = default;
  Mode(std::initializer_list<int> entries);
  static Mode unit(int axis, int value = 1);

  int operator[](int i) const { return k[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return k[static_cast<std::size_t>(i)]; }

  // |l| = sum of absolute entries.
  int l1() const;
  int linf() const;
  bool is_zero() const { return l1() == 0; }

  Mode operator-() const;
  friend Mode operator+(Mode a, const Mode& b);
  friend Mode operator-(Mode a, const Mode& b);
  friend auto operator<=>(const Mode&, const Mode&) = default;
};

int dot(const Mode& a, const Mode& b);

template <class Real>
Real dot(const Mode& ell, std::span<const Real> x) {
  Real s(0);
  for (std::size_t i = 0; i < x.size(); ++i) s += Real(ell.k[i]) * x[i];
  return s;
}

// Number of l in Z^L with |l| <= degree.
long long lattice_count(int domain_dim, int degree);

// Finitely supported Fourier series from the L-torus to C^D,
//   p(theta) = sum_l c_l e^{i l.theta},  |l| <= degree.
// Immutable. When is_real() the coefficients satisfy c_{-l} = conj(c_l)
// exactly; constructors enforce it by symmetrization.
template <class Real>
class TrigPoly {
 public:
  using Complex = lindstedt::Complex<Real>;
  using Coeff = std::vector<Complex>;
  using Terms = std::map<Mode, Coeff>;

  TrigPoly() : TrigPoly(1, 1) {}
  TrigPoly(int domain_dim, int range_dim, int degree = 0, bool real = true);
  TrigPoly(int domain_dim, int range_dim, int degree, const Terms& terms,
           bool real);

  static TrigPoly constant(int domain_dim, const Coeff& value, bool real);
  static TrigPoly single_mode(int domain_dim, const Mode& ell,
                              const Coeff& value);

  int domain_dim() const { return domain_dim_; }
  int range_dim() const { return range_dim_; }
  // Bookkeeping bound on |l|, not necessarily attained.
  int degree() const { return degree_; }
  // Largest |l| with a nonzero coefficient; 0 for the zero polynomial.
  int attained_degree() const;
  bool is_real() const { return real_; }
  bool is_zero() const { return modes_.empty(); }
  std::size_t size() const { return modes_.size(); }

  const std::vector<Mode>& modes() const { return modes_; }
  std::span<const Complex> coeff_at(std::size_t index) const {
    return {data_.data() + index * static_cast<std::size_t>(range_dim_),
            static_cast<std::size_t>(range_dim_)};
  }
  Coeff coeff(const Mode& ell) const;
  Complex coeff(const Mode& ell, int component) const;
  Terms terms() const;

  TrigPoly component(int index) const;
  TrigPoly with_degree(int degree) const;

 private:
  void build(const Terms& terms);
  void symmetrize(Terms& terms) const;

  int domain_dim_;
  int range_dim_;
  int degree_;
  bool real_;
  std::vector<Mode> modes_;
  std::vector<Complex> data_;
};

template <class Real>
struct NormParams {
  Real rho{0};
  Real r{0};
  NormParams() = default;
  NormParams(Real rho_, Real r_);
};

template <class Real>
struct Scaled {
  Complex<Real> scale;
  const TrigPoly<Real>& poly;
};

template <class Real>
TrigPoly<Real> linear_combine(std::span<const Scaled<Real>> terms);

template <class Real>
TrigPoly<Real> linear_combine(std::initializer_list<Scaled<Real>> terms) {
  return linear_combine(std::span<const Scaled<Real>>(terms.begin(),
                                                      terms.size()));
}

template <class Real>
TrigPoly<Real> operator+(const TrigPoly<Real>& a, const TrigPoly<Real>& b) {
  return linear_combine<Real>({{Real(1), a}, {Real(1), b}});
}

template <class Real>
TrigPoly<Real> operator-(const TrigPoly<Real>& a, const TrigPoly<Real>& b) {
  return linear_combine<Real>({{Real(1), a}, {Real(-1), b}});
}

template <class Real>
TrigPoly<Real> operator*(const Real& s, const TrigPoly<Real>& p) {
  return linear_combine<Real>({{s, p}});
}

// p scalar-valued; result has q's range dimension.
template <class Real>
TrigPoly<Real> convolve_product(const TrigPoly<Real>& p,
                                const TrigPoly<Real>& q);

// theta -> p(theta + delta).
template <class Real>
TrigPoly<Real> shift(const TrigPoly<Real>& p, std::span<const Real> delta);

// Directional derivative: coefficient at l times i(l.direction).
template <class Real>
TrigPoly<Real> derivative(const TrigPoly<Real>& p,
                          std::span<const Real> direction);
template <class Real>
TrigPoly<Real> derivative(const TrigPoly<Real>& p, int axis);

template <class Real>
typename TrigPoly<Real>::Coeff average(const TrigPoly<Real>& p);

// sqrt(|c_0|^2 + sum_{l != 0} |c_l|^2 e^{2|l|rho} (1+|l|^2)^r). Throws
// NormOverflow when a weight is not representable.
template <class Real>
Real norm(const TrigPoly<Real>& p, const NormParams<Real>& np);

template <class Real>
typename TrigPoly<Real>::Coeff evaluate(const TrigPoly<Real>& p,
                                        std::span<const Real> point);

template <class Real>
std::vector<typename TrigPoly<Real>::Coeff> evaluate_grid(
    const TrigPoly<Real>& p, const std::vector<std::vector<Real>>& points);

// Scalar polynomial sum_d v_d p_d.
template <class Real>
TrigPoly<Real> contract(const TrigPoly<Real>& p,
                        std::span<const Complex<Real>> v);

// Vector polynomial v * q for scalar q.
template <class Real>
TrigPoly<Real> outer(std::span<const Complex<Real>> v,
                     const TrigPoly<Real>& q);

// One-variable polynomial theta -> p(theta k + offset).
template <class Real>
TrigPoly<Real> restrict_to_line(const TrigPoly<Real>& p, const Mode& k,
                                std::span<const Real> offset);

// Largest |c_l - conj(c_{-l})| relative to the L2 norm of p.
template <class Real>
Real reality_defect(const TrigPoly<Real>& p);

// Marks p as real after checking reality_defect(p) <= rel_tol.
template <class Real>
TrigPoly<Real> enforce_real(const TrigPoly<Real>& p, const Real& rel_tol);

// Scalar potential V on the D-torus and its gradient
//   V'(q) = sum_l alpha_l e^{i l.q},  alpha_l = i l V_l.
template <class Real>
class Potential {
 public:
  struct Term {
    Mode mode;
    Real cos_amp;
    Real sin_amp;
  };

  explicit Potential(TrigPoly<Real> values);
  // V(q) = sum a cos(l.q) + b sin(l.q).
  static Potential from_amplitudes(int dim, const std::vector<Term>& terms);

  int dim() const { return values_.domain_dim(); }
  int degree() const { return values_.degree(); }
  const TrigPoly<Real>& values() const { return values_; }
  const TrigPoly<Real>& gradient() const { return gradient_; }
  // Upsilon = sum_l |alpha_l|.
  const Real& upsilon() const { return upsilon_; }

  // V'(q) at a point of R^D.
  std::vector<Real> gradient_at(std::span<const Real> q) const;
  Potential scaled(const Real& eta) const;

 private:
  TrigPoly<Real> values_;
  TrigPoly<Real> gradient_;
  Real upsilon_;
};

}  // namespace lindstedt
