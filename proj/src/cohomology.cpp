#include "lindstedt/cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lindstedt/errors.hpp"

namespace lindstedt {

template <class Real>
Frequency<Real>::Frequency(std::vector<Real> omega, FrequencyKind kind)
    : omega_(std::move(omega)), kind_(kind) {
  if (omega_.empty() || static_cast<int>(omega_.size()) > kMaxDim) {
    throw DimensionMismatch("frequency dimension must be in 1.." +
                            std::to_string(kMaxDim));
  }
  for (const auto& w : omega_) {
    if (!ScalarTraits<Real>::is_finite(w)) {
      throw std::invalid_argument("frequency entry is not finite");
    }
  }
}

template <class Real>
Frequency<Real> Frequency<Real>::golden_mean() {
  using std::sqrt;
  const Real w = pi<Real>() * (sqrt(Real(5)) - Real(1));
  return Frequency({w}, FrequencyKind::kGoldenMean);
}

template <class Real>
Frequency<Real> Frequency<Real>::continued_fraction(
    const std::vector<int>& preperiod, const std::vector<int>& period) {
  using std::sqrt;
  if (period.empty()) throw std::invalid_argument("empty period");
  for (int a : preperiod) {
    if (a < 1) throw std::invalid_argument("partial quotients must be >= 1");
  }
  for (int a : period) {
    if (a < 1) throw std::invalid_argument("partial quotients must be >= 1");
  }
  // y = [p1; p2, ..., pk, y] is the positive root of
  // M10 y^2 + (M11 - M00) y - M01 = 0 with M the product of [[a,1],[1,0]].
  Real m00(1), m01(0), m10(0), m11(1);
  for (int a : period) {
    const Real n00 = m00 * Real(a) + m01;
    const Real n10 = m10 * Real(a) + m11;
    m01 = m00;
    m11 = m10;
    m00 = n00;
    m10 = n10;
  }
  const Real b = m11 - m00;
  const Real y = (-b + sqrt(b * b + Real(4) * m10 * m01)) / (Real(2) * m10);
  Real t = y;
  for (auto it = preperiod.rbegin(); it != preperiod.rend(); ++it) {
    t = Real(*it) + Real(1) / t;
  }
  return Frequency({Real(2) * pi<Real>() / t},
                   FrequencyKind::kContinuedFraction);
}

template <class Real>
Frequency<Real> Frequency<Real>::with_certificate(
    DiophantineCertificate<Real> cert) const {
  if (!(cert.nu > Real(0)) || !(cert.tau > Real(0))) {
    throw std::invalid_argument("certificate needs nu > 0 and tau > 0");
  }
  Frequency out = *this;
  out.certificate_ = std::move(cert);
  return out;
}

template <class Real>
Real multiplier(const Mode& ell, const Frequency<Real>& freq) {
  using std::sin;
  if (ell.is_zero()) return Real(0);
  const Real s = sin(dot(ell, freq.span()) / Real(2));
  return Real(-4) * s * s;
}

template <class Real>
Real resonance_distance(const Mode& ell, const Frequency<Real>& freq) {
  using std::abs;
  using std::round;
  const Real two_pi = Real(2) * pi<Real>();
  const Real x = dot(ell, freq.span());
  return abs(x - two_pi * round(x / two_pi));
}

namespace {

// Calls f on every l in Z^L with 0 < |l| <= degree and first nonzero entry
// positive; the other half follows by l -> -l.
template <class F>
void for_each_half_mode(int L, int degree, F&& f) {
  Mode ell;
  auto rec = [&](auto&& self, int axis, int budget, bool leading) -> void {
    if (axis == L) {
      if (!leading) f(ell);
      return;
    }
    const int lo = leading ? 0 : -budget;
    for (int v = lo; v <= budget; ++v) {
      ell[axis] = v;
      self(self, axis + 1, budget - std::abs(v), leading && v == 0);
    }
    ell[axis] = 0;
  };
  rec(rec, 0, degree, true);
}

// Shell version: |l| == n exactly.
template <class F>
void for_each_half_shell(int L, int n, F&& f) {
  for_each_half_mode(L, n, [&](const Mode& ell) {
    if (ell.l1() == n) f(ell);
  });
}

template <class Real>
bool is_exact_resonance(const Mode& ell, const Frequency<Real>& freq,
                        const Real& dist) {
  using std::abs;
  const Real x = abs(dot(ell, freq.span()));
  return dist <= Real(64) * ScalarTraits<Real>::epsilon() * (Real(1) + x);
}

std::string mode_text(const Mode& ell, int L) {
  std::string s = "(";
  for (int i = 0; i < L; ++i) {
    if (i) s += ",";
    s += std::to_string(ell[i]);
  }
  return s + ")";
}

}  // namespace

template <class Real>
TrigPoly<Real> solve_zero_average(const TrigPoly<Real>& rhs,
                                  const Frequency<Real>& freq,
                                  const SolveOptions<Real>& options,
                                  SolveReport<Real>* report) {
  using std::abs;
  using std::pow;
  using std::sqrt;
  const int L = rhs.domain_dim();
  if (L != freq.dim()) {
    throw DimensionMismatch("frequency dimension differs from domain_dim");
  }

  const Real b_size = norm(rhs, NormParams<Real>());
  const Real zero_tol =
      options.zero_tol ? *options.zero_tol
                       : scaled_tolerance<Real>(1e-10) * b_size;
  const Real warn_tol = options.resonance_warn_tol
                            ? *options.resonance_warn_tol
                            : scaled_tolerance<Real>(1e-8);

  Real avg2(0);
  for (const auto& z : average(rhs)) avg2 += std::norm(z);
  if (sqrt(avg2) > zero_tol) {
    throw NonZeroAverage("right-hand side has average of size " +
                         ScalarTraits<Real>::to_string(sqrt(avg2)));
  }

  const int deg = rhs.attained_degree();
  SolveReport<Real> rep;
  bool have_min = false;
  for_each_half_mode(L, deg, [&](const Mode& ell) {
    const Real dist = resonance_distance(ell, freq);
    if (is_exact_resonance(ell, freq, dist)) {
      throw ExactResonance("l.omega in 2*pi*Z at l = " + mode_text(ell, L));
    }
    const Real m = abs(multiplier(ell, freq));
    if (!have_min || m < rep.min_abs_multiplier) {
      rep.min_abs_multiplier = m;
      rep.argmin = ell;
      have_min = true;
    }
  });
  if (have_min) {
    rep.near_resonance = rep.min_abs_multiplier < warn_tol;
    rep.max_inverse_multiplier = Real(1) / rep.min_abs_multiplier;
  }

  typename TrigPoly<Real>::Terms out;
  Real worst_inverse(0);
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    const Mode& ell = rhs.modes()[i];
    if (ell.is_zero()) continue;
    const Real inv = Real(1) / multiplier(ell, freq);
    worst_inverse = std::max(worst_inverse, Real(abs(inv)));
    auto c = rhs.coeff_at(i);
    typename TrigPoly<Real>::Coeff a(c.size());
    for (std::size_t d = 0; d < c.size(); ++d) a[d] = c[d] * inv;
    out.emplace(ell, std::move(a));
  }

  if (const auto& cert = freq.certificate(); cert && deg > 0) {
    rep.lemma_bound = Real(4) / (cert->nu * cert->nu) *
                      pow(Real(deg), Real(2) * cert->tau);
    // Coefficientwise domination implies the bound in every weighted norm.
    rep.lemma_bound_holds = worst_inverse <= *rep.lemma_bound;
  }
  if (report) *report = rep;
  return TrigPoly<Real>(L, rhs.range_dim(), rhs.degree(), out, rhs.is_real());
}

template <class Real>
TrigPoly<Real> apply_L(const TrigPoly<Real>& p, const Frequency<Real>& freq) {
  if (p.domain_dim() != freq.dim()) {
    throw DimensionMismatch("frequency dimension differs from domain_dim");
  }
  std::vector<Real> minus(freq.omega());
  for (auto& w : minus) w = -w;
  const auto fwd = shift(p, freq.span());
  const auto back = shift(p, std::span<const Real>(minus));
  return linear_combine<Real>({{Real(1), fwd}, {Real(1), back}, {Real(-2), p}});
}

template <class Real>
DiophantineProfile<Real> diophantine_profile(const Frequency<Real>& freq,
                                             int ell_max) {
  using std::log;
  using std::pow;
  if (ell_max < 1) throw std::invalid_argument("ell_max must be >= 1");
  const int L = freq.dim();
  DiophantineProfile<Real> prof;
  for (int n = 1; n <= ell_max; ++n) {
    Real best(0);
    Mode arg;
    bool first = true;
    for_each_half_shell(L, n, [&](const Mode& ell) {
      const Real dist = resonance_distance(ell, freq);
      if (is_exact_resonance(ell, freq, dist)) {
        throw ExactResonance("l.omega in 2*pi*Z at l = " + mode_text(ell, L));
      }
      if (first || dist < best) {
        best = dist;
        arg = ell;
        first = false;
      }
    });
    prof.orders.push_back(n);
    prof.min_distance.push_back(best);
    prof.argmin.push_back(arg);
  }

  // Record envelope of b(n) = 2*pi / distance.
  const Real two_pi = Real(2) * pi<Real>();
  std::vector<double> xs, ys;
  Real running(0);
  for (std::size_t i = 0; i < prof.orders.size(); ++i) {
    const Real b = two_pi / prof.min_distance[i];
    if (b > running) {
      running = b;
      xs.push_back(std::log(static_cast<double>(prof.orders[i])));
      ys.push_back(log_abs(b));
    }
  }
  double tau = 1.0;
  if (xs.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx > 0) tau = sxy / sxx;
  }
  // A non-positive slope only happens on tiny probes; fall back to tau = 1.
  if (!(tau > 0)) tau = 1.0;
  prof.tau = Real(tau);

  Real nu(0);
  for (std::size_t i = 0; i < prof.orders.size(); ++i) {
    const Real b = two_pi / prof.min_distance[i];
    nu = std::max(nu, Real(b / pow(Real(prof.orders[i]), prof.tau)));
  }
  prof.nu = nu;
  return prof;
}

#define LINDSTEDT_INSTANTIATE_COHOMOLOGY(R)                                   \
  template class Frequency<R>;                                                \
  template R multiplier(const Mode&, const Frequency<R>&);                    \
  template R resonance_distance(const Mode&, const Frequency<R>&);            \
  template TrigPoly<R> solve_zero_average(const TrigPoly<R>&,                 \
                                          const Frequency<R>&,                \
                                          const SolveOptions<R>&,             \
                                          SolveReport<R>*);                   \
  template TrigPoly<R> apply_L(const TrigPoly<R>&, const Frequency<R>&);      \
  template DiophantineProfile<R> diophantine_profile(const Frequency<R>&, int);

LINDSTEDT_INSTANTIATE_COHOMOLOGY(double)
LINDSTEDT_INSTANTIATE_COHOMOLOGY(MpReal)

}  // namespace lindstedt
