#include "composite.hpp"

#include <cmath>

#include "lindstedt/errors.hpp"

namespace lindstedt::detail {

namespace {

template <class F>
void for_each_ball_mode(int L, int degree, F&& f) {
  Mode ell;
  auto rec = [&](auto&& self, int axis, int budget) -> void {
    if (axis == L) {
      f(ell);
      return;
    }
    for (int v = -budget; v <= budget; ++v) {
      ell[axis] = v;
      self(self, axis + 1, budget - std::abs(v));
    }
    ell[axis] = 0;
  };
  rec(rec, 0, degree);
}

}  // namespace

template <class Real>
TrigPoly<Real> project_gradient(const Potential<Real>& potential,
                                const TrigPoly<Real>& periodic,
                                const Mode* line_k, int degree) {
  using std::cos;
  using std::sin;
  const int L = periodic.domain_dim();
  const int D = potential.dim();
  if (periodic.range_dim() != D) {
    throw DimensionMismatch("hull range differs from potential dimension");
  }
  if (!line_k && L != D) {
    throw DimensionMismatch("maximal hull needs domain_dim == dim");
  }
  if (line_k && L != 1) throw DimensionMismatch("lower hull needs L = 1");

  const int M = 2 * degree + 8;
  const Real step = Real(2) * pi<Real>() / Real(M);
  // Roots of unity e^{-2 pi i j / M}.
  std::vector<Complex<Real>> roots(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) {
    roots[static_cast<std::size_t>(j)] =
        Complex<Real>(cos(step * Real(j)), -sin(step * Real(j)));
  }

  long long total = 1;
  for (int i = 0; i < L; ++i) total *= M;

  std::vector<Mode> modes;
  for_each_ball_mode(L, degree, [&](const Mode& ell) { modes.push_back(ell); });
  std::vector<typename TrigPoly<Real>::Coeff> acc(
      modes.size(),
      typename TrigPoly<Real>::Coeff(static_cast<std::size_t>(D),
                                     Complex<Real>(0)));

  std::vector<int> idx(static_cast<std::size_t>(L), 0);
  std::vector<Real> theta(static_cast<std::size_t>(L));
  std::vector<Real> q(static_cast<std::size_t>(D));
  for (long long p = 0; p < total; ++p) {
    long long rest = p;
    for (int i = 0; i < L; ++i) {
      idx[static_cast<std::size_t>(i)] = static_cast<int>(rest % M);
      rest /= M;
      theta[static_cast<std::size_t>(i)] =
          step * Real(idx[static_cast<std::size_t>(i)]);
    }
    const auto g = evaluate(periodic, std::span<const Real>(theta));
    for (int d = 0; d < D; ++d) {
      const Real base = line_k ? theta[0] * Real((*line_k)[d])
                               : theta[static_cast<std::size_t>(d)];
      q[static_cast<std::size_t>(d)] = base + g[static_cast<std::size_t>(d)].real();
    }
    const auto v = potential.gradient_at(std::span<const Real>(q));
    for (std::size_t m = 0; m < modes.size(); ++m) {
      long long phase = 0;
      for (int i = 0; i < L; ++i) {
        phase += static_cast<long long>(modes[m][i]) * idx[static_cast<std::size_t>(i)];
      }
      phase %= M;
      if (phase < 0) phase += M;
      const auto& w = roots[static_cast<std::size_t>(phase)];
      for (int d = 0; d < D; ++d) {
        acc[m][static_cast<std::size_t>(d)] += v[static_cast<std::size_t>(d)] * w;
      }
    }
  }

  typename TrigPoly<Real>::Terms terms;
  const Real inv = Real(1) / Real(total);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    for (auto& z : acc[m]) z *= inv;
    terms.emplace(modes[m], std::move(acc[m]));
  }
  return TrigPoly<Real>(L, D, degree, terms, true);
}

template TrigPoly<double> project_gradient(const Potential<double>&,
                                           const TrigPoly<double>&,
                                           const Mode*, int);
template TrigPoly<MpReal> project_gradient(const Potential<MpReal>&,
                                           const TrigPoly<MpReal>&,
                                           const Mode*, int);

}  // namespace lindstedt::detail
