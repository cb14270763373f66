#include "lindstedt/maximal.hpp"

#include <algorithm>
#include <stdexcept>

#include "composite.hpp"
#include "lindstedt/errors.hpp"

namespace lindstedt {

template <class Real>
MaximalModel<Real>::MaximalModel(Potential<Real> potential_,
                                 Frequency<Real> freq_, Real gamma_,
                                 int order_)
    : potential(std::move(potential_)),
      freq(std::move(freq_)),
      gamma(std::move(gamma_)),
      order(order_) {
  if (order < 0) throw std::invalid_argument("order must be >= 0");
  if (potential.dim() != freq.dim()) {
    throw DimensionMismatch("maximal tori need dim(omega) == dim(V)");
  }
}

template <class Real>
std::vector<std::string> MaximalModel<Real>::warnings() const {
  std::vector<std::string> w;
  if (gamma == 0) {
    w.push_back(
        "ConservativeMaximal: gamma = 0, the series is expected to converge");
  }
  return w;
}

template <class Real>
MaximalExpansion<Real> start_maximal(const MaximalModel<Real>& model) {
  const int D = model.potential.dim();
  MaximalExpansion<Real> e;
  e.u.emplace_back(D, D, 0, true);
  e.mu.emplace_back(static_cast<std::size_t>(D), Real(0));
  e.norm_log.push_back({0, Real(0), Real(0), 0});
  const auto& grad = model.potential.gradient();
  for (const auto& ell : grad.modes()) {
    e.caches.push_back(ExpCache<Real>::init_maximal(ell, D));
  }
  e.warnings = model.warnings();
  return e;
}

template <class Real>
StepResult<Real> step(const MaximalModel<Real>& model,
                      const MaximalExpansion<Real>& expansion) {
  const int n = expansion.order() + 1;
  const int D = model.potential.dim();
  const auto& grad = model.potential.gradient();
  const auto& omega = model.freq.omega();

  std::vector<TrigPoly<Real>> pieces;
  for (const auto& cache : expansion.caches) {
    if (cache.order() < n - 1) {
      throw MissingOrder("cache for order " + std::to_string(n) +
                         " holds layer " + std::to_string(cache.order()));
    }
    const auto alpha = grad.coeff(cache.mode());
    pieces.push_back(outer(std::span<const Complex<Real>>(alpha),
                           cache.layer(n - 1)));
  }
  if (n == 3) {
    std::vector<Real> c(omega.size());
    for (std::size_t d = 0; d < c.size(); ++d) c[d] = -model.gamma * omega[d];
    pieces.push_back(constant_vector<Real>(D, c));
  }
  if (n >= 4 && model.gamma != 0) {
    const auto& past = expansion.u[static_cast<std::size_t>(n - 3)];
    std::vector<Real> back(omega);
    for (auto& w : back) w = -w;
    pieces.push_back(linear_combine<Real>(
        {{model.gamma, shift(past, std::span<const Real>(back))},
         {-model.gamma, past}}));
  }

  TrigPoly<Real> rhs(D, D, 0, true);
  if (!pieces.empty()) {
    std::vector<Scaled<Real>> terms;
    for (const auto& p : pieces) terms.push_back({Complex<Real>(1), p});
    rhs = enforce_real(linear_combine(std::span<const Scaled<Real>>(terms)),
                       scaled_tolerance<Real>(1e-10));
  }

  // mu_n takes every constant on the right-hand side.
  const auto avg = average(rhs);
  std::vector<Real> mu(static_cast<std::size_t>(D));
  for (int d = 0; d < D; ++d) mu[static_cast<std::size_t>(d)] = -avg[d].real();
  const auto b = rhs + constant_vector<Real>(D, mu);

  StepResult<Real> out{TrigPoly<Real>(D, D), mu, b, {}};
  out.u = solve_zero_average(b, model.freq, {}, &out.report);
  const int J = std::max(1, model.potential.degree());
  if (out.u.attained_degree() > n * J) {
    throw std::logic_error("degree law violated at order " + std::to_string(n));
  }
  return out;
}

template <class Real>
void commit(MaximalExpansion<Real>& expansion, StepResult<Real> result,
            const NormParams<Real>& np) {
  const int n = expansion.order() + 1;
  SolveLogEntry<Real> s;
  s.n = n;
  s.norm_A = norm(result.u, np);
  s.norm_B = norm(result.rhs, np);
  s.degree_B = result.rhs.attained_degree();
  s.max_inverse_multiplier = result.report.max_inverse_multiplier;
  s.near_resonance = result.report.near_resonance;
  s.lemma_bound = result.report.lemma_bound;
  expansion.solve_log.push_back(s);
  if (result.report.near_resonance) {
    expansion.warnings.push_back("NearResonance at order " + std::to_string(n));
  }
  expansion.norm_log.push_back({n, s.norm_A, euclidean(result.mu),
                                result.u.attained_degree()});
  expansion.u.push_back(std::move(result.u));
  expansion.mu.push_back(std::move(result.mu));
  // Series for the caches starts at order 1.
  std::span<const TrigPoly<Real>> series(expansion.u.data() + 1,
                                         static_cast<std::size_t>(n));
  for (auto& cache : expansion.caches) cache.extend(series);
}

template <class Real>
MaximalExpansion<Real> expand(const MaximalModel<Real>& model,
                              const NormParams<Real>& np) {
  auto e = start_maximal(model);
  for (int n = 1; n <= model.order; ++n) commit(e, step(model, e), np);
  return e;
}

template <class Real>
TrigPoly<Real> maximal_defect(const MaximalModel<Real>& model,
                              const TrigPoly<Real>& U,
                              const std::vector<Real>& Mu, const Real& eps,
                              int degree) {
  const int D = model.potential.dim();
  const auto composite =
      detail::project_gradient(model.potential, U, nullptr, degree);
  std::vector<Real> back(model.freq.omega());
  for (auto& w : back) w = -w;
  const Real ge3 = model.gamma * eps * eps * eps;
  std::vector<Real> drift(model.freq.omega());
  for (auto& w : drift) w *= ge3;
  const auto lu = apply_L(U, model.freq);
  const auto shifted = shift(U, std::span<const Real>(back));
  return linear_combine<Real>({{Real(1), lu},
                               {-eps, composite},
                               {Real(-1), constant_vector<Real>(D, Mu)},
                               {ge3, U},
                               {-ge3, shifted},
                               {Real(1), constant_vector<Real>(D, drift)}});
}

template <class Real>
std::vector<ResidualPoint<Real>> residual(
    const MaximalModel<Real>& model, const MaximalExpansion<Real>& expansion,
    int n_trunc, std::span<const Real> eps_list, const NormParams<Real>& np) {
  if (n_trunc < 0 || n_trunc > expansion.order()) {
    throw MissingOrder("truncation order exceeds the expansion");
  }
  const int D = model.potential.dim();
  const int J = std::max(1, model.potential.degree());
  const int degree = (n_trunc + 3) * J;
  const NormParams<Real> flat(Real(0), np.r);
  std::vector<ResidualPoint<Real>> out;
  for (const auto& eps : eps_list) {
    std::vector<Scaled<Real>> terms;
    std::vector<Real> mu(static_cast<std::size_t>(D), Real(0));
    Real power(1);
    for (int n = 0; n <= n_trunc; ++n) {
      terms.push_back({Complex<Real>(power), expansion.u[static_cast<std::size_t>(n)]});
      for (int d = 0; d < D; ++d) {
        mu[static_cast<std::size_t>(d)] +=
            power * expansion.mu[static_cast<std::size_t>(n)][static_cast<std::size_t>(d)];
      }
      power *= eps;
    }
    const auto U = linear_combine(std::span<const Scaled<Real>>(terms));
    const auto defect = maximal_defect(model, U, mu, eps, degree);
    out.push_back({eps, norm(defect, flat)});
  }
  return out;
}

#define LINDSTEDT_INSTANTIATE_MAXIMAL(R)                                      \
  template struct MaximalModel<R>;                                            \
  template MaximalExpansion<R> start_maximal(const MaximalModel<R>&);         \
  template StepResult<R> step(const MaximalModel<R>&,                         \
                              const MaximalExpansion<R>&);                    \
  template void commit(MaximalExpansion<R>&, StepResult<R>,                   \
                       const NormParams<R>&);                                 \
  template MaximalExpansion<R> expand(const MaximalModel<R>&,                 \
                                      const NormParams<R>&);                  \
  template TrigPoly<R> maximal_defect(const MaximalModel<R>&,                 \
                                      const TrigPoly<R>&,                     \
                                      const std::vector<R>&, const R&, int);  \
  template std::vector<ResidualPoint<R>> residual(                            \
      const MaximalModel<R>&, const MaximalExpansion<R>&, int,                \
      std::span<const R>, const NormParams<R>&);

LINDSTEDT_INSTANTIATE_MAXIMAL(double)
LINDSTEDT_INSTANTIATE_MAXIMAL(MpReal)

}  // namespace lindstedt
