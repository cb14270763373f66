#include "lindstedt/lower.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "composite.hpp"
#include "lindstedt/errors.hpp"

namespace lindstedt {

namespace {

void require_planar(const Mode& m, const char* what) {
  if (m[2] != 0 || m[3] != 0) {
    throw DimensionMismatch(std::string(what) + " must be a 2-vector");
  }
}

Mode default_perp(const Mode& k) {
  const int g = std::gcd(k[0], k[1]);
  if (g == 0) throw std::invalid_argument("winding vector k must be nonzero");
  return Mode{-k[1] / g, k[0] / g};
}

}  // namespace

LowerTopology::LowerTopology(Mode k) : LowerTopology(k, default_perp(k)) {}

LowerTopology::LowerTopology(Mode k, Mode k_perp)
    : k_(k), k_perp_(k_perp) {
  require_planar(k_, "k");
  require_planar(k_perp_, "k_perp");
  if (k_.is_zero()) throw std::invalid_argument("winding vector k must be nonzero");
  if (k_perp_.is_zero()) throw std::invalid_argument("k_perp must be nonzero");
  if (dot(k_, k_perp_) != 0) {
    throw std::invalid_argument("k and k_perp are not orthogonal");
  }
  if (std::gcd(k_perp_[0], k_perp_[1]) != 1) {
    throw std::invalid_argument("k_perp is not gcd-reduced");
  }
}

template <class Real>
TrigPoly<Real> beta_average_function(const Potential<Real>& potential,
                                     const LowerTopology& topology) {
  if (potential.dim() != 2) {
    throw DimensionMismatch("lower tori need a two-dimensional potential");
  }
  const auto& grad = potential.gradient();
  const auto kp = topology.k_perp_vector<Real>();
  const Real two_pi = Real(2) * pi<Real>();
  typename TrigPoly<Real>::Terms terms;
  int degree = 0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const Mode& ell = grad.modes()[i];
    if (dot(ell, topology.k()) != 0) continue;
    const int j = dot(ell, topology.k_perp());
    auto a = grad.coeff_at(i);
    const Complex<Real> c = two_pi * (kp[0] * a[0] + kp[1] * a[1]);
    auto& slot = terms[Mode{j}];
    if (slot.empty()) slot.assign(1, Complex<Real>(0));
    slot[0] += c;
    degree = std::max(degree, std::abs(j));
  }
  return TrigPoly<Real>(1, 1, degree, terms, true);
}

template <class Real>
std::vector<Real> find_beta0(const Potential<Real>& potential,
                             const LowerTopology& topology, int scan_points) {
  using std::abs;
  const auto phi = beta_average_function(potential, topology);
  if (phi.is_zero()) {
    throw DegenerateAverage(
        "the theta-average of k_perp . V' vanishes for every beta");
  }
  const int J = std::max(1, potential.degree());
  const int minimum = 4 * J + 4;
  if (scan_points == 0) scan_points = std::max(64, 8 * minimum);
  if (scan_points < minimum) {
    throw std::invalid_argument("scan_points must be at least 4J + 4");
  }

  const Real two_pi = Real(2) * pi<Real>();
  const auto f = [&](const Real& b) {
    std::vector<Real> pt{b};
    return evaluate(phi, std::span<const Real>(pt))[0].real();
  };
  const int max_iter = 4 * ScalarTraits<Real>::bits() + 16;

  std::vector<Real> nodes(static_cast<std::size_t>(scan_points) + 1);
  std::vector<Real> values(nodes.size());
  for (int j = 0; j <= scan_points; ++j) {
    nodes[static_cast<std::size_t>(j)] =
        j == scan_points ? two_pi : two_pi * Real(j) / Real(scan_points);
    values[static_cast<std::size_t>(j)] =
        j == scan_points ? values[0] : f(nodes[static_cast<std::size_t>(j)]);
  }

  std::vector<Real> roots;
  for (int j = 0; j < scan_points; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    if (values[sj] == 0) {
      roots.push_back(nodes[sj]);
      continue;
    }
    if (values[sj + 1] == 0 || (values[sj] < 0) == (values[sj + 1] < 0)) {
      continue;
    }
    Real lo = nodes[sj], hi = nodes[sj + 1];
    const bool lo_negative = values[sj] < 0;
    for (int it = 0; it < max_iter; ++it) {
      const Real mid = (lo + hi) / Real(2);
      if (mid == lo || mid == hi) break;
      const Real fm = f(mid);
      if (fm == 0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0) == lo_negative) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    roots.push_back((lo + hi) / Real(2));
  }

  const Real tol = Real(1024) * ScalarTraits<Real>::epsilon() * two_pi;
  for (auto& r : roots) {
    if (two_pi - r <= tol) r = Real(0);
  }
  std::sort(roots.begin(), roots.end());
  std::vector<Real> unique;
  for (const auto& r : roots) {
    if (unique.empty() || abs(r - unique.back()) > tol) unique.push_back(r);
  }
  return unique;
}

template <class Real>
Real nondegeneracy_constant(const Potential<Real>& potential,
                            const LowerTopology& topology, const Real& beta0,
                            std::optional<Real> tol) {
  using std::abs;
  if (potential.dim() != 2) {
    throw DimensionMismatch("lower tori need a two-dimensional potential");
  }
  const auto kp = topology.k_perp_vector<Real>();
  const std::vector<Complex<Real>> kpc{Complex<Real>(kp[0]),
                                       Complex<Real>(kp[1])};
  const auto hessian_kp =
      derivative(potential.gradient(), std::span<const Real>(kp));
  const auto w = contract(hessian_kp, std::span<const Complex<Real>>(kpc));
  const std::vector<Real> offset{beta0 * kp[0], beta0 * kp[1]};
  const auto line =
      restrict_to_line(w, topology.k(), std::span<const Real>(offset));
  const Real c = Real(2) * pi<Real>() * average(line)[0].real();
  const Real limit =
      tol ? *tol : scaled_tolerance<Real>(1e-10) * potential.upsilon();
  if (!(abs(c) >= limit)) {
    throw NondegeneracyFailure("nondegeneracy constant " +
                               ScalarTraits<Real>::to_string(c) +
                               " below tolerance");
  }
  return c;
}

namespace {

template <class Real>
struct OrderRhs {
  TrigPoly<Real> R;     // sum_l alpha_l F_{n-1}
  TrigPoly<Real> full;  // R plus dissipative terms
};

template <class Real>
OrderRhs<Real> build_rhs(const Potential<Real>& potential,
                         const Frequency<Real>& freq,
                         const LowerTopology& topology, const Real& gamma,
                         const std::vector<TrigPoly<Real>>& g,
                         const std::vector<const ExpCache<Real>*>& caches,
                         const std::vector<TrigPoly<Real>>& layers, int n) {
  const auto& grad = potential.gradient();
  const Real rel = scaled_tolerance<Real>(1e-10);
  std::vector<TrigPoly<Real>> pieces;
  for (std::size_t i = 0; i < caches.size(); ++i) {
    const auto alpha = grad.coeff(caches[i]->mode());
    pieces.push_back(outer(std::span<const Complex<Real>>(alpha), layers[i]));
  }
  TrigPoly<Real> R(1, 2, 0, true);
  if (!pieces.empty()) {
    std::vector<Scaled<Real>> terms;
    for (const auto& p : pieces) terms.push_back({Complex<Real>(1), p});
    R = enforce_real(linear_combine(std::span<const Scaled<Real>>(terms)), rel);
  }
  const auto kv = topology.k_vector<Real>();
  const Real w = freq.omega()[0];
  TrigPoly<Real> full = R;
  if (n == 3) {
    full = full + constant_vector<Real>(1, {-gamma * w * kv[0],
                                            -gamma * w * kv[1]});
  }
  if (n >= 4 && gamma != 0) {
    const auto& past = g[static_cast<std::size_t>(n - 3)];
    const std::vector<Real> back{-w};
    full = full + linear_combine<Real>(
                      {{gamma, shift(past, std::span<const Real>(back))},
                       {-gamma, past}});
  }
  return {R, full};
}

template <class Real>
Real projected_average(const TrigPoly<Real>& p, const std::vector<Real>& dir) {
  const auto a = average(p);
  return dir[0] * a[0].real() + dir[1] * a[1].real();
}

}  // namespace

template <class Real>
LowerExpansion<Real> expand_lower(const Potential<Real>& potential,
                                  const Frequency<Real>& freq,
                                  const LowerTopology& topology,
                                  const Real& gamma, const Real& beta0, int N,
                                  const NormParams<Real>& np,
                                  const LowerOptions<Real>& options) {
  using std::abs;
  if (potential.dim() != 2) {
    throw DimensionMismatch("lower tori need a two-dimensional potential");
  }
  if (freq.dim() != 1) throw DimensionMismatch("lower tori need one frequency");
  if (N < 0) throw std::invalid_argument("order must be >= 0");

  const Real two_pi = Real(2) * pi<Real>();
  const Real nondeg_tol =
      options.nondeg_tol ? *options.nondeg_tol
                         : scaled_tolerance<Real>(1e-10) * potential.upsilon();
  const auto kv = topology.k_vector<Real>();
  const auto kp = topology.k_perp_vector<Real>();
  const Real kk = kv[0] * kv[0] + kv[1] * kv[1];

  LowerExpansion<Real> e;
  e.chosen_beta0 = beta0;
  e.nondeg_constant =
      nondegeneracy_constant(potential, topology, beta0,
                             std::optional<Real>(nondeg_tol));
  const std::vector<Real> g0{beta0 * kp[0], beta0 * kp[1]};
  e.g.push_back(constant_vector<Real>(1, g0));
  e.mu.push_back({Real(0), Real(0)});
  e.beta.push_back(beta0);
  for (const auto& ell : potential.gradient().modes()) {
    e.caches.push_back(ExpCache<Real>::init_lower(ell, topology.k(),
                                                  std::span<const Real>(g0)));
  }
  std::vector<const ExpCache<Real>*> cache_ptrs;
  for (const auto& c : e.caches) cache_ptrs.push_back(&c);

  Real max_g_norm(0);
  for (int n = 1; n <= N; ++n) {
    if (n >= 2) {
      // Fix the k_perp constant of g_{n-1}: the k_perp-average of the
      // order-n right-hand side is affine in it.
      const auto base = e.g[static_cast<std::size_t>(n - 1)];
      Real a[2];
      for (int trial = 0; trial < 2; ++trial) {
        std::vector<TrigPoly<Real>> series(e.g.begin() + 1, e.g.end());
        series.back() = base + constant_vector<Real>(
                                   1, {Real(trial) * kp[0], Real(trial) * kp[1]});
        std::vector<TrigPoly<Real>> layers;
        for (const auto& c : e.caches) {
          layers.push_back(
              c.next_layer(std::span<const TrigPoly<Real>>(series)));
        }
        const auto rhs = build_rhs(potential, freq, topology, gamma, e.g,
                                   cache_ptrs, layers, n);
        a[trial] = projected_average(rhs.full, kp);
      }
      const Real slope = a[1] - a[0];
      if (!(two_pi * abs(slope) >= nondeg_tol)) {
        throw NondegeneracyFailure("affine equation for beta at order " +
                                   std::to_string(n - 1) + " has slope " +
                                   ScalarTraits<Real>::to_string(slope));
      }
      const Real b = -a[0] / slope;
      e.g[static_cast<std::size_t>(n - 1)] =
          base + constant_vector<Real>(1, {b * kp[0], b * kp[1]});
      e.beta[static_cast<std::size_t>(n - 1)] = b;
      std::span<const TrigPoly<Real>> series(e.g.data() + 1,
                                             static_cast<std::size_t>(n - 1));
      for (auto& c : e.caches) c.extend(series);
    }

    std::vector<TrigPoly<Real>> layers;
    for (const auto& c : e.caches) layers.push_back(c.layer(n - 1));
    const auto rhs =
        build_rhs(potential, freq, topology, gamma, e.g, cache_ptrs, layers, n);

    max_g_norm = std::max(max_g_norm,
                          norm(e.g[static_cast<std::size_t>(n - 1)], np));
    const Real k_avg = projected_average(rhs.R, kv);
    KAverageEntry<Real> ka{n, two_pi * abs(k_avg),
                           two_pi * potential.upsilon() * max_g_norm};
    e.k_average_log.push_back(ka);

    std::vector<Real> mu{Real(0), Real(0)};
    if (gamma != 0) {
      const Real s = -projected_average(rhs.full, kv) / kk;
      mu = {s * kv[0], s * kv[1]};
    } else if (ka.value > scaled_tolerance<Real>(1e-10) * ka.scale) {
      e.warnings.push_back("k-average of R_" + std::to_string(n) +
                           " does not vanish in the conservative case");
    }
    const auto full = rhs.full + constant_vector<Real>(1, mu);

    SolveReport<Real> report;
    auto gn = solve_zero_average(full, freq, {}, &report);
    SolveLogEntry<Real> s;
    s.n = n;
    s.norm_A = norm(gn, np);
    s.norm_B = norm(full, np);
    s.degree_B = full.attained_degree();
    s.max_inverse_multiplier = report.max_inverse_multiplier;
    s.near_resonance = report.near_resonance;
    s.lemma_bound = report.lemma_bound;
    e.solve_log.push_back(s);
    if (report.near_resonance) {
      e.warnings.push_back("NearResonance at order " + std::to_string(n));
    }
    const int J = std::max(1, potential.degree()) * topology.k().linf();
    if (gn.attained_degree() > n * J) {
      throw std::logic_error("degree law violated at order " +
                             std::to_string(n));
    }
    e.g.push_back(std::move(gn));
    e.mu.push_back(std::move(mu));
    e.beta.push_back(Real(0));
  }

  for (int n = 0; n <= e.order(); ++n) {
    const auto& gn = e.g[static_cast<std::size_t>(n)];
    e.norm_log.push_back({n, norm(gn, np),
                          euclidean(e.mu[static_cast<std::size_t>(n)]),
                          gn.attained_degree()});
  }
  return e;
}

template <class Real>
TrigPoly<Real> lower_defect(const Potential<Real>& potential,
                            const Frequency<Real>& freq,
                            const LowerTopology& topology, const Real& gamma,
                            const TrigPoly<Real>& G,
                            const std::vector<Real>& Mu, const Real& eps,
                            int degree) {
  const Mode k = topology.k();
  const auto kv = topology.k_vector<Real>();
  const auto composite = detail::project_gradient(potential, G, &k, degree);
  const Real w = freq.omega()[0];
  const std::vector<Real> back{-w};
  const Real ge3 = gamma * eps * eps * eps;
  const auto lg = apply_L(G, freq);
  const auto shifted = shift(G, std::span<const Real>(back));
  return linear_combine<Real>(
      {{Real(1), lg},
       {-eps, composite},
       {Real(-1), constant_vector<Real>(1, Mu)},
       {ge3, G},
       {-ge3, shifted},
       {Real(1), constant_vector<Real>(1, {ge3 * w * kv[0], ge3 * w * kv[1]})}});
}

template <class Real>
std::pair<TrigPoly<Real>, std::vector<Real>> lower_partial_sum(
    const LowerExpansion<Real>& expansion, int n_trunc, const Real& eps) {
  if (n_trunc < 0 || n_trunc > expansion.order()) {
    throw MissingOrder("truncation order exceeds the expansion");
  }
  std::vector<Scaled<Real>> terms;
  std::vector<Real> mu{Real(0), Real(0)};
  Real power(1);
  for (int n = 0; n <= n_trunc; ++n) {
    const auto sn = static_cast<std::size_t>(n);
    terms.push_back({Complex<Real>(power), expansion.g[sn]});
    mu[0] += power * expansion.mu[sn][0];
    mu[1] += power * expansion.mu[sn][1];
    power *= eps;
  }
  return {linear_combine(std::span<const Scaled<Real>>(terms)), mu};
}

int lower_residual_degree(int potential_degree, const LowerTopology& topology,
                          int n_trunc) {
  return (n_trunc + 3) * std::max(1, potential_degree) * topology.k().linf();
}

template <class Real>
std::vector<ResidualPoint<Real>> residual_lower(
    const Potential<Real>& potential, const Frequency<Real>& freq,
    const LowerTopology& topology, const Real& gamma,
    const LowerExpansion<Real>& expansion, int n_trunc,
    std::span<const Real> eps_list, const NormParams<Real>& np) {
  const int degree =
      lower_residual_degree(potential.degree(), topology, n_trunc);
  const NormParams<Real> flat(Real(0), np.r);
  std::vector<ResidualPoint<Real>> out;
  for (const auto& eps : eps_list) {
    auto [G, mu] = lower_partial_sum(expansion, n_trunc, eps);
    const auto defect =
        lower_defect(potential, freq, topology, gamma, G, mu, eps, degree);
    out.push_back({eps, norm(defect, flat)});
  }
  return out;
}

#define LINDSTEDT_INSTANTIATE_LOWER(R)                                         \
  template TrigPoly<R> beta_average_function(const Potential<R>&,              \
                                             const LowerTopology&);            \
  template std::vector<R> find_beta0(const Potential<R>&,                      \
                                     const LowerTopology&, int);               \
  template R nondegeneracy_constant(const Potential<R>&, const LowerTopology&, \
                                    const R&, std::optional<R>);               \
  template LowerExpansion<R> expand_lower(                                     \
      const Potential<R>&, const Frequency<R>&, const LowerTopology&,          \
      const R&, const R&, int, const NormParams<R>&, const LowerOptions<R>&);  \
  template TrigPoly<R> lower_defect(const Potential<R>&, const Frequency<R>&,  \
                                    const LowerTopology&, const R&,            \
                                    const TrigPoly<R>&, const std::vector<R>&, \
                                    const R&, int);                            \
  template std::pair<TrigPoly<R>, std::vector<R>> lower_partial_sum(           \
      const LowerExpansion<R>&, int, const R&);                                \
  template std::vector<ResidualPoint<R>> residual_lower(                       \
      const Potential<R>&, const Frequency<R>&, const LowerTopology&,          \
      const R&, const LowerExpansion<R>&, int, std::span<const R>,             \
      const NormParams<R>&);

LINDSTEDT_INSTANTIATE_LOWER(double)
LINDSTEDT_INSTANTIATE_LOWER(MpReal)

}  // namespace lindstedt
