#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lindstedt/fourier.hpp"

namespace lindstedt {

enum class FrequencyKind { kExplicit, kGoldenMean, kContinuedFraction };

// Radians convention: omega is Diophantine of type (nu, tau) when
//   2*pi / dist(m.omega, 2*pi*Z) <= nu |m|^tau   for all m != 0.
template <class Real>
struct DiophantineCertificate {
  Real nu;
  Real tau;
};

template <class Real>
class Frequency {
 public:
  explicit Frequency(std::vector<Real> omega,
                     FrequencyKind kind = FrequencyKind::kExplicit);

  // omega = 2*pi*(sqrt(5)-1)/2 at working precision.
  static Frequency golden_mean();
  // omega = 2*pi*[0; preperiod..., period, period, ...].
  static Frequency continued_fraction(const std::vector<int>& preperiod,
                                      const std::vector<int>& period);

  int dim() const { return static_cast<int>(omega_.size()); }
  const std::vector<Real>& omega() const { return omega_; }
  std::span<const Real> span() const { return omega_; }
  FrequencyKind kind() const { return kind_; }
  const std::optional<DiophantineCertificate<Real>>& certificate() const {
    return certificate_;
  }
  Frequency with_certificate(DiophantineCertificate<Real> cert) const;

 private:
  std::vector<Real> omega_;
  FrequencyKind kind_;
  std::optional<DiophantineCertificate<Real>> certificate_;
};

// m_l = 2(cos(l.omega) - 1), evaluated as -4 sin^2(l.omega / 2).
template <class Real>
Real multiplier(const Mode& ell, const Frequency<Real>& freq);

// dist(l.omega, 2*pi*Z).
template <class Real>
Real resonance_distance(const Mode& ell, const Frequency<Real>& freq);

template <class Real>
struct SolveOptions {
  std::optional<Real> zero_tol;            // default 1e-10 ||B|| (scaled)
  std::optional<Real> resonance_warn_tol;  // default 1e-8 (scaled)
};

template <class Real>
struct SolveReport {
  Real min_abs_multiplier{0};
  Mode argmin;
  bool near_resonance = false;
  Real max_inverse_multiplier{0};
  // 4 nu^{-2} (deg B)^{2 tau}, present when the frequency is certified.
  std::optional<Real> lemma_bound;
  bool lemma_bound_holds = true;
};

// Returns A with A_l = B_l / m_l (l != 0) and A_0 = 0, so that
// L_omega A = B - average(B).
template <class Real>
TrigPoly<Real> solve_zero_average(const TrigPoly<Real>& rhs,
                                  const Frequency<Real>& freq,
                                  const SolveOptions<Real>& options = {},
                                  SolveReport<Real>* report = nullptr);

// u(theta + omega) + u(theta - omega) - 2 u(theta).
template <class Real>
TrigPoly<Real> apply_L(const TrigPoly<Real>& p, const Frequency<Real>& freq);

template <class Real>
struct DiophantineProfile {
  std::vector<int> orders;          // |l| = 1 .. ell_max
  std::vector<Real> min_distance;   // min over the shell of dist(l.omega, 2piZ)
  std::vector<Mode> argmin;
  Real nu{0};
  Real tau{0};
};

// Per-shell minimal distance to resonance plus an empirical (nu, tau):
// tau from a log-log least-squares fit of the record envelope of
// 2*pi/distance, nu the smallest constant making the inequality hold on
// every probed shell.
template <class Real>
DiophantineProfile<Real> diophantine_profile(const Frequency<Real>& freq,
                                             int ell_max);

}  // namespace lindstedt
