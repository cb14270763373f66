#pragma once

// Pointwise composition V'(hull(theta)) projected back onto Fourier modes.
// Used by the residual evaluators only.

#include <vector>

#include "lindstedt/fourier.hpp"

namespace lindstedt::detail {

// hull(theta) = base(theta) + periodic(theta) where base is theta (maximal,
// L = D) or theta k (lower, L = 1). Samples V' on a uniform grid with
// 2 * degree + 8 points per axis and returns the modes |l| <= degree.
template <class Real>
TrigPoly<Real> project_gradient(const Potential<Real>& potential,
                                const TrigPoly<Real>& periodic,
                                const Mode* line_k, int degree);

}  // namespace lindstedt::detail
