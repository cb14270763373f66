#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <string_view>

#include <boost/multiprecision/mpfr.hpp>

namespace lindstedt {

// Software high-precision real with a runtime bit count. Expression templates
// are disabled so the type composes with std::complex.
using MpReal = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<0>,
    boost::multiprecision::et_off>;

template <class Real>
using Complex = std::complex<Real>;

template <class Real>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static double epsilon() { return std::numeric_limits<double>::epsilon(); }
  static int bits() { return std::numeric_limits<double>::digits; }
  static bool is_finite(double x) { return std::isfinite(x); }
  static double to_double(double x) { return x; }
  static std::string to_string(double x);
  static double from_string(std::string_view text);
};

template <>
struct ScalarTraits<MpReal> {
  static MpReal epsilon();
  static int bits();
  static bool is_finite(const MpReal& x) {
    return boost::multiprecision::isfinite(x);
  }
  static double to_double(const MpReal& x) { return x.convert_to<double>(); }
  static std::string to_string(const MpReal& x);
  static MpReal from_string(std::string_view text);
};

template <class Real>
Real pi() {
  using std::acos;
  return acos(Real(-1));
}

template <class Real>
double to_double(const Real& x) {
  return ScalarTraits<Real>::to_double(x);
}

// Ratio between the working epsilon and the binary64 epsilon. Tolerances that
// are quoted for binary64 are multiplied by this factor.
template <class Real>
Real precision_scale() {
  return ScalarTraits<Real>::epsilon() /
         Real(std::numeric_limits<double>::epsilon());
}

template <class Real>
Real scaled_tolerance(double binary64_tol) {
  return Real(binary64_tol) * precision_scale<Real>();
}

// Natural log of |x| computed in the working type, returned as double. Safe
// for magnitudes outside the binary64 range.
template <class Real>
double log_abs(const Real& x) {
  using std::abs;
  using std::log;
  return to_double(Real(log(abs(x))));
}

// Sets the default MpReal precision for its lifetime. Values created inside
// the scope carry that precision.
class PrecisionScope {
 public:
  explicit PrecisionScope(int bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_digits10_;
};

}  // namespace lindstedt
