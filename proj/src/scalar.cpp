#include "lindstedt/scalar.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace lindstedt {

std::string ScalarTraits<double>::to_string(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc()) throw std::runtime_error("to_chars failed");
  return std::string(buf, res.ptr);
}

double ScalarTraits<double>::from_string(std::string_view text) {
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a decimal number: " + std::string(text));
  }
  return value;
}

MpReal ScalarTraits<MpReal>::epsilon() {
  using std::ldexp;
  return ldexp(MpReal(1), 1 - bits());
}

int ScalarTraits<MpReal>::bits() {
  MpReal probe;
  return static_cast<int>(mpfr_get_prec(probe.backend().data()));
}

std::string ScalarTraits<MpReal>::to_string(const MpReal& x) {
  // str(0) asks MPFR for the shortest exact round-trip representation.
  return x.str(0, std::ios_base::scientific);
}

MpReal ScalarTraits<MpReal>::from_string(std::string_view text) {
  try {
    return MpReal(std::string(text));
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("not a decimal number: " + std::string(text));
  }
}

namespace {
unsigned digits10_for_bits(int bits) {
  return static_cast<unsigned>(std::ceil(bits * std::log10(2.0)));
}
}  // namespace

PrecisionScope::PrecisionScope(int bits)
    : saved_digits10_(MpReal::default_precision()) {
  if (bits < 24) throw std::invalid_argument("precision below 24 bits");
  MpReal::default_precision(digits10_for_bits(bits));
}

PrecisionScope::~PrecisionScope() { MpReal::default_precision(saved_digits10_); }

}  // namespace lindstedt
