#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace polyshare {

/// Exact arbitrary-precision integer. All polyhedral arithmetic is exact;
/// Fourier-Motzkin combinations are reduced by content gcd to limit growth.
using Int = boost::multiprecision::cpp_int;

/// Exact rational, used for bounds and time estimates.
using Rat = boost::multiprecision::cpp_rational;

inline Int absInt(const Int &a) { return a < 0 ? Int(-a) : a; }

inline Int gcdInt(const Int &a, const Int &b) {
  return boost::multiprecision::gcd(a, b);
}

/// floor(a / b) for b > 0.
inline Int floorDiv(const Int &a, const Int &b) {
  Int q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0)))
    --q;
  return q;
}

/// ceil(a / b) for b > 0.
inline Int ceilDiv(const Int &a, const Int &b) { return -floorDiv(-a, b); }

/// Decimal rendering of a rational with a fixed number of fraction digits,
/// round-half-away-from-zero. Deterministic across platforms.
inline std::string ratToDecimal(const Rat &r, int digits = 9) {
  Int num = boost::multiprecision::numerator(r);
  Int den = boost::multiprecision::denominator(r);
  bool neg = num < 0;
  if (neg)
    num = -num;
  Int scale = 1;
  for (int i = 0; i < digits; ++i)
    scale *= 10;
  Int scaled = num * scale;
  Int q = scaled / den;
  Int rem = scaled % den;
  if (rem * 2 >= den)
    ++q;
  Int ip = q / scale, fp = q % scale;
  std::string frac = fp.str();
  frac.insert(frac.begin(), digits - static_cast<int>(frac.size()), '0');
  // trim trailing zeros but keep at least one digit
  while (frac.size() > 1 && frac.back() == '0')
    frac.pop_back();
  return (neg && (ip != 0 || fp != 0) ? "-" : "") + ip.str() + "." + frac;
}

} // namespace polyshare
