#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace exdec {

using i64 = std::int64_t;
using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat make_rat(i64 num, i64 den) { return Rat(BigInt(num), BigInt(den)); }

// "num/den" with the fraction already normalized by cpp_rational.
inline std::string rat_to_string(const Rat &x) {
  return numerator(x).str() + "/" + denominator(x).str();
}

inline double rat_to_double(const Rat &x) { return x.convert_to<double>(); }

}  // namespace exdec
