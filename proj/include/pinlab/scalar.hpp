#pragma once

// Scalar layer: every numeric routine in this library is templated on the
// scalar type. Two instantiations are supported: plain double and an
// arbitrary-precision MPFR-backed real whose working precision is set at
// runtime (in bits) before any value is created.

#include <boost/multiprecision/mpfr.hpp>
#include <Eigen/Core>

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace pinlab {

namespace mp = boost::multiprecision;

// Expression templates stay off so Real behaves like a plain scalar inside
// Eigen kernels.
using Real = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

}  // namespace pinlab

namespace Eigen {

// Boost 1.7x ships an Eigen bridge that predates Eigen 3.4 (no infinity(),
// no quiet_NaN()), so the project carries its own NumTraits.
template <>
struct NumTraits<pinlab::Real> : GenericNumTraits<pinlab::Real> {
  using Real = pinlab::Real;
  using NonInteger = pinlab::Real;
  using Literal = pinlab::Real;
  using Nested = pinlab::Real;

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 10,
    AddCost = 30,
    MulCost = 40,
  };

  static Real epsilon() { return std::numeric_limits<Real>::epsilon(); }
  static Real dummy_precision() { return epsilon() * 1000; }
  static Real highest() { return (std::numeric_limits<Real>::max)(); }
  static Real lowest() { return -(std::numeric_limits<Real>::max)(); }
  static Real infinity() { return std::numeric_limits<Real>::infinity(); }
  static Real quiet_NaN() { return std::numeric_limits<Real>::quiet_NaN(); }
  static int digits() { return std::numeric_limits<Real>::digits; }
  static int digits10() { return std::numeric_limits<Real>::digits10; }
};

}  // namespace Eigen

namespace pinlab {

inline int digits10_for_bits(unsigned bits) {
  // ceil(bits * log10(2)) plus guard digits.
  return static_cast<int>(bits * 0.3010299956639812) + 3;
}

// Sets the MPFR working precision for the calling thread. Call before
// constructing any Real.
inline void set_precision_bits(unsigned bits) {
  Real::default_precision(digits10_for_bits(bits));
}

template <class S>
inline S scalar_eps() {
  return std::numeric_limits<S>::epsilon();
}

template <class S>
inline S from_double(double x) {
  return S(x);
}

// Decimal rendering that survives a round trip at the scalar's precision.
inline std::string format_full(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string format_full(const Real& x) {
  return x.str(0, std::ios_base::scientific);
}

template <class S>
inline double to_double(const S& x) {
  return static_cast<double>(x);
}

}  // namespace pinlab
