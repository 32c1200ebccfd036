#pragma once

#include <cmath>

#include "doctest.h"

#include "ergo/errors.hpp"

// Expression must throw ergo::Error of the given kind.
#define CHECK_ERROR_KIND(expr, expected_kind)                                   \
  do {                                                                          \
    bool thrown_ = false;                                                       \
    try {                                                                       \
      (void)(expr);                                                             \
    } catch (const ergo::Error& e_) {                                           \
      thrown_ = true;                                                           \
      CHECK_MESSAGE(e_.kind() == (expected_kind), e_.what());                   \
    }                                                                           \
    CHECK_MESSAGE(thrown_, "expected ergo::Error of kind " << ergo::to_string(expected_kind)); \
  } while (0)

namespace oracle {

// Linear-quadratic 1-D closed forms, computed independently of the library:
// ahat K^2 + 2 D K + M = 0, stabilizing root has D + ahat K < 0.
inline double k_minus(double D, double M, double ahat) {
  const double p = 2.0 * D / ahat, q = M / ahat;
  return (-p - std::sqrt(p * p - 4.0 * q)) / 2.0;
}
inline double k_plus(double D, double M, double ahat) {
  const double p = 2.0 * D / ahat, q = M / ahat;
  return (-p + std::sqrt(p * p - 4.0 * q)) / 2.0;
}

// ou-quadratic: D = M = -1, a = ahat = 1.
inline const double kSqrt2 = std::sqrt(2.0);
inline const double kKMinus = 1.0 - kSqrt2;
inline const double kKPlus = 1.0 + kSqrt2;
inline const double kLambdaStar = 0.5 * (1.0 - kSqrt2);
inline const double kLambdaPlus = 0.5 * (1.0 + kSqrt2);

}  // namespace oracle
