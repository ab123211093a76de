#include "boxspline/rational.hpp"

#include <cmath>

namespace boxspline {

bool rationalize(double value, long long max_den, double tol, Rational& out) {
  if (!std::isfinite(value)) return false;
  // convergents p_k / q_k of the continued fraction of value
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = value;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_f = std::floor(x);
    if (std::abs(a_f) > 9.0e15) break;
    const auto a = static_cast<long long>(a_f);
    const __int128 p2 = static_cast<__int128>(a) * p1 + p0;
    const __int128 q2 = static_cast<__int128>(a) * q1 + q0;
    if (q2 > max_den || p2 > INT64_MAX || p2 < -INT64_MAX) break;
    p0 = p1;
    q0 = q1;
    p1 = static_cast<long long>(p2);
    q1 = static_cast<long long>(q2);
    if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - value) <= tol) {
      out = Rational(p1, q1);
      return true;
    }
    const double frac = x - a_f;
    if (frac < 1e-300) break;
    x = 1.0 / frac;
  }
  return false;
}

}  // namespace boxspline
