#include "fairmon/interval.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace fairmon {

bool Interval::is_bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

namespace {

// 0 * inf is taken as 0: the finite factor is exactly zero, so every product
// realised by members of the operands is zero as well.
double safe_mul(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

Interval hull4(double a, double b, double c, double d) {
  return {std::min({a, b, c, d}), std::max({a, b, c, d})};
}

}  // namespace

Interval interval_combine(const Interval& lhs, const Interval& rhs, ArithOp op) {
  switch (op) {
    case ArithOp::add:
      return {lhs.lo + rhs.lo, lhs.hi + rhs.hi};
    case ArithOp::sub:
      return {lhs.lo - rhs.hi, lhs.hi - rhs.lo};
    case ArithOp::mul:
      return hull4(safe_mul(lhs.lo, rhs.lo), safe_mul(lhs.lo, rhs.hi), safe_mul(lhs.hi, rhs.lo),
                   safe_mul(lhs.hi, rhs.hi));
    case ArithOp::div:
      if (rhs.contains_zero() || !rhs.is_bounded() || !lhs.is_bounded()) return Interval::unbounded();
      return interval_combine(lhs, Interval{1.0 / rhs.hi, 1.0 / rhs.lo}, ArithOp::mul);
  }
  return Interval::unbounded();
}

Interval operator+(const Interval& a, const Interval& b) { return interval_combine(a, b, ArithOp::add); }
Interval operator-(const Interval& a, const Interval& b) { return interval_combine(a, b, ArithOp::sub); }
Interval operator*(const Interval& a, const Interval& b) { return interval_combine(a, b, ArithOp::mul); }
Interval operator/(const Interval& a, const Interval& b) { return interval_combine(a, b, ArithOp::div); }

Interval clip(const Interval& x, const Interval& bounds) {
  double lo = std::max(x.lo, bounds.lo);
  double hi = std::min(x.hi, bounds.hi);
  if (lo > hi) {
    // The estimate left the a-priori range entirely; report the closest edge.
    double edge = x.hi < bounds.lo ? bounds.lo : bounds.hi;
    return Interval::point(edge);
  }
  return {lo, hi};
}

std::ostream& operator<<(std::ostream& os, const Interval& x) {
  return os << '[' << x.lo << ", " << x.hi << ']';
}

}  // namespace fairmon
