#pragma once

#include <iosfwd>
#include <limits>

namespace fairmon {

/// Closed real interval [lo, hi]. Endpoints may be infinite only after a
/// division through an interval containing zero.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval point(double x) { return {x, x}; }
  static Interval unbounded() {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }

  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains_zero() const { return contains(0.0); }
  bool is_bounded() const;
  double width() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }

  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class ArithOp { add, sub, mul, div };

/// Sound interval arithmetic: for every x in lhs, y in rhs, `x op y` lies in
/// the result. Division by an interval containing zero yields the unbounded
/// interval.
Interval interval_combine(const Interval& lhs, const Interval& rhs, ArithOp op);

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
Interval operator/(const Interval& a, const Interval& b);

/// Intersection; empty intersections collapse onto the nearest endpoint of `bounds`.
Interval clip(const Interval& x, const Interval& bounds);

std::ostream& operator<<(std::ostream& os, const Interval& x);

}  // namespace fairmon
