#pragma once

#include <cmath>
#include <limits>

#include "fairmon/interval.hpp"

namespace fairmon {

/// Monitor output after one event.
struct Verdict {
  enum class Kind { inconclusive, bounded, unbounded };

  Kind kind = Kind::inconclusive;
  Interval interval = Interval::unbounded();
  /// Point estimate; NaN when there is none.
  double point = std::numeric_limits<double>::quiet_NaN();

  static Verdict inconclusive() { return {}; }
  static Verdict unbounded(double point = std::numeric_limits<double>::quiet_NaN()) {
    return {Kind::unbounded, Interval::unbounded(), point};
  }
  static Verdict bounded(Interval iv, double point) { return {Kind::bounded, iv, point}; }

  bool is_bounded() const { return kind == Kind::bounded; }
  bool is_inconclusive() const { return kind == Kind::inconclusive; }

  /// True unless the verdict is a bounded interval that excludes `x`. An
  /// inconclusive verdict makes no claim, so it cannot be wrong.
  bool consistent_with(double x) const { return kind != Kind::bounded || interval.contains(x); }
};

inline const char* to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::bounded: return "ok";
    case Verdict::Kind::unbounded: return "unbounded";
    default: return "inconclusive";
  }
}

}  // namespace fairmon
