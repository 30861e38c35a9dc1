#pragma once

#include <algorithm>

namespace anderson {

/// Closed real interval [lo, hi]. Used for supports, spectra and probe windows.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  double midpoint() const noexcept { return 0.5 * (lo + hi); }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  bool contains(const Interval& other) const noexcept {
    return lo <= other.lo && other.hi <= hi;
  }
  /// True when `other` lies in the open interior (lo, hi).
  bool strictly_contains(const Interval& other) const noexcept {
    return lo < other.lo && other.hi < hi;
  }
  Interval shifted(double c) const noexcept { return {lo + c, hi + c}; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

}  // namespace anderson
