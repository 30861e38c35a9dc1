#pragma once

// Finite unions of disjoint open intervals with exact set algebra.

#include <cstddef>
#include <span>
#include <vector>

#include "anderson/interval.hpp"

namespace anderson {

/// Sorted, disjoint open intervals with strictly positive gaps. Degenerate
/// inputs (lo >= hi) are dropped and touching or overlapping ones merged.
class IntervalUnion {
public:
  IntervalUnion() = default;
  explicit IntervalUnion(std::vector<Interval> pieces);

  static IntervalUnion single(Interval iv) { return IntervalUnion({iv}); }

  std::span<const Interval> intervals() const noexcept { return pieces_; }
  std::size_t size() const noexcept { return pieces_.size(); }
  bool empty() const noexcept { return pieces_.empty(); }
  double measure() const noexcept;
  bool contains(double x) const noexcept;
  /// Every point of `other` lies in the closure of this union.
  bool covers(const IntervalUnion& other) const noexcept;

  IntervalUnion unite(const IntervalUnion& other) const;
  IntervalUnion intersect(const IntervalUnion& other) const;
  IntervalUnion subtract(const IntervalUnion& other) const;
  IntervalUnion clip(Interval window) const;

  /// Measure of (E - theta, E + theta) intersected with this union.
  double window_measure(double E, double theta) const noexcept;

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

private:
  std::vector<Interval> pieces_;
};

/// Union of (c_i - h_i, c_i + h_i) clipped to `clip`. Throws
/// PreconditionError on mismatched lengths or a non-positive half-width.
IntervalUnion union_of_intervals(std::span<const double> centers,
                                 std::span<const double> half_widths, Interval clip);

/// Same with a common half-width.
IntervalUnion union_of_intervals(std::span<const double> centers, double half_width,
                                 Interval clip);

}  // namespace anderson
