#include "anderson/interval_union.hpp"

#include <algorithm>
#include <cmath>

#include "anderson/errors.hpp"

namespace anderson {

IntervalUnion::IntervalUnion(std::vector<Interval> pieces) {
  std::erase_if(pieces, [](const Interval& iv) { return !(iv.lo < iv.hi); });
  std::sort(pieces.begin(), pieces.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  for (const auto& iv : pieces) {
    if (!pieces_.empty() && iv.lo <= pieces_.back().hi)
      pieces_.back().hi = std::max(pieces_.back().hi, iv.hi);
    else
      pieces_.push_back(iv);
  }
}

double IntervalUnion::measure() const noexcept {
  double s = 0.0;
  for (const auto& iv : pieces_) s += iv.hi - iv.lo;
  return s;
}

bool IntervalUnion::contains(double x) const noexcept {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const Interval& iv) { return v < iv.lo; });
  if (it == pieces_.begin()) return false;
  --it;
  return x > it->lo && x < it->hi;
}

bool IntervalUnion::covers(const IntervalUnion& other) const noexcept {
  // Closure containment: each piece of `other` must sit inside one closed piece.
  std::size_t j = 0;
  for (const auto& iv : other.pieces_) {
    while (j < pieces_.size() && pieces_[j].hi < iv.hi) ++j;
    if (j == pieces_.size() || pieces_[j].lo > iv.lo) return false;
  }
  return true;
}

IntervalUnion IntervalUnion::unite(const IntervalUnion& other) const {
  std::vector<Interval> all(pieces_);
  all.insert(all.end(), other.pieces_.begin(), other.pieces_.end());
  return IntervalUnion(std::move(all));
}

IntervalUnion IntervalUnion::intersect(const IntervalUnion& other) const {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < pieces_.size() && j < other.pieces_.size()) {
    const double lo = std::max(pieces_[i].lo, other.pieces_[j].lo);
    const double hi = std::min(pieces_[i].hi, other.pieces_[j].hi);
    if (lo < hi) out.push_back({lo, hi});
    if (pieces_[i].hi < other.pieces_[j].hi)
      ++i;
    else
      ++j;
  }
  return IntervalUnion(std::move(out));
}

IntervalUnion IntervalUnion::subtract(const IntervalUnion& other) const {
  std::vector<Interval> out;
  std::size_t j = 0;
  for (const auto& iv : pieces_) {
    double cur = iv.lo;
    while (j < other.pieces_.size() && other.pieces_[j].hi <= cur) ++j;
    std::size_t k = j;
    while (k < other.pieces_.size() && other.pieces_[k].lo < iv.hi) {
      if (other.pieces_[k].lo > cur) out.push_back({cur, other.pieces_[k].lo});
      cur = std::max(cur, other.pieces_[k].hi);
      if (other.pieces_[k].hi >= iv.hi) break;
      ++k;
    }
    if (cur < iv.hi) out.push_back({cur, iv.hi});
  }
  return IntervalUnion(std::move(out));
}

IntervalUnion IntervalUnion::clip(Interval window) const {
  return intersect(IntervalUnion::single(window));
}

double IntervalUnion::window_measure(double E, double theta) const noexcept {
  const double lo = E - theta, hi = E + theta;
  auto it = std::lower_bound(pieces_.begin(), pieces_.end(), lo,
                             [](const Interval& iv, double v) { return iv.hi <= v; });
  double s = 0.0;
  for (; it != pieces_.end() && it->lo < hi; ++it) {
    const double a = std::max(lo, it->lo), b = std::min(hi, it->hi);
    if (a < b) s += b - a;
  }
  return s;
}

IntervalUnion union_of_intervals(std::span<const double> centers,
                                 std::span<const double> half_widths, Interval clip) {
  if (centers.size() != half_widths.size())
    throw PreconditionError("union_of_intervals: centers and half_widths differ in length");
  std::vector<Interval> pieces;
  pieces.reserve(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double h = half_widths[i];
    if (!(h > 0)) throw PreconditionError("union_of_intervals: half-widths must be > 0");
    const double lo = std::max(centers[i] - h, clip.lo);
    const double hi = std::min(centers[i] + h, clip.hi);
    if (lo < hi) pieces.push_back({lo, hi});
  }
  return IntervalUnion(std::move(pieces));
}

IntervalUnion union_of_intervals(std::span<const double> centers, double half_width,
                                 Interval clip) {
  std::vector<double> h(centers.size(), half_width);
  if (centers.empty() && !(half_width > 0))
    throw PreconditionError("union_of_intervals: half-widths must be > 0");
  return union_of_intervals(centers, h, clip);
}

}  // namespace anderson
