#include <gtest/gtest.h>

#include "anderson/errors.hpp"
#include "anderson/interval_union.hpp"
#include "anderson/rng.hpp"
#include "oracles.hpp"

using namespace anderson;

namespace {

IntervalUnion random_union(RandomStream& r, std::size_t n, double lo, double hi, double max_w) {
  std::vector<Interval> v;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = lo + (hi - lo) * r.uniform();
    const double w = max_w * r.uniform_open();
    v.push_back({c - w, c + w});
  }
  return IntervalUnion(v);
}

oracle::Pieces pieces(const IntervalUnion& u) {
  oracle::Pieces p;
  for (const auto& iv : u.intervals()) p.emplace_back(iv.lo, iv.hi);
  return p;
}

}  // namespace

TEST(IntervalUnion, TwoSeparatePieces) {
  const std::vector<double> c{1, 2};
  const auto u = union_of_intervals(c, 0.1, {0, 3});
  EXPECT_EQ(u.size(), 2u);
  EXPECT_NEAR(u.measure(), 0.4, 1e-15);
}

TEST(IntervalUnion, OverlapMerges) {
  const std::vector<double> c{1, 1.05};
  const auto u = union_of_intervals(c, 0.1, {0, 3});
  ASSERT_EQ(u.size(), 1u);
  EXPECT_DOUBLE_EQ(u.intervals()[0].lo, 0.9);
  EXPECT_DOUBLE_EQ(u.intervals()[0].hi, 1.15);
  EXPECT_NEAR(u.measure(), 0.25, 1e-15);
}

TEST(IntervalUnion, ClipExcludingEverything) {
  const std::vector<double> c{1, 2};
  const auto u = union_of_intervals(c, 0.1, {5, 6});
  EXPECT_TRUE(u.empty());
  EXPECT_EQ(u.measure(), 0.0);
}

TEST(IntervalUnion, BadInputsRejected) {
  const std::vector<double> c{1, 2}, h{0.1};
  EXPECT_THROW(union_of_intervals(c, h, {0, 3}), PreconditionError);
  EXPECT_THROW(union_of_intervals(c, 0.0, {0, 3}), PreconditionError);
  const std::vector<double> neg{0.1, -0.1};
  EXPECT_THROW(union_of_intervals(c, neg, {0, 3}), PreconditionError);
}

TEST(IntervalUnion, NormalizationDropsDegenerateAndMergesTouching) {
  const IntervalUnion u({{3, 4}, {1, 1}, {0, 1}, {1, 2}, {5, 4.5}});
  ASSERT_EQ(u.size(), 2u);
  EXPECT_EQ(u.intervals()[0], (Interval{0, 2}));
  EXPECT_EQ(u.intervals()[1], (Interval{3, 4}));
  EXPECT_TRUE(u.contains(1.5));
  EXPECT_FALSE(u.contains(2.0));  // open
  EXPECT_FALSE(u.contains(2.5));
}

TEST(IntervalUnion, NormalizationIsIdempotent) {
  RandomStream r(1, 0);
  for (int t = 0; t < 50; ++t) {
    const auto u = random_union(r, 40, 0, 10, 0.3);
    const IntervalUnion again({u.intervals().begin(), u.intervals().end()});
    EXPECT_EQ(again, u);
    for (std::size_t i = 1; i < u.size(); ++i)
      EXPECT_LT(u.intervals()[i - 1].hi, u.intervals()[i].lo);
  }
}

TEST(IntervalUnion, InclusionExclusionIdentity) {
  RandomStream r(2, 0);
  for (int t = 0; t < 200; ++t) {
    const auto X = random_union(r, 30, 0, 10, 0.4);
    const auto Y = random_union(r, 30, 0, 10, 0.4);
    const double lhs = X.unite(Y).measure() + X.intersect(Y).measure();
    EXPECT_NEAR(lhs, X.measure() + Y.measure(), 1e-12);
    // X = (X \ Y) + (X cap Y), disjoint
    EXPECT_NEAR(X.subtract(Y).measure() + X.intersect(Y).measure(), X.measure(), 1e-12);
    EXPECT_TRUE(X.unite(Y).covers(X));
    EXPECT_TRUE(X.covers(X.intersect(Y)));
  }
}

TEST(IntervalUnion, MeasuresAgreeWithGridOracle) {
  RandomStream r(3, 0);
  for (int t = 0; t < 20; ++t) {
    const auto X = random_union(r, 20, 0, 10, 0.3);
    const auto Y = random_union(r, 20, 0, 10, 0.3);
    const std::size_t n = 200000;
    const double h = 10.8 / n;
    const auto sx = pieces(X), sy = pieces(Y);
    oracle::Pieces both = sx;
    both.insert(both.end(), sy.begin(), sy.end());
    const double slack = h * static_cast<double>(2 * (X.size() + Y.size()) + 2);
    EXPECT_NEAR(X.unite(Y).measure(), oracle::grid_union_measure(both, -0.4, 10.4, n), slack);
  }
}

TEST(IntervalUnion, ClipIsAdditiveOverDisjointWindows) {
  RandomStream r(4, 0);
  for (int t = 0; t < 50; ++t) {
    const auto X = random_union(r, 30, 0, 10, 0.5);
    const double cut = 10 * r.uniform();
    EXPECT_NEAR(X.clip({-1, cut}).measure() + X.clip({cut, 11}).measure(), X.measure(), 1e-12);
  }
}

TEST(IntervalUnion, WindowMeasureMatchesPrefixOracle) {
  RandomStream r(5, 0);
  for (int t = 0; t < 50; ++t) {
    const auto X = random_union(r, 25, 0, 10, 0.3);
    const oracle::CumulativeMeasure F(pieces(X));
    for (int q = 0; q < 20; ++q) {
      const double E = 10 * r.uniform();
      const double th = 0.5 * r.uniform_open();
      EXPECT_NEAR(X.window_measure(E, th), F(E + th) - F(E - th), 1e-12);
    }
  }
}

TEST(IntervalUnion, CoversUsesClosure) {
  const IntervalUnion a({{0, 1}, {1, 2}});  // merged to (0, 2)
  const IntervalUnion b({{0, 0.5}, {0.5, 2}});
  EXPECT_TRUE(a.covers(b));
  const IntervalUnion gap({{0, 0.9}, {1.1, 2}});
  EXPECT_FALSE(gap.covers(a));
  EXPECT_TRUE(a.covers(IntervalUnion{}));
}
