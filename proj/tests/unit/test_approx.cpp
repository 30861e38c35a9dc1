#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "anderson/approx.hpp"
#include "anderson/errors.hpp"
#include "anderson/rng.hpp"
#include "anderson/tridiagonal.hpp"
#include "oracles.hpp"

using namespace anderson;

namespace {

constexpr double kEulerGamma = 0.57721566490153286;

oracle::Pieces pieces(const IntervalUnion& u) {
  oracle::Pieces p;
  for (const auto& iv : u.intervals()) p.emplace_back(iv.lo, iv.hi);
  return p;
}

}  // namespace

TEST(ApproxSequence, ClosedForms) {
  EXPECT_DOUBLE_EQ(ApproxSequence::exponential(0.5)(3), std::exp(-3.0));
  EXPECT_DOUBLE_EQ(ApproxSequence::power(2, 2)(4), 2.0 / 16);
  EXPECT_DOUBLE_EQ(ApproxSequence::harmonic(3)(6), 0.5);
  const auto t = ApproxSequence::table({0.5, 0.25, 0.25});
  EXPECT_EQ(t(3), 0.25);
  EXPECT_THROW(t(4), IndexError);
  EXPECT_THROW(t(0), IndexError);
}

TEST(ApproxSequence, InvalidParametersRejected) {
  EXPECT_THROW(ApproxSequence::exponential(0), PreconditionError);
  EXPECT_THROW(ApproxSequence::power(1, 0), PreconditionError);
  EXPECT_THROW(ApproxSequence::harmonic(-1), PreconditionError);
  EXPECT_THROW(ApproxSequence::table({0.1, 0.2}), PreconditionError);
  EXPECT_THROW(ApproxSequence::table({0.1, 0.0}), PreconditionError);
  EXPECT_THROW(ApproxSequence::table({}), PreconditionError);
}

TEST(Clamp, HarmonicTwoBecomesOneOverK) {
  const auto a = clamp_sequence(ApproxSequence::harmonic(2));
  EXPECT_TRUE(a.clamped());
  for (std::size_t k = 1; k <= 100; ++k) EXPECT_DOUBLE_EQ(a(k), 1.0 / static_cast<double>(k));
}

TEST(Clamp, InverseSquareUnchanged) {
  const auto raw = ApproxSequence::power(1, 2);
  const auto a = clamp_sequence(raw);
  for (std::size_t k = 1; k <= 100; ++k) EXPECT_EQ(a(k), raw(k));
}

TEST(Clamp, HarmonicPartialSumsMatchEulerMaclaurin) {
  const auto a = clamp_sequence(ApproxSequence::harmonic(5));
  for (std::size_t K : {1000u, 1000000u}) {
    const double Kd = static_cast<double>(K);
    const double want = std::log(Kd) + kEulerGamma + 1 / (2 * Kd) - 1 / (12 * Kd * Kd);
    EXPECT_NEAR(a.partial_sum(1, K), want, 1e-10);
  }
  EXPECT_GT(a.partial_sum(1, 1000000), a.partial_sum(1, 1000) + 6.9);
  EXPECT_TRUE(a.sum_diverges());
  EXPECT_FALSE(clamp_sequence(ApproxSequence::power(1, 2)).sum_diverges());
}

TEST(Clamp, DivergenceClassPreserved) {
  for (const auto& a : {ApproxSequence::harmonic(0.5), ApproxSequence::power(3, 1.5),
                        ApproxSequence::power(1, 0.5), ApproxSequence::exponential(0.1)})
    EXPECT_EQ(a.sum_diverges(), clamp_sequence(a).sum_diverges());
}

TEST(TruncatedSet, SingleIndexInterior) {
  const std::vector<double> E{0.5};
  const auto a = ApproxSequence::table({0.1});
  EXPECT_NEAR(truncated_approx_set(E, a, 1, 1, {0, 1}).measure(), 0.2, 1e-15);
}

TEST(TruncatedSet, UnionBoundAndClipping) {
  RandomStream r(1, 0);
  const auto a = ApproxSequence::harmonic(0.05);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> E(300);
    for (auto& e : E) e = -0.5 + 2 * r.uniform();
    const Interval I{0, 1};
    const auto u = truncated_approx_set(E, a, 3, 300, I);
    EXPECT_LE(u.measure(), 2 * a.partial_sum(3, 300) + 1e-12);
    EXPECT_LE(u.measure(), I.length());
  }
}

TEST(TruncatedSet, RangeErrors) {
  const std::vector<double> E{0.1, 0.2};
  const auto a = ApproxSequence::harmonic(1);
  EXPECT_THROW(truncated_approx_set(E, a, 2, 1, {0, 1}), PreconditionError);
  EXPECT_THROW(truncated_approx_set(E, a, 1, 3, {0, 1}), IndexError);
}

TEST(DeltaSet, TwoEigenvalues) {
  const std::vector<double> s{1.0, 2.0};
  // alpha_{2 4^0} = alpha_2 = 0.2
  const auto a = ApproxSequence::table({0.5, 0.2});
  EXPECT_NEAR(delta_set(s, {0, 3}, a, 0).measure(), 0.4, 1e-15);
  EXPECT_TRUE(delta_set(s, {5, 6}, a, 0).empty());
}

TEST(DeltaSet, UnclampedAlphaRejected) {
  const std::vector<double> s{1.0};
  EXPECT_THROW(delta_set(s, {0, 3}, ApproxSequence::harmonic(2), 1), PreconditionError);
  EXPECT_NO_THROW(delta_set(s, {0, 3}, clamp_sequence(ApproxSequence::harmonic(2)), 1));
}

TEST(DeltaSet, MeasureTracksCountTimesWidth) {
  const auto dist = PotentialDistribution::uniform(0, 1);
  const auto a = clamp_sequence(ApproxSequence::harmonic(1));
  const unsigned m = 4;
  const Interval I{0, 1};
  double measure = 0, count = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto v = sample_potential(dist, 2 << (2 * m), 2, t);
    const auto s = eigenvalues_bisection(dyadic_block(v, m), 1e-13);
    measure += delta_set(s, I, a, m).measure();
    for (double e : s) count += (e > I.lo && e < I.hi);
  }
  const double width = a(2 << (2 * m));  // 2 * (alpha / 2)
  const double ratio = measure / (count * width);
  RecordProperty("ratio", std::to_string(ratio));
  EXPECT_NEAR(ratio, 1.0, 0.2);
}

TEST(BPrime, ZeroWidthsLeaveI) {
  const std::vector<std::vector<double>> spectra{{0.1, 0.5}, {0.2, 0.7, 0.9}};
  const std::vector<double> hw{0, 0}, a{0, 0};
  const auto c = bprime_chain(spectra, 2, {0, 1}, hw, a);
  ASSERT_EQ(c.levels.size(), 2u);
  for (const auto& L : c.levels) {
    EXPECT_EQ(L.bprime, IntervalUnion::single({0, 1}));
    EXPECT_NEAR(L.bprime_measure, 1.0, 1e-15);
  }
}

TEST(BPrime, NestingAndComplementIdentity) {
  const auto dist = PotentialDistribution::uniform(0, 1);
  const auto a = clamp_sequence(ApproxSequence::harmonic(1));
  const Interval I{0, 1};
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto v = sample_potential(dist, 2 << 10, 3, t);
    std::vector<std::vector<double>> spectra;
    for (unsigned m = 2; m <= 5; ++m) spectra.push_back(eigenvalues_bisection(dyadic_block(v, m), 1e-13));
    const auto c = bprime_chain(spectra, 2, I, a);
    EXPECT_EQ(c.M, 5u);
    for (std::size_t i = 0; i < c.levels.size(); ++i) {
      IntervalUnion deltas;
      for (std::size_t j = i; j < c.levels.size(); ++j) deltas = deltas.unite(c.levels[j].delta);
      EXPECT_EQ(c.levels[i].bprime, IntervalUnion::single(I).subtract(deltas));
      if (i + 1 < c.levels.size()) {
        EXPECT_TRUE(c.levels[i + 1].bprime.covers(c.levels[i].bprime));
        EXPECT_LE(c.levels[i].bprime_measure, c.levels[i + 1].bprime_measure);
      }
    }
    ASSERT_EQ(c.claim2.size(), 3u);
    for (std::size_t i = 0; i < c.claim2.size(); ++i) {
      const double nm = c.levels[i + 1].bprime.subtract(c.levels[i].bprime).measure();
      EXPECT_NEAR(c.claim2[i].new_mass, nm, 1e-12);
    }
  }
}

TEST(BPrime, NeedsTwoLevels) {
  const std::vector<std::vector<double>> one{{0.5}};
  EXPECT_THROW(bprime_chain(one, 2, {0, 1}, clamp_sequence(ApproxSequence::harmonic(1))),
               PreconditionError);
}

TEST(BPrime, ClaimTwoEventIsRare) {
  const auto dist = PotentialDistribution::uniform(0, 1);
  const auto a = clamp_sequence(ApproxSequence::harmonic(1));
  const Interval I{0, 1};
  std::size_t events = 0, total = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const auto v = sample_potential(dist, 2 << 10, 4, t);
    std::vector<std::vector<double>> spectra;
    for (unsigned m = 2; m <= 5; ++m) spectra.push_back(eigenvalues_bisection(dyadic_block(v, m), 1e-10));
    const auto c = bprime_chain(spectra, 2, I, a, 0.05);
    for (const auto& s : c.claim2) {
      ++total;
      events += s.event;
    }
  }
  RecordProperty("event_rate", std::to_string(double(events) / double(total)));
  EXPECT_LT(double(events), 0.05 * double(total));
}

TEST(Covering, FullSetHasEmptySublevel) {
  const Interval I{0, 1};
  const auto r = covering_function(IntervalUnion::single(I), I, 0.1);
  EXPECT_EQ(r.measure, 0.0);
  EXPECT_TRUE(r.holds);
}

TEST(Covering, EmptySetGivesWholeInterval) {
  const Interval I{0, 1};
  const auto r = covering_function(IntervalUnion{}, I, 0.1);
  EXPECT_NEAR(r.measure, 1.0, 1e-15);
  EXPECT_NEAR(r.bound, 4 * 1.1, 1e-15);
  EXPECT_TRUE(r.holds);
}

TEST(Covering, Preconditions) {
  EXPECT_THROW(covering_function(IntervalUnion{}, {0, 1}, 0.0), PreconditionError);
  EXPECT_THROW(covering_function(IntervalUnion::single({-0.5, 0.5}), {0, 1}, 0.1),
               PreconditionError);
}

TEST(Covering, SweepMatchesGridScanAndLemmaHolds) {
  RandomStream r(6, 0);
  const Interval I{0, 1};
  const std::size_t points = 1000000;
  const double h = I.length() / static_cast<double>(points);
  for (int t = 0; t < 20; ++t) {
    std::vector<Interval> raw;
    for (int i = 0; i < 50; ++i) {
      const double c = r.uniform();
      const double w = 0.02 * r.uniform_open();
      raw.push_back({c - w, c + w});
    }
    const auto B = IntervalUnion(raw).clip(I);
    const double theta = 0.001 + 0.05 * r.uniform();
    const auto res = covering_function(B, I, theta);
    const double grid = oracle::grid_scan_covering(pieces(B), I.lo, I.hi, theta, points);
    EXPECT_NEAR(res.measure, grid, h * static_cast<double>(2 * B.size() + 4)) << t;
    EXPECT_TRUE(res.holds);
    EXPECT_LE(res.measure, 4 * (I.length() - B.measure() + theta) + 1e-12);
  }
}

TEST(Khinchin, ConvergentTailBound) {
  const std::vector<std::size_t> cps{64, 256, 1024};
  const auto a = ApproxSequence::power(1, 2);
  const auto rep = khinchin_experiment(PotentialDistribution::uniform(0, 5), {1, 4}, a, 1024, cps,
                                       2, 13, {.padding = 256});
  EXPECT_FALSE(rep.divergent);
  for (const auto& tr : rep.trials)
    for (const auto& cp : tr.checkpoints) {
      EXPECT_LE(cp.tail, cp.tail_bound + 1e-15);
      EXPECT_LE(cp.tail_bound, 2.0 / static_cast<double>(cp.K - 1));
    }
}

TEST(Khinchin, CoveredMeasureMonotoneAndNewMassAddsUp) {
  const std::vector<std::size_t> cps{16, 64, 256, 1024};
  const auto a = clamp_sequence(ApproxSequence::harmonic(1));
  const auto rep = khinchin_experiment(PotentialDistribution::uniform(0, 5), {1, 4}, a, 1024, cps,
                                       2, 14, {.padding = 256});
  EXPECT_TRUE(rep.divergent);
  EXPECT_EQ(rep.box_length, 1280u);
  for (const auto& tr : rep.trials) {
    for (std::size_t i = 1; i < tr.checkpoints.size(); ++i)
      EXPECT_GE(tr.checkpoints[i].covered, tr.checkpoints[i - 1].covered);
    double total = 0;
    for (const auto& nm : tr.new_mass) {
      EXPECT_GE(nm.new_mass, -1e-15);
      total += nm.new_mass;
    }
    EXPECT_NEAR(total, tr.checkpoints.back().covered, 1e-12);
    ASSERT_FALSE(tr.levels.empty());
    for (const auto& ls : tr.levels) EXPECT_LE(ls.bad_count, ls.block_count);
  }
}

TEST(Khinchin, MeasureOnGivenListAgreesWithDirectUnion) {
  RandomStream r(7, 0);
  std::vector<double> E(500);
  for (auto& e : E) e = 3 * r.uniform();
  const auto a = ApproxSequence::harmonic(0.01);
  const std::vector<std::size_t> cps{10, 100, 500};
  const auto tr = khinchin_measure(E, {1, 2}, a, cps);
  for (const auto& cp : tr.checkpoints) {
    oracle::Pieces p;
    for (std::size_t k = 1; k <= cp.K; ++k) {
      const double w = a(k);
      p.emplace_back(std::max(1.0, E[k - 1] - w), std::min(2.0, E[k - 1] + w));
    }
    EXPECT_NEAR(cp.covered, oracle::grid_union_measure(p, 1, 2, 200000), 1e-5 * double(cp.K) + 1e-5);
  }
}

TEST(Khinchin, InteriorRequired) {
  const std::vector<std::size_t> cps{8};
  EXPECT_THROW(khinchin_experiment(PotentialDistribution::uniform(0, 1), {-2, 0}, ApproxSequence::harmonic(1),
                                   8, cps, 1, 1),
               PreconditionError);
}
