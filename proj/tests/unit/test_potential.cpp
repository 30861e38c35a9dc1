#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "anderson/errors.hpp"
#include "anderson/potential.hpp"
#include "oracles.hpp"

using namespace anderson;

TEST(Potential, SameArgumentsReproduceSequence) {
  const auto d = PotentialDistribution::uniform(0, 1);
  const auto a = sample_potential(d, 5, 42, 0);
  const auto b = sample_potential(d, 5, 42, 0);
  ASSERT_EQ(a.size(), 5u);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, sample_potential(d, 5, 42, 1));
}

TEST(Potential, UniformMomentsAndRange) {
  const auto d = PotentialDistribution::uniform(0, 1);
  const auto v = sample_potential(d, 1000000, 7, 0);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  EXPECT_NEAR(mean, 0.5, 0.002);
  EXPECT_GE(*std::min_element(v.begin(), v.end()), 0.0);
  EXPECT_LE(*std::max_element(v.begin(), v.end()), 1.0);
}

TEST(Potential, DegenerateSupportRejected) {
  EXPECT_THROW(PotentialDistribution::uniform(1, 1), InvalidDistribution);
  EXPECT_THROW(PotentialDistribution::uniform(2, 1), InvalidDistribution);
  EXPECT_THROW(sample_potential(PotentialDistribution::uniform(0, 1), 0, 1, 0), Error);
}

TEST(Potential, EssentialSpectrum) {
  EXPECT_EQ(essential_spectrum(PotentialDistribution::uniform(0, 1)), (Interval{-2, 3}));
  EXPECT_EQ(essential_spectrum(PotentialDistribution::uniform(-1, 1)), (Interval{-3, 3}));
  EXPECT_EQ(essential_spectrum(PotentialDistribution::uniform(5, 6)), (Interval{3, 8}));
}

namespace {
PotentialDistribution tent() {
  return PotentialDistribution::piecewise_linear({{0.0, 0.2}, {0.5, 1.0}, {2.0, 0.1}});
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}
}  // namespace

TEST(Potential, PiecewiseDensityIntegratesToOne) {
  const auto d = tent();
  // piecewise linear: Simpson is exact on each segment
  const double mass = simpson([&](double x) { return d.density(x); }, 0.0, 0.5, 2) +
                      simpson([&](double x) { return d.density(x); }, 0.5, 2.0, 2);
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_NEAR(d.cdf(2.0), 1.0, 1e-15);
  EXPECT_EQ(d.cdf(-1.0), 0.0);
}

TEST(Potential, DensityBoundedByA) {
  for (const auto& d : {tent(), PotentialDistribution::uniform(0, 0.1),
                        PotentialDistribution::uniform(0, 5)}) {
    EXPECT_GE(d.density_bound(), 1.0);
    for (int i = 0; i <= 1000; ++i) {
      const double x = d.j_lo() + (d.j_hi() - d.j_lo()) * i / 1000.0;
      EXPECT_LE(d.density(x), d.density_bound() * (1 + 1e-12));
    }
  }
  EXPECT_NEAR(PotentialDistribution::uniform(0, 0.1).density_bound(), 10.0, 1e-12);
}

TEST(Potential, LowerDensityBoundPositiveInside) {
  EXPECT_GT(tent().lower_density_bound(0.1), 0.0);
  EXPECT_NEAR(PotentialDistribution::uniform(0, 2).lower_density_bound(0.1), 0.5, 1e-15);
}

TEST(Potential, QuantileInvertsCdf) {
  const auto d = tent();
  for (int i = 1; i < 100; ++i) {
    const double u = i / 100.0;
    EXPECT_NEAR(d.cdf(d.quantile(u)), u, 1e-12);
  }
}

TEST(Potential, KolmogorovSmirnovAgainstConfiguredCdf) {
  for (const auto& d : {tent(), PotentialDistribution::uniform(-1, 3)}) {
    const auto v = sample_potential(d, 100000, 11, 0);
    EXPECT_LE(oracle::ks_statistic(v, [&](double x) { return d.cdf(x); }), 0.01);
  }
}

TEST(Potential, DistinctStreamsUncorrelated) {
  const auto d = tent();
  const auto a = sample_potential(d, 100000, 3, 0);
  const auto b = sample_potential(d, 100000, 3, 1);
  EXPECT_LE(std::abs(oracle::correlation(a, b)), 0.01);
}

TEST(Potential, ShiftedLaw) {
  const auto d = tent().shifted(1.5);
  EXPECT_DOUBLE_EQ(d.j_lo(), 1.5);
  EXPECT_DOUBLE_EQ(d.j_hi(), 3.5);
  EXPECT_NEAR(d.cdf(2.0), tent().cdf(0.5), 1e-14);
}

TEST(Potential, BadNodesRejected) {
  EXPECT_THROW(PotentialDistribution::piecewise_linear({{0, 1}}), InvalidDistribution);
  EXPECT_THROW(PotentialDistribution::piecewise_linear({{0, 1}, {0, 1}}), InvalidDistribution);
  EXPECT_THROW(PotentialDistribution::piecewise_linear({{0, 0}, {1, 0}}), InvalidDistribution);
  EXPECT_THROW(PotentialDistribution::piecewise_linear({{0, -1}, {1, 1}}), InvalidDistribution);
}
