#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "anderson/errors.hpp"
#include "anderson/spectral_stats.hpp"
#include "oracles.hpp"

using namespace anderson;

namespace {
const auto kUnit = PotentialDistribution::uniform(0, 1);
}

TEST(Ids, FreeLaplacianClosedForm) {
  const std::vector<double> zero(1024, 0.0);
  const auto grid = uniform_grid(-2.5, 2.5, 0.05);
  const auto ids = ids_of_potential(zero, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_NEAR(ids.N_values[i], oracle::free_ids(grid[i]), 5e-3) << grid[i];
  const std::vector<double> origin{-0.01, 0.0, 0.01};
  EXPECT_EQ(ids_of_potential(zero, origin).N_values[1], 0.5);
}

TEST(Ids, ZeroOutsideOneInsideAndMonotone) {
  const auto grid = uniform_grid(-2.9, 3.9, 0.1);
  const auto ids = ids_estimate(kUnit, grid, 64, 20, 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < -2) EXPECT_EQ(ids.N_values[i], 0.0);
    if (grid[i] > 3) EXPECT_EQ(ids.N_values[i], 1.0);
    EXPECT_GE(ids.N_values[i], 0.0);
    EXPECT_LE(ids.N_values[i], 1.0);
    if (i > 0) EXPECT_GE(ids.N_values[i], ids.N_values[i - 1]);
  }
}

TEST(Ids, Preconditions) {
  const auto grid = uniform_grid(0, 1, 0.1);
  EXPECT_THROW(ids_estimate(kUnit, grid, 8, 10, 1), PreconditionError);
  EXPECT_THROW(ids_estimate(kUnit, grid, 64, 1, 1), PreconditionError);
  const std::vector<double> unsorted{0.2, 0.1};
  EXPECT_THROW(ids_estimate(kUnit, unsorted, 64, 10, 1), PreconditionError);
  const std::vector<double> far{10.0};
  EXPECT_THROW(ids_estimate(kUnit, far, 64, 10, 1), PreconditionError);
}

TEST(Ids, IndependentSeedsAgree) {
  const auto grid = uniform_grid(-2, 3, 0.25);
  const auto a = ids_estimate(kUnit, grid, 1024, 200, 11);
  const auto b = ids_estimate(kUnit, grid, 1024, 200, 12);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double se = std::hypot(a.N_std_err[i], b.N_std_err[i]);
    EXPECT_LE(std::fabs(a.N_values[i] - b.N_values[i]), 3 * se + 1e-12) << grid[i];
  }
}

TEST(Ids, SameSeedReproducesAcrossWorkerCounts) {
  const auto grid = uniform_grid(-1, 2, 0.5);
  const auto a = ids_estimate(kUnit, grid, 128, 16, 5, 1);
  const auto b = ids_estimate(kUnit, grid, 128, 16, 5, 4);
  EXPECT_EQ(a.N_values, b.N_values);
  EXPECT_EQ(a.density, b.density);
}

TEST(Ids, ShiftCovariance) {
  const double c = 1.5;
  const auto grid = uniform_grid(-1.5, 2.5, 0.5);
  std::vector<double> shifted_grid;
  for (double E : grid) shifted_grid.push_back(E + c);
  const auto a = ids_estimate(kUnit, grid, 512, 100, 21);
  const auto b = ids_estimate(kUnit.shifted(c), shifted_grid, 512, 100, 22);
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_LE(std::fabs(a.N_values[i] - b.N_values[i]),
              3 * std::hypot(a.N_std_err[i], b.N_std_err[i]) + 1e-12);
}

TEST(Wegner, UniformUnitPasses) {
  const auto grid = uniform_grid(-2, 3, 0.005);
  const auto ids = ids_estimate(kUnit, grid, 1024, 200, 3);
  const auto w = wegner_check(ids, 1.0);
  RecordProperty("max_density", std::to_string(w.max_density));
  EXPECT_TRUE(w.pass) << w.max_density;
  EXPECT_EQ(w.tol, 0.15);
}

TEST(Wegner, NarrowSupportLargeA) {
  const auto d = PotentialDistribution::uniform(0, 0.1);
  const auto grid = uniform_grid(-2, 2.1, 0.005);
  const auto ids = ids_estimate(d, grid, 1024, 100, 4);
  const auto w = wegner_check(ids, d.density_bound());
  EXPECT_TRUE(w.pass) << w.max_density;
  EXPECT_LE(w.max_density, 10 * 1.15);
}

TEST(Wegner, JumpFails) {
  const auto grid = uniform_grid(0, 1, 0.005);
  std::vector<double> N(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) N[i] = grid[i] < 0.5 ? 0.2 : 0.6;
  const auto w = wegner_check(ids_from_values(grid, N, 1024, 1), 1.0);
  EXPECT_FALSE(w.pass);
  EXPECT_GT(w.max_density, 1.15);
}

TEST(Wegner, CoarseGridRejected) {
  const auto grid = uniform_grid(0, 1, 0.05);
  const std::vector<double> N(grid.size(), 0.5);
  EXPECT_THROW(wegner_check(ids_from_values(grid, N, 16, 1), 1.0), PreconditionError);
}

TEST(LowerWegner, PositiveInsideAndBelowMax) {
  const auto grid = uniform_grid(-2, 3, 0.01);
  auto ids = ids_estimate(kUnit, grid, 1024, 100, 5);
  EXPECT_TRUE(std::isnan(ids.a_I));
  const auto lw = lower_wegner_check(ids, {0, 1}, essential_spectrum(kUnit));
  EXPECT_TRUE(lw.pass);
  EXPECT_GT(lw.a_I, 3 * lw.a_I_std_err);
  EXPECT_LE(lw.a_I, lw.A_emp);
  EXPECT_EQ(ids.a_I, lw.a_I);
}

TEST(LowerWegner, EdgeRejected) {
  const auto grid = uniform_grid(-2, 3.9, 0.01);
  auto ids = ids_estimate(kUnit, grid, 64, 10, 5);
  EXPECT_THROW(lower_wegner_check(ids, {3 - 0.001, 4}, essential_spectrum(kUnit)),
               PreconditionError);
}

TEST(Minami, BoundSubstitution) {
  EXPECT_NEAR(minami_bound(1, 0.01, 64, 2), 0.2048, 1e-15);
  EXPECT_NEAR(minami_bound(1, 0.01, 64, 1), 0.64, 1e-15);
  EXPECT_EQ(minami_bound(1, 0.01, 64, 0), 1.0);
  // 10^5 / 5! without overflow in the intermediate power
  EXPECT_NEAR(minami_bound(2, 0.5, 10, 5), 1e5 / 120, 1e-9);
}

TEST(Minami, ZeroCountIsCertain) {
  const auto t = minami_tail(kUnit, 64, {0.5, 0.51}, 0, 1000, 6);
  ASSERT_FALSE(t.rows.empty());
  EXPECT_EQ(t.rows[0].r, 0u);
  EXPECT_EQ(t.rows[0].empirical, 1.0);
  EXPECT_EQ(t.rows[0].bound, 1.0);
}

TEST(Minami, UniformTailWithinBound) {
  const auto t = minami_tail(kUnit, 64, {0.5, 0.51}, 2, 10000, 7);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_NEAR(t.rows[1].bound, 0.2048, 1e-12);
  EXPECT_TRUE(t.pass);
  EXPECT_LE(t.rows[1].empirical, t.rows[1].bound);
  // the r = 1 tail is at most the expected count
  EXPECT_LE(t.rows[0].empirical, t.rows[0].bound + 3 * t.rows[0].std_err);
}

TEST(Minami, Preconditions) {
  EXPECT_THROW(minami_tail(kUnit, 64, {0.5, 0.51}, 2, 999, 7), PreconditionError);
  EXPECT_THROW(minami_tail(kUnit, 64, {0.5, 0.5}, 2, 1000, 7), PreconditionError);
}

TEST(CountConcentration, MinimumLength) {
  // min(1, 0.04) / 1 * 0.5 * L >= 100  =>  L >= 5000
  EXPECT_EQ(count_concentration_min_length(0.2, 1.0, 0.5), 5000u);
  EXPECT_EQ(count_concentration_min_length(2.0, 4.0, 1.0), 400u);
}

TEST(CountConcentration, ShortBlockRejectedWithRequiredLength) {
  try {
    count_concentration(kUnit, 2048, {0, 0.5}, 0.2, 0.3, 100, 8);
    FAIL() << "expected rejection";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("5000"), std::string::npos) << e.what();
  }
}

TEST(CountConcentration, LongBlockPasses) {
  const auto grid = uniform_grid(-2, 3, 0.01);
  auto ids = ids_estimate(kUnit, grid, 1024, 100, 9);
  const Interval I{0, 0.5};
  const auto lw = lower_wegner_check(ids, I, essential_spectrum(kUnit));
  const std::size_t L = count_concentration_min_length(lw.a_I, 1.0, I.length());
  const auto c = count_concentration(kUnit, L, I, lw.a_I, lw.A_emp, 200, 10);
  EXPECT_NEAR(c.count_threshold, lw.a_I * 0.5 * static_cast<double>(L) / 2, 1e-9);
  EXPECT_NEAR(c.target, lw.a_I / (15 * lw.A_emp), 1e-15);
  EXPECT_TRUE(c.pass);
}

TEST(CountConcentration, WholeSpectrumIsCertain) {
  const auto c = count_concentration(kUnit, 1024, {-1.9, 2.9}, 0.2, 0.3, 50, 11);
  EXPECT_EQ(c.empirical, 1.0);
  EXPECT_TRUE(c.pass);
}

TEST(StatsCsv, Headers) {
  const auto grid = uniform_grid(0, 0.02, 0.01);
  const std::vector<double> N{0.1, 0.2, 0.3};
  std::ostringstream a;
  write_ids_csv(a, ids_from_values(grid, N, 16, 1));
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "E,N,N_std_err,density,density_std_err");
  const auto t = minami_tail(kUnit, 16, {0.5, 0.6}, 2, 1000, 1);
  std::ostringstream b;
  write_minami_csv(b, t);
  EXPECT_EQ(b.str().substr(0, b.str().find('\n')), "r,empirical,std_err,bound,pass");
}
