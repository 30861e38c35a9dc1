#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "anderson/errors.hpp"
#include "anderson/potential.hpp"
#include "anderson/tridiagonal.hpp"
#include "oracles.hpp"

using namespace anderson;

TEST(Restrict, SlicesOneBased) {
  const std::vector<double> v{3, 1, 4};
  const auto b = restrict_block(v, 2, 3);
  EXPECT_EQ(b.offset(), 2u);
  EXPECT_EQ(std::vector<double>(b.diag().begin(), b.diag().end()), (std::vector<double>{1, 4}));
  EXPECT_EQ(restrict_block(v, 1, 1).size(), 1u);
  EXPECT_THROW(restrict_block(v, 2, 5), IndexError);
  EXPECT_THROW(restrict_block(v, 0, 1), IndexError);
  EXPECT_THROW(restrict_block(v, 3, 2), IndexError);
}

TEST(DyadicBlock, OffsetsAndLengths) {
  const std::vector<double> v(40, 0.0);
  EXPECT_EQ(dyadic_block(v, 0).offset(), 1u);
  EXPECT_EQ(dyadic_block(v, 0).size(), 1u);
  EXPECT_EQ(dyadic_block(v, 1).offset(), 4u);
  EXPECT_EQ(dyadic_block(v, 1).last_site(), 7u);
  EXPECT_EQ(dyadic_block(v, 2).offset(), 16u);
  EXPECT_EQ(dyadic_block(v, 2).size(), 16u);
  EXPECT_THROW(dyadic_block(v, 3), IndexError);
}

TEST(CharPoly, SmallClosedForms) {
  const TridiagonalBlock one(1, {0.7});
  EXPECT_DOUBLE_EQ(char_poly_value(one, 2.0), 2.0 - 0.7);
  const TridiagonalBlock two(1, {0.3, -1.2});
  const double E = 0.9;
  EXPECT_NEAR(char_poly_value(two, E), (E - 0.3) * (E + 1.2) - 1.0, 1e-15);
}

TEST(CharPoly, MatchesCofactorOracle) {
  const auto d = PotentialDistribution::uniform(-2, 2);
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto v = sample_potential(d, 8, 77, t);
    const TridiagonalBlock b(1, v);
    RandomStream r(78, t);
    const double E = -4 + 8 * r.uniform();
    const long double want = oracle::cofactor_det(oracle::shifted_dense(v, E));
    EXPECT_NEAR(char_poly_value(b, E), static_cast<double>(want),
                1e-10 * std::fabs(static_cast<double>(want)));
    const auto ld = char_poly_log(b, E);
    EXPECT_EQ(ld.sign, want > 0 ? 1 : -1);
    EXPECT_NEAR(ld.log_abs, std::log(std::fabs(static_cast<double>(want))), 1e-10);
  }
}

TEST(CharPoly, LogVariantSurvivesOverflow) {
  const TridiagonalBlock b(1, std::vector<double>(5000, 0.0));
  // E = 10 lies outside the spectrum: D_n = (l^(n+1) - l^-(n+1)) / (l - 1/l).
  const auto ld = char_poly_log(b, 10.0);
  const double lambda = 5.0 + std::sqrt(24.0);
  const double want = 5001 * std::log(lambda) - std::log(lambda - 1 / lambda);
  EXPECT_EQ(ld.sign, 1);
  EXPECT_NEAR(ld.log_abs, want, 1e-9 * want);
  EXPECT_FALSE(std::isfinite(char_poly_value(b, 10.0)));
}

TEST(Spectrum, FreeLaplacianClosedForm) {
  const TridiagonalBlock b(1, {0, 0, 0});
  const auto s = spectrum(b, 1e-14, false);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_NEAR(s.eigenvalues[0], -std::sqrt(2.0), 1e-13);
  EXPECT_NEAR(s.eigenvalues[1], 0.0, 1e-13);
  EXPECT_NEAR(s.eigenvalues[2], std::sqrt(2.0), 1e-13);
  const std::size_t n = 20;
  const auto s20 = spectrum(TridiagonalBlock(1, std::vector<double>(n, 0.0)), 1e-14, false);
  for (std::size_t j = 1; j <= n; ++j)
    EXPECT_NEAR(s20.eigenvalues[n - j], 2 * std::cos(j * M_PI / (n + 1)), 1e-13);
}

TEST(Spectrum, ConstantPotentialShifts) {
  const double c = 1.75;
  const auto s0 = spectrum(TridiagonalBlock(1, std::vector<double>(17, 0.0)), 1e-14, false);
  const auto sc = spectrum(TridiagonalBlock(1, std::vector<double>(17, c)), 1e-14, false);
  for (std::size_t i = 0; i < 17; ++i) EXPECT_NEAR(sc.eigenvalues[i], s0.eigenvalues[i] + c, 1e-12);
}

TEST(Spectrum, MatchesInterlacingOracle) {
  const auto d = PotentialDistribution::uniform(0, 1);
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto v = sample_potential(d, 12, 5, t);
    const auto s = spectrum(TridiagonalBlock(1, v), 1e-13, false);
    const auto want = oracle::eigenvalues_by_interlacing(v);
    ASSERT_EQ(want.size(), s.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(s.eigenvalues[i], want[i], 1e-9);
  }
}

TEST(Spectrum, SturmCountsAgreeWithEigenvalues) {
  const auto d = PotentialDistribution::uniform(0, 1);
  for (std::uint64_t t = 0; t < 10; ++t) {
    const auto v = sample_potential(d, 64, 8, t);
    const TridiagonalBlock b(1, v);
    const auto s = spectrum(b, 1e-13, false);
    RandomStream r(9, t);
    std::vector<double> Es(100);
    for (auto& E : Es) E = -2.5 + 6 * r.uniform();
    std::vector<std::size_t> batched(Es.size());
    sturm_counts(b, Es, batched);
    for (std::size_t i = 0; i < Es.size(); ++i) {
      const auto want = static_cast<std::size_t>(
          std::upper_bound(s.eigenvalues.begin(), s.eigenvalues.end(), Es[i]) - s.eigenvalues.begin());
      EXPECT_EQ(sturm_count(b, Es[i]), want);
      EXPECT_EQ(batched[i], want);
    }
  }
}

TEST(Spectrum, GershgorinTraceAndOrdering) {
  const auto d = PotentialDistribution::uniform(0, 5);
  const auto v = sample_potential(d, 200, 1, 0);
  const auto s = spectrum(TridiagonalBlock(1, v), 1e-13, false);
  const double lo = *std::min_element(v.begin(), v.end()) - 2;
  const double hi = *std::max_element(v.begin(), v.end()) + 2;
  double tr = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_GE(s.eigenvalues[i], lo);
    EXPECT_LE(s.eigenvalues[i], hi);
    if (i > 0) EXPECT_GE(s.eigenvalues[i], s.eigenvalues[i - 1]);
    tr += s.eigenvalues[i];
  }
  const double want = std::accumulate(v.begin(), v.end(), 0.0);
  EXPECT_NEAR(tr, want, 1e-9 * std::fabs(want));
}

TEST(Spectrum, EigenvectorsOrthonormalWithSmallResiduals) {
  for (double width : {1.0, 5.0}) {
    const auto d = PotentialDistribution::uniform(0, width);
    const auto v = sample_potential(d, 512, 3, 0);
    const auto s = spectrum(TridiagonalBlock(1, v), 1e-13, true);
    ASSERT_EQ(s.eigenvectors.size(), 512u);
    for (std::size_t j = 0; j < s.size(); ++j) {
      const auto Hx = oracle::apply(v, s.eigenvectors[j]);
      double r = 0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double t = Hx[i] - s.eigenvalues[j] * s.eigenvectors[j][i];
        r += t * t;
      }
      EXPECT_LE(std::sqrt(r), s.residual_tol) << j;
      EXPECT_LE(s.residuals[j], s.residual_tol);
    }
    double worst = 0;
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = a; b < s.size(); ++b) {
        double g = 0;
        for (std::size_t i = 0; i < v.size(); ++i) g += s.eigenvectors[a][i] * s.eigenvectors[b][i];
        worst = std::max(worst, std::fabs(g - (a == b ? 1.0 : 0.0)));
      }
    EXPECT_LE(worst, 1e-8) << "width " << width;
  }
}

TEST(Spectrum, NonPositiveTolRejected) {
  EXPECT_THROW(spectrum(TridiagonalBlock(1, {0.0}), 0.0, false), PreconditionError);
}

TEST(MinSpacing, Examples) {
  const std::vector<double> ev{0, 1, 1.25};
  EXPECT_DOUBLE_EQ(min_spacing(ev), 0.25);
  const auto s = spectrum(TridiagonalBlock(1, {0, 0, 0}), 1e-14, false);
  EXPECT_NEAR(min_spacing(s), std::sqrt(2.0), 1e-13);
  EXPECT_THROW(min_spacing(std::vector<double>{1.0}), PreconditionError);
}

TEST(MinSpacing, FittedExponentAcrossRealizations) {
  const auto d = PotentialDistribution::uniform(0, 1);
  double worst_C = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const auto ev = eigenvalues_bisection(TridiagonalBlock(1, sample_potential(d, 256, 21, t)), 1e-14);
    const double C = -std::log(min_spacing(ev)) / std::log(256.0);
    worst_C = std::max(worst_C, C);
  }
  RecordProperty("fitted_C", std::to_string(worst_C));
  EXPECT_LE(worst_C, 4.0);
}

TEST(SpectrumCsv, HeaderAndRows) {
  const auto s = spectrum(TridiagonalBlock(3, {0, 0}), 1e-14, false);
  std::ostringstream os;
  write_spectrum_csv(os, std::span(&s, 1));
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "block_offset,block_length,index,eigenvalue");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}
