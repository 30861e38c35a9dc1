#include <gtest/gtest.h>

#include <vector>

#include "anderson/rng.hpp"
#include "oracles.hpp"

using namespace anderson;

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswerZero) {
  const auto out = philox4x32_10({0, 0, 0, 0}, {0, 0});
  const Philox4x32Counter want{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u};
  EXPECT_EQ(out, want);
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                 {0xffffffffu, 0xffffffffu});
  const Philox4x32Counter want{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu};
  EXPECT_EQ(out, want);
}

TEST(Philox, KnownAnswerPi) {
  const auto out = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                 {0xa4093822u, 0x299f31d0u});
  const Philox4x32Counter want{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u};
  EXPECT_EQ(out, want);
}

TEST(RandomStream, SameSeedAndStreamReplays) {
  RandomStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, SeekMatchesSequentialPosition) {
  RandomStream a(5, 3);
  std::vector<std::uint64_t> seq(37);
  for (auto& x : seq) x = a.next_u64();
  for (std::uint64_t pos : {0u, 1u, 2u, 17u, 36u}) {
    RandomStream b(5, 3);
    b.seek(pos);
    EXPECT_EQ(b.next_u64(), seq[pos]) << pos;
  }
}

TEST(RandomStream, UniformRanges) {
  RandomStream r(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double w = r.uniform_open();
    ASSERT_GT(w, 0.0);
    ASSERT_LT(w, 1.0);
  }
}

TEST(RandomStream, KolmogorovSmirnovUniform) {
  RandomStream r(2024, 0);
  std::vector<double> x(100000);
  for (auto& u : x) u = r.uniform();
  const double d = oracle::ks_statistic(x, [](double t) { return t; });
  EXPECT_LE(d, 0.01);
}

TEST(RandomStream, DistinctStreamsUncorrelated) {
  RandomStream a(9, streams::trial(streams::kPotential, 0));
  RandomStream b(9, streams::trial(streams::kPotential, 1));
  std::vector<double> x(100000), y(100000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = a.uniform();
    y[i] = b.uniform();
  }
  EXPECT_LE(std::abs(oracle::correlation(x, y)), 0.01);
  // lag-1 within one stream
  EXPECT_LE(std::abs(oracle::correlation(std::span(x).first(x.size() - 1),
                                         std::span(x).subspan(1))), 0.01);
}

TEST(RandomStream, StreamNamespacesAreDisjoint) {
  EXPECT_NE(streams::trial(1, 0), streams::trial(0, 0));
  EXPECT_NE(streams::trial(0, 5), streams::kInverseIteration);
  EXPECT_EQ(streams::trial(0, 3), 3u);
}
