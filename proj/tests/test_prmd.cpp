#include <gtest/gtest.h>

#include <random>

#include "physioedge/prmd.hpp"
#include "test_support.hpp"

using namespace physioedge;

namespace {

// Independent chain: straight-line generator plus the gap formula.
std::vector<std::size_t> oracle_pattern(std::uint32_t seed, std::uint32_t modulus, std::size_t n) {
  std::vector<std::size_t> idx{0};
  std::uint32_t x = seed;
  for (;;) {
    x = fixture::reference_xorshift32(x);
    const std::size_t next = idx.back() + 1 + x % modulus;
    if (next >= n) break;
    idx.push_back(next);
  }
  return idx;
}

}  // namespace

TEST(BuildPattern, SeedOneCrTenFirstGapIsNineteen) {
  const auto p = build_pattern(1, StepPolicy(10), 40);
  const std::vector<std::size_t> expected{0, 19, 29, 39};
  EXPECT_EQ(p.indices, expected);
  EXPECT_EQ(p.indices, oracle_pattern(1, 19, 40));
}

TEST(BuildPattern, MatchesIndependentChain) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto seed = static_cast<std::uint32_t>(gen()) | 1u;
    const auto cr = static_cast<std::uint16_t>(2 + gen() % 40);
    const auto mode = trial % 2 ? StepMode::literal_eq1 : StepMode::mean_exact;
    const std::size_t n = 2 + gen() % 20000;
    const StepPolicy policy(cr, mode);
    ASSERT_EQ(build_pattern(seed, policy, n).indices, oracle_pattern(seed, policy.modulus(), n));
  }
}

TEST(BuildPattern, ShortestSignal) {
  for (std::uint32_t seed : {1u, 2u, 3u, 0xFFFFFFFFu}) {
    const auto p = build_pattern(seed, StepPolicy(2), 2);
    ASSERT_GE(p.indices.size(), 1u);
    ASSERT_LE(p.indices.size(), 2u);
    EXPECT_EQ(p.indices[0], 0u);
  }
}

TEST(BuildPattern, CountNearNOverCr) {
  const auto p = build_pattern(1, StepPolicy(10), 80000);
  EXPECT_GE(p.indices.size(), 7200u);
  EXPECT_LE(p.indices.size(), 8800u);
  EXPECT_EQ(p.indices.size(), 8035u);  // frozen from the independent chain
}

TEST(BuildPattern, Invariants) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + gen() % 50000;
    const auto p = build_pattern(static_cast<std::uint32_t>(gen()) | 1u,
                                 StepPolicy(static_cast<std::uint16_t>(2 + gen() % 30)), n);
    ASSERT_EQ(p.indices.front(), 0u);
    ASSERT_LT(p.indices.back(), n);
    for (std::size_t i = 1; i < p.indices.size(); ++i) ASSERT_GT(p.indices[i], p.indices[i - 1]);
  }
}

TEST(BuildPattern, Errors) {
  EXPECT_THROW(build_pattern(0, StepPolicy(4), 100), error);
  EXPECT_THROW(build_pattern(1, StepPolicy(4), 1), error);
}

TEST(BuildPattern, AchievedCrConcentrates) {
  for (std::uint16_t cr : {4, 10, 30}) {
    const auto p = build_pattern(2024, StepPolicy(cr), 1'000'000);
    const double achieved = 1e6 / static_cast<double>(p.indices.size());
    EXPECT_NEAR(achieved, cr, 0.01 * cr) << "cr " << cr;
  }
}

TEST(Compress, ConstantSignalRetainsConstant) {
  const Signal s(std::vector<double>(5000, 0.375), 8000);
  const auto rec = compress(s, 9, StepPolicy(5));
  ASSERT_FALSE(rec.values.empty());
  for (float v : rec.values) EXPECT_EQ(v, 0.375f);
}

TEST(Compress, StreamingEqualsBatchGather) {
  std::mt19937_64 gen(4);
  const Signal s(fixture::random_samples(20000, gen), 8000, Channel::respiratory);
  const auto pattern = build_pattern(31337, StepPolicy(7), s.size());
  std::vector<float> direct;
  for (auto i : pattern.indices) direct.push_back(static_cast<float>(s.samples()[i]));
  for (std::size_t chunk : {std::size_t{64}, std::size_t{1000}, s.size()}) {
    const auto rec = compress(s, 31337, StepPolicy(7), chunk);
    EXPECT_EQ(rec.values, direct) << "chunk " << chunk;
  }
}

TEST(Compress, AnyChunkingGivesSameRecord) {
  std::mt19937_64 gen(12);
  const Signal s(fixture::random_samples(300, gen), 4000, Channel::pcg);
  const auto reference = compress(s, 77, StepPolicy(3, StepMode::literal_eq1), 0);
  for (std::size_t chunk = 1; chunk <= s.size(); ++chunk) {
    ASSERT_EQ(compress(s, 77, StepPolicy(3, StepMode::literal_eq1), chunk), reference) << chunk;
  }
}

TEST(Compress, MetadataAndSize) {
  const Signal s = Signal::respiratory(std::vector<double>(80000, 0.1));
  const auto rec = compress(s, 5, StepPolicy(10));
  EXPECT_EQ(rec.original_len, 80000u);
  EXPECT_EQ(rec.sample_rate_hz, 8000u);
  EXPECT_EQ(rec.channel, Channel::respiratory);
  EXPECT_EQ(rec.seed, 5u);
  EXPECT_NEAR(static_cast<double>(rec.values.size()), 8000.0, 800.0);
  EXPECT_EQ(rec.values.size(), build_pattern(rec).indices.size());
}

TEST(Compress, Errors) {
  const Signal empty(std::vector<double>{}, 8000);
  EXPECT_THROW(compress(empty, 1, StepPolicy(4)), error);
  const Signal s(std::vector<double>(10, 0.0), 8000);
  EXPECT_THROW(compress(s, 0, StepPolicy(4)), error);
}
