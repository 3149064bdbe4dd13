#include <gtest/gtest.h>

#include <set>

#include "fixtures.h"
#include "rsched/random.h"

using namespace rsched;

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

TEST(Random, EngineMatchesReferenceSequence) {
  Rng rng(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next();
  EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(Random, DeriveSeedChainsSplitmix) {
  const std::uint64_t h = splitmix(splitmix(splitmix(7) ^ 2) ^ 11);
  EXPECT_EQ(derive_seed(7, StreamTag::kRollout, 11), h);
}

TEST(Random, StreamsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t master : {0ULL, 1ULL, 2ULL}) {
    for (auto tag : {StreamTag::kGenerator, StreamTag::kRollout, StreamTag::kStability,
                     StreamTag::kExperimentCell, StreamTag::kFixture}) {
      for (std::uint64_t index = 0; index < 50; ++index) {
        EXPECT_TRUE(seen.insert(derive_seed(master, tag, index)).second);
      }
    }
  }
}

TEST(Random, SameSeedSameStream) {
  Rng a = Rng::stream(3, StreamTag::kRollout, 4);
  Rng b = Rng::stream(3, StreamTag::kRollout, 4);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Random, Uniform01Range) {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / 100000.0));
}

TEST(Random, UniformIntIsUniform) {
  Rng rng(2);
  std::vector<long> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = rng.uniform_int(-3, 3);
    ASSERT_GE(v, -3);
    ASSERT_LE(v, 3);
    ++counts[static_cast<std::size_t>(v + 3)];
  }
  const std::vector<double> probs(7, 1.0 / 7.0);
  EXPECT_LT(rsched::testing::chi2_statistic(counts, probs), rsched::testing::chi2_critical(6));
  EXPECT_EQ(rng.uniform_int(5, 5), 5);
  EXPECT_THROW(rng.uniform_int(2, 1), std::invalid_argument);
}
