#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "loopsim/errors.hpp"
#include "loopsim/split.hpp"

namespace loopsim {
namespace {

InteractionDataset hundred() {
  // 10 users x 10 tracks, fully observed.
  return testing::from_matrix(std::vector<std::vector<int>>(10, std::vector<int>(10, 1)));
}

TEST(Split, HundredInteractionsGive75_20_5) {
  const auto s = random_split(hundred(), SplitRatios{}, 1);
  EXPECT_EQ(s.train.size(), 75U);
  EXPECT_EQ(s.validation.size(), 20U);
  EXPECT_EQ(s.test.size(), 5U);
}

TEST(Split, IsAPartition) {
  const auto ds = hundred();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = random_split(ds, SplitRatios{}, seed);
    std::vector<std::size_t> all;
    for (const auto* part : {&s.train, &s.validation, &s.test}) {
      EXPECT_TRUE(std::is_sorted(part->begin(), part->end()));
      all.insert(all.end(), part->begin(), part->end());
    }
    std::sort(all.begin(), all.end());
    ASSERT_EQ(all.size(), ds.num_interactions());
    for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
  }
}

TEST(Split, DeterministicPerSeed) {
  const auto ds = hundred();
  const auto a = random_split(ds, SplitRatios{}, 5);
  const auto b = random_split(ds, SplitRatios{}, 5);
  const auto c = random_split(ds, SplitRatios{}, 6);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.validation, b.validation);
  EXPECT_NE(a.train, c.train);
}

TEST(Split, EveryUserKeepsATrainingInteraction) {
  // u00 has a single interaction; the rest are dense.
  std::vector<std::vector<int>> m(8, std::vector<int>(12, 1));
  m[0] = std::vector<int>(12, 0);
  m[0][3] = 1;
  const auto ds = testing::from_matrix(m);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = random_split(ds, SplitRatios{}, seed);
    std::set<UserIndex> users;
    for (auto i : s.train) users.insert(ds.interactions()[i].user);
    EXPECT_EQ(users.size(), ds.num_users()) << "seed " << seed;
  }
}

TEST(Split, InvalidRatios) {
  EXPECT_THROW((SplitRatios{0.5, 0.2, 0.2}).validate(), ConfigError);
  EXPECT_THROW((SplitRatios{1.1, -0.1, 0.0}).validate(), ConfigError);
  EXPECT_THROW((SplitRatios{0.0, 0.5, 0.5}).validate(), ConfigError);
  EXPECT_NO_THROW((SplitRatios{1.0, 0.0, 0.0}).validate());
  EXPECT_THROW(random_split(hundred(), SplitRatios{0.5, 0.2, 0.2}, 1), ConfigError);
}

}  // namespace
}  // namespace loopsim
