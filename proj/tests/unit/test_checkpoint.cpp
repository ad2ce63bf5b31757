#include <gtest/gtest.h>

#include <fstream>

#include "fixtures.hpp"
#include "loopsim/checkpoint.hpp"
#include "loopsim/errors.hpp"
#include "loopsim/ingest.hpp"

namespace loopsim {
namespace {

InteractionDataset augmented_toy() {
  auto ds = testing::make_dataset({{"a", "US", "x", "US"},
                                   {"a", "US", "y", "DE"},
                                   {"b", "DE", "y", "DE"},
                                   {"c", "", "z", ""},
                                   {"c", "", "x", "US"}});
  const auto a = *ds.find_user("a");
  const auto b = *ds.find_user("b");
  const auto x = *ds.find_track("x");
  const auto z = *ds.find_track("z");
  ds = ds.augmented({{a, z}, {b, x}}, 1);
  return ds.augmented({{b, z}}, 2);
}

TEST(Checkpoint, PathLayout) {
  EXPECT_EQ(checkpoint_path("runs/r1", 7), std::filesystem::path("runs/r1/checkpoints/iter_0007"));
  EXPECT_EQ(checkpoint_path("r", 12345).filename(), "iter_12345");
}

TEST(Checkpoint, RoundTripKeepsProvenance) {
  const auto ds = augmented_toy();
  const auto root = testing::temp_dir("checkpoint_roundtrip");
  const auto dir = checkpoint_path(root, 2);
  const auto fp = fingerprint_hex(dataset_fingerprint(ds));
  {
    std::ofstream(root / "metrics.csv") << "snapshot\n";
  }
  write_checkpoint(dir, ds, CheckpointState{2, 99, "deadbeef", fp}, root / "metrics.csv", "{\"k\": 1}\n");

  const auto cp = load_checkpoint(dir);
  EXPECT_EQ(cp.state.iteration, 2U);
  EXPECT_EQ(cp.state.seed, 99U);
  EXPECT_EQ(cp.state.config_hash, "deadbeef");
  EXPECT_TRUE(std::ranges::equal(cp.dataset.users(), ds.users()));
  EXPECT_TRUE(std::ranges::equal(cp.dataset.tracks(), ds.tracks()));
  EXPECT_TRUE(std::ranges::equal(cp.dataset.interactions(), ds.interactions()));
  EXPECT_EQ(cp.dataset.last_iteration(), 2U);
  EXPECT_EQ(cp.config_text, "{\"k\": 1}\n");
  EXPECT_EQ(cp.metrics_csv, dir / "metrics.csv");
  EXPECT_TRUE(std::ranges::equal(cp.dataset.initial_only().interactions(), ds.initial_only().interactions()));
}

TEST(Checkpoint, RewriteReplacesOlderCheckpoint) {
  const auto ds = augmented_toy();
  const auto dir = checkpoint_path(testing::temp_dir("checkpoint_rewrite"), 2);
  write_checkpoint(dir, ds.initial_only(), CheckpointState{2, 1, "", ""});
  write_checkpoint(dir, ds, CheckpointState{2, 1, "", ""});
  EXPECT_EQ(load_checkpoint(dir).dataset.num_interactions(), ds.num_interactions());
  EXPECT_FALSE(std::filesystem::exists(dir.string() + ".tmp"));
}

TEST(Checkpoint, FingerprintMismatchIsDetected) {
  const auto ds = augmented_toy();
  const auto dir = checkpoint_path(testing::temp_dir("checkpoint_tamper"), 2);
  write_checkpoint(dir, ds, CheckpointState{2, 1, "", fingerprint_hex(dataset_fingerprint(ds))});
  {
    std::ofstream out(dir / "interactions.tsv", std::ios::app);
    out << "d\tx\tUS\tUS\t1\n";
  }
  EXPECT_THROW(load_checkpoint(dir), DataError);
}

TEST(Checkpoint, MissingPiecesAreDataErrors) {
  const auto root = testing::temp_dir("checkpoint_missing");
  EXPECT_THROW(load_checkpoint(root / "nope"), DataError);
  std::filesystem::create_directories(root / "empty");
  EXPECT_THROW(load_checkpoint(root / "empty"), DataError);

  const auto dir = checkpoint_path(root, 1);
  write_checkpoint(dir, augmented_toy(), CheckpointState{1, 1, "", ""});
  {
    std::ofstream(dir / "state.json") << "{not json";
  }
  EXPECT_THROW(load_checkpoint(dir), DataError);
}

}  // namespace
}  // namespace loopsim
