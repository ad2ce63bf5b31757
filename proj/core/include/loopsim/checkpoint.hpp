#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "loopsim/dataset.hpp"

namespace loopsim {

/// Everything besides the dataset that a resumed run needs. Random streams
/// are derived from (seed, iteration), so no generator state is stored.
struct CheckpointState {
  std::uint32_t iteration = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string dataset_fingerprint;
};

/// `<run_dir>/checkpoints/iter_NNNN`
std::filesystem::path checkpoint_path(const std::filesystem::path& run_dir, std::uint32_t iteration);

/// Writes a checkpoint directory:
///
///   interactions.tsv  the augmented dataset in the ingestion format
///   provenance.tsv    user_id, track_id, iteration of every accepted item
///   state.json        CheckpointState
///   metrics.csv       copy of `metrics_csv` when given
///   config.json       `config_text` when non-empty
///
/// The directory is assembled under a temporary name and renamed into place,
/// replacing an older checkpoint of the same iteration.
void write_checkpoint(const std::filesystem::path& dir, const InteractionDataset& ds, const CheckpointState& state,
                      const std::filesystem::path& metrics_csv = {}, const std::string& config_text = {});

struct Checkpoint {
  std::filesystem::path dir;
  InteractionDataset dataset;
  CheckpointState state;
  /// Empty when the checkpoint holds no metrics snapshot.
  std::filesystem::path metrics_csv;
  std::string config_text;
};

/// Throws DataError for missing or inconsistent files.
Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace loopsim
