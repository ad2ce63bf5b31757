#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "loopsim/dataset.hpp"

namespace loopsim {

struct SplitRatios {
  double train = 0.75;
  double validation = 0.20;
  double test = 0.05;

  /// Throws ConfigError for negative ratios or a sum differing from 1.
  void validate() const;
};

/// Disjoint interaction-index sets (ascending) partitioning a dataset.
struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Uniform random partition of the interactions with set sizes rounded to
/// whole interactions. Afterwards, every user without a training interaction
/// gets one uniformly chosen held-out interaction promoted into train.
DatasetSplit random_split(const InteractionDataset& ds, const SplitRatios& ratios, std::uint64_t seed);

}  // namespace loopsim
