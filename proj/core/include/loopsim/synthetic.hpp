#pragma once

#include <cstdint>
#include <vector>

#include "loopsim/country.hpp"
#include "loopsim/dataset.hpp"

namespace loopsim {

struct CountrySpec {
  CountryLabel country;
  std::uint32_t users = 0;
  std::uint32_t tracks = 0;
};

/// Country-skewed implicit-feedback dataset.
///
/// Every interaction picks a track country first: the majority country with
/// a probability chosen so that its overall interaction share equals
/// `majority_share`; otherwise, with probability `local_affinity`, the
/// user's own country (for users outside the majority and OTHER), and
/// otherwise a non-majority country in proportion to its track count. Within
/// a country, track popularity follows a rank-based power law with weight
/// (rank + 1)^-popularity_exponent. Each track is first seeded with `core`
/// distinct users, so the result is `core`-core by construction.
struct SyntheticSpec {
  std::vector<CountrySpec> countries;
  CountryLabel majority_country = kUnitedStates;
  double majority_share = 0.45;
  double local_affinity = 0.5;
  double popularity_exponent = 1.0;
  std::uint32_t min_user_interactions = 20;
  std::uint32_t max_user_interactions = 40;
  std::uint32_t core = 5;

  /// Throws ConfigError for out-of-range values and InfeasibleSpecError when
  /// the size constraints cannot be met.
  void validate() const;
};

InteractionDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

/// Block-structured dataset: users and items are split into equally sized
/// clusters; a user interacts with each item of its own cluster with
/// probability `within_density` and with any other item with probability
/// `across_density`. Countries are all OTHER.
struct BlockSpec {
  std::uint32_t users = 200;
  std::uint32_t items = 400;
  std::uint32_t clusters = 2;
  double within_density = 0.8;
  double across_density = 0.05;
};

InteractionDataset generate_block_dataset(const BlockSpec& spec, std::uint64_t seed);

}  // namespace loopsim
