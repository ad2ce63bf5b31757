#pragma once

#include <cstdint>

#include "loopsim/dataset.hpp"

namespace loopsim {

struct FilterOptions {
  /// Tracks with fewer interactions are removed; 0 or 1 disables.
  std::uint32_t min_track_interactions = 0;
  /// Iterative k-core on users and tracks; 0 disables.
  std::uint32_t k_core = 0;
};

/// Removes under-supported tracks and (for k-core) users, repeating until
/// nothing changes, then drops users and tracks left without interactions.
/// Idempotent. Interaction order and provenance are preserved. Throws
/// EmptyDatasetError if nothing remains.
InteractionDataset apply_filters(const InteractionDataset& ds, const FilterOptions& options);

}  // namespace loopsim
