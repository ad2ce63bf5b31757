#pragma once

#include <vector>

#include "loopsim/dataset.hpp"

namespace loopsim {

struct ScoredItem {
  TrackIndex track = 0;
  double score = 0.0;

  bool operator==(const ScoredItem&) const = default;
};

/// Top-k list for one user: scores non-increasing, ties by ascending track
/// id, never containing a seen item. Rank r (1-based) is entries[r - 1].
struct RecommendationList {
  UserIndex user = 0;
  std::vector<ScoredItem> entries;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
  std::vector<TrackIndex> tracks() const;
};

}  // namespace loopsim
