#include "loopsim/filter.hpp"

#include <algorithm>
#include <vector>

#include "loopsim/errors.hpp"

namespace loopsim {

InteractionDataset apply_filters(const InteractionDataset& ds, const FilterOptions& options) {
  const auto interactions = ds.interactions();
  const std::uint32_t track_min = std::max(options.min_track_interactions, options.k_core);
  const std::uint32_t user_min = options.k_core;

  std::vector<bool> alive(interactions.size(), true);
  std::vector<bool> user_alive(ds.num_users(), true);
  std::vector<bool> track_alive(ds.num_tracks(), true);

  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::uint32_t> user_count(ds.num_users(), 0);
    std::vector<std::uint32_t> track_count(ds.num_tracks(), 0);
    for (std::size_t i = 0; i < interactions.size(); ++i) {
      if (!alive[i]) continue;
      ++user_count[interactions[i].user];
      ++track_count[interactions[i].track];
    }
    for (std::size_t t = 0; t < track_alive.size(); ++t) {
      if (track_alive[t] && track_count[t] < std::max<std::uint32_t>(track_min, 1)) {
        track_alive[t] = false;
        changed = true;
      }
    }
    for (std::size_t u = 0; u < user_alive.size(); ++u) {
      if (user_alive[u] && user_count[u] < std::max<std::uint32_t>(user_min, 1)) {
        user_alive[u] = false;
        changed = true;
      }
    }
    for (std::size_t i = 0; i < interactions.size(); ++i) {
      if (alive[i] && (!user_alive[interactions[i].user] || !track_alive[interactions[i].track])) {
        alive[i] = false;
        changed = true;
      }
    }
  }

  std::vector<UserIndex> user_map(ds.num_users(), 0);
  std::vector<TrackIndex> track_map(ds.num_tracks(), 0);
  std::vector<UserMeta> users;
  std::vector<TrackMeta> tracks;
  for (std::size_t u = 0; u < ds.num_users(); ++u) {
    if (!user_alive[u]) continue;
    user_map[u] = static_cast<UserIndex>(users.size());
    users.push_back(ds.users()[u]);
  }
  for (std::size_t t = 0; t < ds.num_tracks(); ++t) {
    if (!track_alive[t]) continue;
    track_map[t] = static_cast<TrackIndex>(tracks.size());
    tracks.push_back(ds.tracks()[t]);
  }
  std::vector<Interaction> kept;
  kept.reserve(interactions.size());
  for (std::size_t i = 0; i < interactions.size(); ++i) {
    if (!alive[i]) continue;
    auto x = interactions[i];
    x.user = user_map[x.user];
    x.track = track_map[x.track];
    kept.push_back(x);
  }
  if (kept.empty()) throw EmptyDatasetError();
  return InteractionDataset(std::move(users), std::move(tracks), std::move(kept));
}

}  // namespace loopsim
