#include "loopsim/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "loopsim/errors.hpp"

namespace loopsim {

InteractionDataset::InteractionDataset(std::vector<UserMeta> users, std::vector<TrackMeta> tracks,
                                       std::vector<Interaction> interactions)
    : users_(std::move(users)), tracks_(std::move(tracks)), interactions_(std::move(interactions)) {
  auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
  auto same_id = [](const auto& a, const auto& b) { return a.id == b.id; };
  if (!std::is_sorted(users_.begin(), users_.end(), by_id) ||
      std::adjacent_find(users_.begin(), users_.end(), same_id) != users_.end()) {
    throw InvariantViolation("users must be sorted by id with unique ids");
  }
  if (!std::is_sorted(tracks_.begin(), tracks_.end(), by_id) ||
      std::adjacent_find(tracks_.begin(), tracks_.end(), same_id) != tracks_.end()) {
    throw InvariantViolation("tracks must be sorted by id with unique ids");
  }
  for (const auto& x : interactions_) {
    if (x.user >= users_.size() || x.track >= tracks_.size()) {
      throw InvariantViolation("interaction references an unknown user or track");
    }
    if (x.count == 0) throw InvariantViolation("interaction count must be >= 1");
  }
  build_indexes();
}

void InteractionDataset::build_indexes() {
  const std::size_t n_users = users_.size();
  track_countries_.resize(tracks_.size());
  for (std::size_t t = 0; t < tracks_.size(); ++t) track_countries_[t] = tracks_[t].country;

  std::vector<std::size_t> per_user(n_users, 0);
  std::vector<std::size_t> per_track(tracks_.size(), 0);
  for (const auto& x : interactions_) {
    ++per_user[x.user];
    ++per_track[x.track];
    last_iteration_ = std::max(last_iteration_, x.origin);
  }
  for (std::size_t u = 0; u < n_users; ++u) {
    if (per_user[u] == 0) throw InvariantViolation("user '" + users_[u].id + "' has no interactions");
  }
  for (std::size_t t = 0; t < tracks_.size(); ++t) {
    if (per_track[t] == 0) throw InvariantViolation("track '" + tracks_[t].id + "' has no interactions");
  }

  profile_offsets_.assign(n_users + 1, 0);
  for (std::size_t u = 0; u < n_users; ++u) profile_offsets_[u + 1] = profile_offsets_[u] + per_user[u];

  // Stable bucket by user, then stable-sort each bucket by origin so that the
  // initial history leads and accepted items follow in iteration order.
  std::vector<const Interaction*> ordered(interactions_.size());
  {
    std::vector<std::size_t> cursor(profile_offsets_.begin(), profile_offsets_.end() - 1);
    for (const auto& x : interactions_) ordered[cursor[x.user]++] = &x;
  }
  profile_items_.resize(interactions_.size());
  initial_sizes_.assign(n_users, 0);
  seen_offsets_.assign(n_users + 1, 0);
  seen_items_.clear();
  seen_items_.reserve(interactions_.size());
  for (std::size_t u = 0; u < n_users; ++u) {
    auto first = ordered.begin() + static_cast<std::ptrdiff_t>(profile_offsets_[u]);
    auto last = ordered.begin() + static_cast<std::ptrdiff_t>(profile_offsets_[u + 1]);
    std::stable_sort(first, last, [](const Interaction* a, const Interaction* b) {
      return a->origin < b->origin;
    });
    std::size_t pos = profile_offsets_[u];
    for (auto it = first; it != last; ++it) {
      profile_items_[pos++] = (*it)->track;
      if (!(*it)->augmented()) ++initial_sizes_[u];
    }

    std::vector<TrackIndex> initial(profile_items_.begin() + static_cast<std::ptrdiff_t>(profile_offsets_[u]),
                                    profile_items_.begin() + static_cast<std::ptrdiff_t>(profile_offsets_[u] + initial_sizes_[u]));
    std::sort(initial.begin(), initial.end());
    initial.erase(std::unique(initial.begin(), initial.end()), initial.end());
    std::vector<TrackIndex> distinct = initial;
    for (std::size_t p = profile_offsets_[u] + initial_sizes_[u]; p < profile_offsets_[u + 1]; ++p) {
      distinct.push_back(profile_items_[p]);
    }
    std::sort(distinct.begin(), distinct.end());
    const auto augmented_count = profile_offsets_[u + 1] - profile_offsets_[u] - initial_sizes_[u];
    if (std::adjacent_find(distinct.begin(), distinct.end()) != distinct.end() ||
        distinct.size() != initial.size() + augmented_count) {
      throw InvariantViolation("user '" + users_[u].id +
                               "' has an augmented interaction with an already-seen track");
    }
    seen_items_.insert(seen_items_.end(), distinct.begin(), distinct.end());
    seen_offsets_[u + 1] = seen_items_.size();
  }

  user_lookup_.clear();
  track_lookup_.clear();
  user_lookup_.reserve(n_users);
  track_lookup_.reserve(tracks_.size());
  for (std::size_t u = 0; u < n_users; ++u) user_lookup_.emplace(users_[u].id, static_cast<UserIndex>(u));
  for (std::size_t t = 0; t < tracks_.size(); ++t) track_lookup_.emplace(tracks_[t].id, static_cast<TrackIndex>(t));
}

std::optional<UserIndex> InteractionDataset::find_user(std::string_view id) const {
  auto it = user_lookup_.find(std::string(id));
  if (it == user_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<TrackIndex> InteractionDataset::find_track(std::string_view id) const {
  auto it = track_lookup_.find(std::string(id));
  if (it == track_lookup_.end()) return std::nullopt;
  return it->second;
}

std::span<const TrackIndex> InteractionDataset::profile(UserIndex u) const {
  if (u >= users_.size()) throw ContractError("user index out of range");
  return std::span<const TrackIndex>(profile_items_).subspan(
      profile_offsets_[u], profile_offsets_[u + 1] - profile_offsets_[u]);
}

std::span<const TrackIndex> InteractionDataset::initial_profile(UserIndex u) const {
  return profile(u).first(initial_sizes_[u]);
}

std::span<const TrackIndex> InteractionDataset::seen(UserIndex u) const {
  if (u >= users_.size()) throw ContractError("user index out of range");
  return std::span<const TrackIndex>(seen_items_).subspan(seen_offsets_[u],
                                                          seen_offsets_[u + 1] - seen_offsets_[u]);
}

bool InteractionDataset::has_seen(UserIndex u, TrackIndex t) const {
  auto s = seen(u);
  return std::binary_search(s.begin(), s.end(), t);
}

std::vector<std::uint32_t> InteractionDataset::track_interaction_counts() const {
  std::vector<std::uint32_t> counts(tracks_.size(), 0);
  for (const auto& x : interactions_) ++counts[x.track];
  return counts;
}

InteractionDataset InteractionDataset::augmented(const AcceptedItems& accepted,
                                                 std::uint32_t iteration) const {
  if (accepted.empty()) return *this;
  if (iteration == 0) throw ContractError("augmentation iteration must be >= 1");
  std::vector<Interaction> next = interactions_;
  next.reserve(interactions_.size() + accepted.size());
  for (const auto& [user, track] : accepted) {
    if (user >= users_.size() || track >= tracks_.size()) {
      throw ContractError("accepted item references an unknown user or track");
    }
    if (has_seen(user, track)) {
      throw InvariantViolation("user '" + users_[user].id + "' accepted already-seen track '" +
                               tracks_[track].id + "'");
    }
    next.push_back(Interaction{user, track, 1, iteration});
  }
  return InteractionDataset(users_, tracks_, std::move(next));
}

InteractionDataset InteractionDataset::initial_only() const {
  if (last_iteration_ == 0) return *this;
  std::vector<Interaction> initial;
  initial.reserve(interactions_.size());
  for (const auto& x : interactions_) {
    if (!x.augmented()) initial.push_back(x);
  }
  // Augmentation never introduces users or tracks, so the id tables carry over.
  return InteractionDataset(users_, tracks_, std::move(initial));
}

void DatasetBuilder::add(std::string_view user_id, CountryLabel user_country,
                         std::string_view track_id, CountryLabel track_country,
                         std::uint32_t count, std::uint32_t origin) {
  if (count == 0) throw DataError("interaction count must be >= 1");
  const auto u = intern_user(user_id, user_country);
  const auto t = intern_track(track_id, track_country);
  if (origin == 0) {
    const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | t;
    auto [it, inserted] = row_lookup_.try_emplace(key, rows_.size());
    if (!inserted) {
      rows_[it->second].count += count;
      return;
    }
  }
  rows_.push_back(Row{u, t, count, origin});
}

std::uint32_t DatasetBuilder::intern_user(std::string_view id, CountryLabel country) {
  if (id.empty()) throw DataError("empty user id");
  auto [it, inserted] = user_ids_.try_emplace(std::string(id), static_cast<std::uint32_t>(users_.size()));
  if (inserted) {
    users_.push_back(UserMeta{std::string(id), country});
  } else if (users_[it->second].country != country) {
    throw DataError("user '" + std::string(id) + "' appears with two different countries");
  }
  return it->second;
}

std::uint32_t DatasetBuilder::intern_track(std::string_view id, CountryLabel country) {
  if (id.empty()) throw DataError("empty track id");
  auto [it, inserted] = track_ids_.try_emplace(std::string(id), static_cast<std::uint32_t>(tracks_.size()));
  if (inserted) {
    tracks_.push_back(TrackMeta{std::string(id), country});
  } else if (tracks_[it->second].country != country) {
    throw DataError("track '" + std::string(id) + "' appears with two different countries");
  }
  return it->second;
}

InteractionDataset DatasetBuilder::build() const {
  auto sorted_order = [](const auto& metas) {
    std::vector<std::uint32_t> order(metas.size());
    std::iota(order.begin(), order.end(), 0U);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return metas[a].id < metas[b].id; });
    return order;
  };
  const auto user_order = sorted_order(users_);
  const auto track_order = sorted_order(tracks_);

  std::vector<std::uint32_t> user_rank(users_.size());
  std::vector<std::uint32_t> track_rank(tracks_.size());
  std::vector<UserMeta> users;
  std::vector<TrackMeta> tracks;
  users.reserve(users_.size());
  tracks.reserve(tracks_.size());
  for (std::uint32_t i = 0; i < user_order.size(); ++i) {
    user_rank[user_order[i]] = i;
    users.push_back(users_[user_order[i]]);
  }
  for (std::uint32_t i = 0; i < track_order.size(); ++i) {
    track_rank[track_order[i]] = i;
    tracks.push_back(tracks_[track_order[i]]);
  }

  std::vector<Interaction> interactions;
  interactions.reserve(rows_.size());
  for (const auto& r : rows_) {
    interactions.push_back(Interaction{user_rank[r.user], track_rank[r.track], r.count, r.origin});
  }
  return InteractionDataset(std::move(users), std::move(tracks), std::move(interactions));
}

}  // namespace loopsim
