#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "loopsim/country.hpp"

namespace loopsim {

using UserIndex = std::uint32_t;
using TrackIndex = std::uint32_t;

struct UserMeta {
  std::string id;
  CountryLabel country;

  bool operator==(const UserMeta&) const = default;
};

struct TrackMeta {
  std::string id;
  CountryLabel country;

  bool operator==(const TrackMeta&) const = default;
};

/// One (user, track) interaction. `origin` is 0 for interactions of the
/// initial dataset and i for items accepted in simulation iteration i.
struct Interaction {
  UserIndex user = 0;
  TrackIndex track = 0;
  std::uint32_t count = 1;
  std::uint32_t origin = 0;

  bool augmented() const noexcept { return origin != 0; }
  bool operator==(const Interaction&) const = default;
};

/// Accepted item per user for one iteration, keyed by user index.
using AcceptedItems = std::map<UserIndex, TrackIndex>;

/// Users, tracks and the interaction multiset that make up the evolving
/// ground truth of a simulation.
///
/// Users and tracks are stored sorted by id, so index order equals id order
/// and every "ascending track_id" tie-break can compare indices. Instances are
/// immutable; `augmented` returns a new dataset.
class InteractionDataset {
 public:
  InteractionDataset() = default;

  /// `users` and `tracks` must be sorted by id with unique ids. Throws
  /// InvariantViolation when an interaction references an unknown index, an
  /// augmented interaction duplicates an already-seen pair, or some user or
  /// track has no interaction at all.
  InteractionDataset(std::vector<UserMeta> users, std::vector<TrackMeta> tracks,
                     std::vector<Interaction> interactions);

  std::size_t num_users() const noexcept { return users_.size(); }
  std::size_t num_tracks() const noexcept { return tracks_.size(); }
  std::size_t num_interactions() const noexcept { return interactions_.size(); }
  bool empty() const noexcept { return interactions_.empty(); }

  std::span<const UserMeta> users() const noexcept { return users_; }
  std::span<const TrackMeta> tracks() const noexcept { return tracks_; }
  std::span<const Interaction> interactions() const noexcept { return interactions_; }
  std::span<const CountryLabel> track_countries() const noexcept { return track_countries_; }

  const UserMeta& user(UserIndex u) const { return users_.at(u); }
  const TrackMeta& track(TrackIndex t) const { return tracks_.at(t); }

  std::optional<UserIndex> find_user(std::string_view id) const;
  std::optional<TrackIndex> find_track(std::string_view id) const;

  /// The user's items: initial history first, then accepted items in
  /// iteration order.
  std::span<const TrackIndex> profile(UserIndex u) const;

  /// Prefix of `profile(u)` that belongs to the initial dataset.
  std::span<const TrackIndex> initial_profile(UserIndex u) const;

  /// Distinct items of the user, ascending.
  std::span<const TrackIndex> seen(UserIndex u) const;
  bool has_seen(UserIndex u, TrackIndex t) const;

  /// Number of interactions per track (binarized: one per interaction row).
  std::vector<std::uint32_t> track_interaction_counts() const;

  /// Returns a dataset with one new interaction per accepted entry, tagged
  /// with `iteration`. Throws InvariantViolation if an accepted item was
  /// already seen by that user, ContractError for unknown indices.
  InteractionDataset augmented(const AcceptedItems& accepted, std::uint32_t iteration) const;

  /// The dataset restricted to interactions with origin 0.
  InteractionDataset initial_only() const;

  /// Highest origin iteration present (0 for a fresh dataset).
  std::uint32_t last_iteration() const noexcept { return last_iteration_; }

 private:
  void build_indexes();

  std::vector<UserMeta> users_;
  std::vector<TrackMeta> tracks_;
  std::vector<Interaction> interactions_;
  std::vector<CountryLabel> track_countries_;

  std::vector<std::size_t> profile_offsets_;
  std::vector<TrackIndex> profile_items_;
  std::vector<std::size_t> initial_sizes_;
  std::vector<std::size_t> seen_offsets_;
  std::vector<TrackIndex> seen_items_;
  std::unordered_map<std::string, UserIndex> user_lookup_;
  std::unordered_map<std::string, TrackIndex> track_lookup_;
  std::uint32_t last_iteration_ = 0;
};

/// Collects string-keyed interaction rows and produces a canonical dataset.
class DatasetBuilder {
 public:
  /// Rows for the same (user, track, origin) merge by summing counts. Throws
  /// DataError if a user or track id is seen with two different countries.
  void add(std::string_view user_id, CountryLabel user_country, std::string_view track_id,
           CountryLabel track_country, std::uint32_t count = 1, std::uint32_t origin = 0);

  std::size_t size() const noexcept { return rows_.size(); }

  InteractionDataset build() const;

 private:
  struct Row {
    std::uint32_t user;
    std::uint32_t track;
    std::uint32_t count;
    std::uint32_t origin;
  };

  std::uint32_t intern_user(std::string_view id, CountryLabel country);
  std::uint32_t intern_track(std::string_view id, CountryLabel country);

  std::vector<UserMeta> users_;
  std::vector<TrackMeta> tracks_;
  std::unordered_map<std::string, std::uint32_t> user_ids_;
  std::unordered_map<std::string, std::uint32_t> track_ids_;
  std::vector<Row> rows_;
  std::unordered_map<std::uint64_t, std::size_t> row_lookup_;
};

}  // namespace loopsim
