#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "loopsim/country.hpp"
#include "loopsim/dataset.hpp"
#include "loopsim/recommender.hpp"

namespace loopsim {

/// Metrics of one user at one iteration. Recommendation-side values are
/// absent for the baseline and for skipped users. JSDs compare against the
/// user's initial profile.
struct UserRecord {
  UserIndex user = 0;
  std::optional<TrackIndex> accepted;
  std::vector<TrackIndex> recommended;

  std::optional<double> rec_local;
  std::optional<double> rec_us;
  std::optional<double> rec_country_jsd;
  std::optional<double> rec_pop_jsd;

  double prof_local = 0.0;
  double prof_us = 0.0;
  double profile_country_jsd = 0.0;
  /// Popularity bins recomputed on the dataset after this iteration.
  double profile_pop_jsd = 0.0;
  /// Popularity bins of the initial dataset.
  double profile_pop_jsd_frozen = 0.0;
  std::size_t profile_size = 0;

  bool skipped() const noexcept { return !accepted.has_value(); }
  bool operator==(const UserRecord&) const = default;
};

struct IterationRecord {
  std::uint32_t iteration = 0;
  std::optional<double> validation_ndcg;
  std::optional<FitReport> fit;
  /// Indexed by user.
  std::vector<UserRecord> users;
  std::size_t skipped_users = 0;

  std::size_t accepted_count() const noexcept;
  bool is_baseline() const noexcept { return iteration == 0; }
};

/// Means over a set of users. Recommendation means cover only users that
/// received a list; they are absent when there are none.
struct RecordSummary {
  std::size_t users = 0;
  std::size_t users_with_recs = 0;
  std::size_t accepted = 0;
  double prof_local = 0.0;
  double prof_us = 0.0;
  double profile_country_jsd = 0.0;
  double profile_pop_jsd = 0.0;
  double profile_pop_jsd_frozen = 0.0;
  std::optional<double> rec_local;
  std::optional<double> rec_us;
  std::optional<double> rec_country_jsd;
  std::optional<double> rec_pop_jsd;
};

/// Summary over all users, or over the users whose country is `country`.
RecordSummary summarize(const IterationRecord& record, std::span<const UserMeta> users,
                        std::optional<CountryLabel> country = std::nullopt);

/// Same, over an explicit user selection.
RecordSummary summarize(const IterationRecord& record, std::span<const UserIndex> selection);

}  // namespace loopsim
