#include "loopsim/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "loopsim/errors.hpp"
#include "loopsim/rng.hpp"

namespace loopsim {

namespace {

std::string padded_id(char prefix, std::size_t value, std::size_t total) {
  const std::size_t width = std::max<std::size_t>(6, std::to_string(total).size());
  std::string digits = std::to_string(value);
  return std::string(1, prefix) + std::string(width - digits.size(), '0') + digits;
}

void require_unit_interval(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ConfigError(std::string(name) + " must lie in [0, 1], got " + std::to_string(value));
  }
}

}  // namespace

void SyntheticSpec::validate() const {
  if (countries.empty()) throw ConfigError("synthetic spec needs at least one country");
  std::set<CountryLabel> distinct;
  std::uint64_t users = 0;
  std::uint64_t tracks = 0;
  std::uint64_t majority_tracks = 0;
  for (const auto& c : countries) {
    if (!distinct.insert(c.country).second) {
      throw ConfigError("country '" + std::string(c.country.code()) + "' listed twice");
    }
    users += c.users;
    tracks += c.tracks;
    if (c.country == majority_country) majority_tracks = c.tracks;
  }
  require_unit_interval(majority_share, "majority_share");
  require_unit_interval(local_affinity, "local_affinity");
  if (!(popularity_exponent >= 0.0) || !std::isfinite(popularity_exponent)) {
    throw ConfigError("popularity_exponent must be finite and >= 0");
  }
  if (core == 0) throw ConfigError("core must be >= 1");
  if (min_user_interactions > max_user_interactions) {
    throw ConfigError("min_user_interactions exceeds max_user_interactions");
  }
  if (min_user_interactions < core) {
    throw InfeasibleSpecError("min_user_interactions (" + std::to_string(min_user_interactions) +
                              ") is below the core size " + std::to_string(core));
  }
  if (!distinct.contains(majority_country) || majority_tracks == 0) {
    throw ConfigError("majority country '" + std::string(majority_country.code()) +
                      "' must be listed with at least one track");
  }
  if (users < core) {
    throw InfeasibleSpecError("need at least " + std::to_string(core) + " users for a " +
                              std::to_string(core) + "-core dataset, got " + std::to_string(users));
  }
  if (max_user_interactions > tracks) {
    throw InfeasibleSpecError("max_user_interactions exceeds the number of tracks");
  }
  if (static_cast<std::uint64_t>(core) * tracks > users * max_user_interactions) {
    throw InfeasibleSpecError("users cannot supply " + std::to_string(core) +
                              " interactions to each of " + std::to_string(tracks) + " tracks");
  }
  if (majority_tracks == tracks && majority_share < 1.0) {
    throw InfeasibleSpecError("majority_share < 1 requires tracks outside the majority country");
  }
}

InteractionDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(derive_seed(seed, Stream::kSynthetic));

  // Id layout: countries in spec order, contiguous blocks of users and tracks.
  std::vector<CountryLabel> user_country;
  std::vector<CountryLabel> track_country;
  std::vector<std::vector<TrackIndex>> country_tracks(spec.countries.size());
  std::vector<std::vector<UserIndex>> country_users(spec.countries.size());
  std::vector<std::size_t> user_country_slot;
  std::size_t majority_slot = 0;
  for (std::size_t c = 0; c < spec.countries.size(); ++c) {
    const auto& cs = spec.countries[c];
    if (cs.country == spec.majority_country) majority_slot = c;
    for (std::uint32_t i = 0; i < cs.users; ++i) {
      country_users[c].push_back(static_cast<UserIndex>(user_country.size()));
      user_country.push_back(cs.country);
      user_country_slot.push_back(c);
    }
    for (std::uint32_t i = 0; i < cs.tracks; ++i) {
      country_tracks[c].push_back(static_cast<TrackIndex>(track_country.size()));
      track_country.push_back(cs.country);
    }
  }
  const std::size_t n_users = user_country.size();
  const std::size_t n_tracks = track_country.size();

  std::uniform_int_distribution<std::uint32_t> target_dist(spec.min_user_interactions,
                                                           spec.max_user_interactions);
  std::vector<std::uint32_t> target(n_users);
  std::uint64_t total = 0;
  for (auto& t : target) {
    t = target_dist(rng);
    total += t;
  }
  const std::uint64_t seeded = static_cast<std::uint64_t>(spec.core) * n_tracks;
  if (total < seeded) {
    throw InfeasibleSpecError("drawn interaction budget " + std::to_string(total) +
                              " cannot seed every track with " + std::to_string(spec.core) + " users");
  }
  const double seeded_majority = static_cast<double>(spec.core) * static_cast<double>(country_tracks[majority_slot].size());
  double majority_rate = spec.majority_share;
  if (total > seeded) {
    majority_rate = (spec.majority_share * static_cast<double>(total) - seeded_majority) /
                    static_cast<double>(total - seeded);
    if (majority_rate < -1e-12 || majority_rate > 1.0 + 1e-12) {
      throw InfeasibleSpecError("majority_share " + std::to_string(spec.majority_share) +
                                " is unreachable once every track is seeded with " +
                                std::to_string(spec.core) + " users");
    }
    majority_rate = std::clamp(majority_rate, 0.0, 1.0);
  }

  std::vector<std::vector<TrackIndex>> items(n_users);

  // Phase 1: every track receives `core` distinct users with spare budget,
  // preferring users from the track's own country with probability
  // local_affinity.
  std::uniform_int_distribution<std::size_t> any_user(0, n_users - 1);
  for (std::size_t c = 0; c < spec.countries.size(); ++c) {
    const bool has_local = !spec.countries[c].country.is_other() && !country_users[c].empty();
    for (TrackIndex t : country_tracks[c]) {
      std::vector<UserIndex> chosen;
      auto usable = [&](UserIndex u, bool respect_budget) {
        if (std::find(chosen.begin(), chosen.end(), u) != chosen.end()) return false;
        return !respect_budget || items[u].size() < target[u];
      };
      for (std::uint32_t s = 0; s < spec.core; ++s) {
        std::optional<UserIndex> pick;
        for (int attempt = 0; attempt < 64 && !pick; ++attempt) {
          UserIndex u;
          if (has_local && uniform01(rng) < spec.local_affinity) {
            std::uniform_int_distribution<std::size_t> local(0, country_users[c].size() - 1);
            u = country_users[c][local(rng)];
          } else {
            u = static_cast<UserIndex>(any_user(rng));
          }
          if (usable(u, true)) pick = u;
        }
        for (int pass = 0; pass < 2 && !pick; ++pass) {
          const std::size_t offset = any_user(rng);
          for (std::size_t k = 0; k < n_users; ++k) {
            const auto u = static_cast<UserIndex>((offset + k) % n_users);
            if (usable(u, pass == 0)) {
              pick = u;
              break;
            }
          }
        }
        chosen.push_back(*pick);
        items[*pick].push_back(t);
      }
    }
  }

  // Phase 2: fill every user up to its target.
  std::vector<std::discrete_distribution<std::size_t>> popularity(spec.countries.size());
  for (std::size_t c = 0; c < spec.countries.size(); ++c) {
    std::vector<double> w(country_tracks[c].size());
    for (std::size_t r = 0; r < w.size(); ++r) {
      w[r] = std::pow(static_cast<double>(r + 1), -spec.popularity_exponent);
    }
    if (!w.empty()) popularity[c] = std::discrete_distribution<std::size_t>(w.begin(), w.end());
  }
  std::vector<double> non_majority_weights(spec.countries.size(), 0.0);
  bool any_non_majority = false;
  for (std::size_t c = 0; c < spec.countries.size(); ++c) {
    if (c == majority_slot) continue;
    non_majority_weights[c] = static_cast<double>(country_tracks[c].size());
    any_non_majority = any_non_majority || !country_tracks[c].empty();
  }
  std::discrete_distribution<std::size_t> non_majority(non_majority_weights.begin(), non_majority_weights.end());

  std::vector<char> seen(n_tracks, 0);
  std::uniform_int_distribution<std::size_t> any_track(0, n_tracks - 1);
  for (std::size_t u = 0; u < n_users; ++u) {
    for (TrackIndex t : items[u]) seen[t] = 1;
    const std::size_t home = user_country_slot[u];
    const bool has_local = home != majority_slot && !user_country[u].is_other() && !country_tracks[home].empty();

    // Retries stay inside the drawn category (majority or not) so that
    // saturated small countries do not shift mass onto the majority.
    auto draw_from = [&](std::size_t c) -> std::optional<TrackIndex> {
      if (country_tracks[c].empty()) return std::nullopt;
      for (int draw = 0; draw < 32; ++draw) {
        const TrackIndex t = country_tracks[c][popularity[c](rng)];
        if (!seen[t]) return t;
      }
      return std::nullopt;
    };
    auto scan = [&](bool majority) -> std::optional<TrackIndex> {
      const std::size_t offset = any_track(rng);
      for (std::size_t k = 0; k < n_tracks; ++k) {
        const auto t = static_cast<TrackIndex>((offset + k) % n_tracks);
        if (!seen[t] && (track_country[t] == spec.majority_country) == majority) return t;
      }
      return std::nullopt;
    };
    while (items[u].size() < target[u]) {
      const bool majority = !any_non_majority || uniform01(rng) < majority_rate;
      std::optional<TrackIndex> pick;
      if (majority) {
        pick = draw_from(majority_slot);
      } else {
        const bool local = has_local && uniform01(rng) < spec.local_affinity;
        pick = draw_from(local ? home : non_majority(rng));
        for (int attempt = 0; attempt < 8 && !pick; ++attempt) pick = draw_from(non_majority(rng));
      }
      if (!pick) pick = scan(majority);
      if (!pick) pick = scan(!majority);
      seen[*pick] = 1;
      items[u].push_back(*pick);
    }
    for (TrackIndex t : items[u]) seen[t] = 0;
  }

  DatasetBuilder builder;
  std::vector<std::string> track_ids(n_tracks);
  for (std::size_t t = 0; t < n_tracks; ++t) track_ids[t] = padded_id('t', t + 1, n_tracks);
  for (std::size_t u = 0; u < n_users; ++u) {
    const auto user_id = padded_id('u', u + 1, n_users);
    for (TrackIndex t : items[u]) {
      builder.add(user_id, user_country[u], track_ids[t], track_country[t]);
    }
  }
  return builder.build();
}

InteractionDataset generate_block_dataset(const BlockSpec& spec, std::uint64_t seed) {
  if (spec.users == 0 || spec.items == 0 || spec.clusters == 0) {
    throw ConfigError("block dataset needs users, items and clusters >= 1");
  }
  if (spec.clusters > spec.users || spec.clusters > spec.items) {
    throw ConfigError("more clusters than users or items");
  }
  require_unit_interval(spec.within_density, "within_density");
  require_unit_interval(spec.across_density, "across_density");

  Rng rng(derive_seed(seed, Stream::kSynthetic, {0xb10c}));
  auto cluster_of = [&](std::uint32_t index, std::uint32_t total) {
    return static_cast<std::uint64_t>(index) * spec.clusters / total;
  };

  std::vector<std::vector<std::uint32_t>> user_items(spec.users);
  std::vector<std::uint32_t> item_degree(spec.items, 0);
  for (std::uint32_t u = 0; u < spec.users; ++u) {
    for (std::uint32_t i = 0; i < spec.items; ++i) {
      const double p = cluster_of(u, spec.users) == cluster_of(i, spec.items) ? spec.within_density
                                                                               : spec.across_density;
      if (uniform01(rng) < p) {
        user_items[u].push_back(i);
        ++item_degree[i];
      }
    }
  }
  // Guarantee at least one interaction per user and per item, inside the
  // entity's own cluster.
  for (std::uint32_t u = 0; u < spec.users; ++u) {
    if (!user_items[u].empty()) continue;
    const auto c = cluster_of(u, spec.users);
    std::uint32_t i = 0;
    while (cluster_of(i, spec.items) != c) ++i;
    user_items[u].push_back(i);
    ++item_degree[i];
  }
  for (std::uint32_t i = 0; i < spec.items; ++i) {
    if (item_degree[i] != 0) continue;
    const auto c = cluster_of(i, spec.items);
    std::uint32_t u = 0;
    while (cluster_of(u, spec.users) != c) ++u;
    user_items[u].push_back(i);
    ++item_degree[i];
  }

  DatasetBuilder builder;
  for (std::uint32_t u = 0; u < spec.users; ++u) {
    const auto user_id = padded_id('u', u + 1, spec.users);
    for (auto i : user_items[u]) {
      builder.add(user_id, CountryLabel::other(), padded_id('i', i + 1, spec.items), CountryLabel::other());
    }
  }
  return builder.build();
}

}  // namespace loopsim
