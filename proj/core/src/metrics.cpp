#include "loopsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "loopsim/errors.hpp"

namespace loopsim {

CountryProportions country_proportions(std::span<const TrackIndex> items, CountryLabel user_country,
                                       std::span<const CountryLabel> track_countries) {
  if (items.empty()) throw UndefinedMetricError("proportion of an empty item list is undefined");
  std::size_t local = 0;
  std::size_t us = 0;
  for (auto t : items) {
    const auto c = track_countries[t];
    if (!user_country.is_other() && c == user_country) ++local;
    if (c == kUnitedStates) ++us;
  }
  const auto n = static_cast<double>(items.size());
  return {static_cast<double>(local) / n, static_cast<double>(us) / n};
}

AttributeDistribution country_distribution(std::span<const TrackIndex> items, CountryLabel user_country,
                                           std::span<const CountryLabel> track_countries) {
  if (items.empty()) throw UndefinedMetricError("distribution of an empty item list is undefined");
  std::array<std::size_t, 3> counts{};
  const bool us_user = user_country == kUnitedStates;
  for (auto t : items) {
    const auto c = track_countries[t];
    if (!user_country.is_other() && c == user_country) {
      ++counts[0];
    } else if (c == kUnitedStates && !us_user) {
      ++counts[1];
    } else {
      ++counts[2];
    }
  }
  const auto n = static_cast<double>(items.size());
  AttributeDistribution d{BinScheme::kCountry, {}};
  d.mass[0] = static_cast<double>(counts[0]) / n;
  d.mass[1] = static_cast<double>(counts[1]) / n;
  d.mass[2] = static_cast<double>(counts[2]) / n;
  return d;
}

PopularityBinning popularity_binning(std::span<const std::uint32_t> track_counts, double high_fraction,
                                     double low_fraction) {
  if (high_fraction < 0.0 || low_fraction < 0.0 || high_fraction + low_fraction > 1.0) {
    throw ContractError("popularity bin fractions must be non-negative and sum to at most 1");
  }
  const std::size_t n = track_counts.size();
  std::vector<TrackIndex> order(n);
  std::iota(order.begin(), order.end(), TrackIndex{0});
  std::sort(order.begin(), order.end(), [&](TrackIndex a, TrackIndex b) {
    if (track_counts[a] != track_counts[b]) return track_counts[a] > track_counts[b];
    return a < b;
  });

  PopularityBinning binning;
  binning.high_fraction = high_fraction;
  binning.low_fraction = low_fraction;
  binning.high_count = static_cast<std::size_t>(std::floor(high_fraction * static_cast<double>(n)));
  binning.low_count = static_cast<std::size_t>(std::floor(low_fraction * static_cast<double>(n)));
  binning.bins.assign(n, PopularityBin::kMid);
  for (std::size_t r = 0; r < binning.high_count; ++r) binning.bins[order[r]] = PopularityBin::kHigh;
  for (std::size_t r = n - binning.low_count; r < n; ++r) binning.bins[order[r]] = PopularityBin::kLow;
  return binning;
}

PopularityBinning popularity_binning(const InteractionDataset& reference, double high_fraction,
                                     double low_fraction) {
  if (reference.empty()) throw ContractError("popularity binning needs a non-empty reference dataset");
  const auto counts = reference.track_interaction_counts();
  return popularity_binning(counts, high_fraction, low_fraction);
}

AttributeDistribution popularity_distribution(std::span<const TrackIndex> items,
                                              const PopularityBinning& binning) {
  if (items.empty()) throw UndefinedMetricError("distribution of an empty item list is undefined");
  std::array<std::size_t, 3> counts{};
  for (auto t : items) ++counts[static_cast<std::size_t>(binning.bins.at(t))];
  const auto n = static_cast<double>(items.size());
  AttributeDistribution d{BinScheme::kPopularity, {}};
  for (std::size_t b = 0; b < 3; ++b) d.mass[b] = static_cast<double>(counts[b]) / n;
  return d;
}

double jsd(std::span<const double> h, std::span<const double> g) {
  if (h.size() != g.size()) {
    throw ContractError("jsd: distributions have " + std::to_string(h.size()) + " and " +
                        std::to_string(g.size()) + " bins");
  }
  // Each bin contributes the symmetric pair of terms, so swapping the
  // arguments yields the identical sum.
  auto term = [](double p, double m) { return p > 0.0 ? p * std::log2(2.0 * p / m) : 0.0; };
  double total = 0.0;
  for (std::size_t c = 0; c < h.size(); ++c) {
    const double m = h[c] + g[c];
    if (m <= 0.0) continue;
    total += 0.5 * term(h[c], m) + 0.5 * term(g[c], m);
  }
  return std::clamp(total, 0.0, 1.0);
}

double jsd(const AttributeDistribution& h, const AttributeDistribution& g) {
  if (h.scheme != g.scheme) throw ContractError("jsd: distributions use different bin schemes");
  return jsd(std::span<const double>(h.mass), std::span<const double>(g.mass));
}

double ndcg_at_k(std::span<const TrackIndex> ranked, std::span<const TrackIndex> relevant_sorted,
                 std::size_t k) {
  if (k == 0) throw ContractError("ndcg_at_k: k must be >= 1");
  if (relevant_sorted.empty()) return 0.0;
  double dcg = 0.0;
  const std::size_t depth = std::min(k, ranked.size());
  for (std::size_t r = 0; r < depth; ++r) {
    if (std::binary_search(relevant_sorted.begin(), relevant_sorted.end(), ranked[r])) {
      dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
    }
  }
  double ideal = 0.0;
  const std::size_t hits = std::min(k, relevant_sorted.size());
  for (std::size_t r = 0; r < hits; ++r) ideal += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  return dcg / ideal;
}

double ndcg_at_k(const RecommendationList& rec, std::span<const TrackIndex> relevant_sorted,
                 std::size_t k) {
  const auto tracks = rec.tracks();
  return ndcg_at_k(std::span<const TrackIndex>(tracks), relevant_sorted, k);
}

double delta_percent(double current_mean, double baseline_mean, DeltaMode mode) {
  if (mode == DeltaMode::kAbsolute) return 100.0 * (current_mean - baseline_mean);
  if (baseline_mean == 0.0) throw UndefinedMetricError("relative delta against a zero baseline");
  return 100.0 * (current_mean - baseline_mean) / baseline_mean;
}

std::vector<TrackIndex> RecommendationList::tracks() const {
  std::vector<TrackIndex> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.track);
  return out;
}

}  // namespace loopsim
