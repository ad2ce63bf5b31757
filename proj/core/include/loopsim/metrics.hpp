#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "loopsim/country.hpp"
#include "loopsim/dataset.hpp"
#include "loopsim/recommendation.hpp"

namespace loopsim {

enum class BinScheme { kCountry, kPopularity };

/// Normalized three-bin histogram. Country bins are [local, US, other];
/// popularity bins are [HighPop, MidPop, LowPop].
struct AttributeDistribution {
  BinScheme scheme = BinScheme::kCountry;
  std::array<double, 3> mass{};

  static constexpr std::array<std::string_view, 3> labels(BinScheme scheme) {
    if (scheme == BinScheme::kCountry) return {"local", "US", "other"};
    return {"HighPop", "MidPop", "LowPop"};
  }
};

struct CountryProportions {
  double local = 0.0;
  double us = 0.0;
};

/// Fraction of items whose track country equals the user's country, and
/// fraction from the US. OTHER never counts as local. Throws
/// UndefinedMetricError for an empty list.
CountryProportions country_proportions(std::span<const TrackIndex> items, CountryLabel user_country,
                                       std::span<const CountryLabel> track_countries);

/// [local, US, other] distribution. For US users the shared mass goes to the
/// local bin and the US bin is 0.
AttributeDistribution country_distribution(std::span<const TrackIndex> items, CountryLabel user_country,
                                           std::span<const CountryLabel> track_countries);

enum class PopularityBin : unsigned char { kHigh = 0, kMid = 1, kLow = 2 };

struct PopularityBinning {
  std::vector<PopularityBin> bins;  // indexed by track
  std::size_t high_count = 0;
  std::size_t low_count = 0;
  double high_fraction = 0.2;
  double low_fraction = 0.2;
};

/// Tracks ranked by interaction count (descending, ties by ascending index):
/// the first floor(high_fraction * n) are HighPop, the last
/// floor(low_fraction * n) LowPop, the rest MidPop.
PopularityBinning popularity_binning(std::span<const std::uint32_t> track_counts,
                                     double high_fraction = 0.2, double low_fraction = 0.2);
PopularityBinning popularity_binning(const InteractionDataset& reference, double high_fraction = 0.2,
                                     double low_fraction = 0.2);

AttributeDistribution popularity_distribution(std::span<const TrackIndex> items,
                                              const PopularityBinning& binning);

/// Jensen-Shannon divergence with log base 2, in [0, 1]. Zero-mass terms
/// contribute 0. Throws ContractError when the sizes differ.
double jsd(std::span<const double> h, std::span<const double> g);

/// Throws ContractError when the bin schemes differ.
double jsd(const AttributeDistribution& h, const AttributeDistribution& g);

/// Binary-relevance NDCG@k with discount 1/log2(rank + 1), normalised by the
/// ideal DCG over min(k, |relevant|) hits. `relevant_sorted` is ascending.
/// Returns 0 when nothing is relevant.
double ndcg_at_k(std::span<const TrackIndex> ranked, std::span<const TrackIndex> relevant_sorted,
                 std::size_t k);
double ndcg_at_k(const RecommendationList& rec, std::span<const TrackIndex> relevant_sorted,
                 std::size_t k);

enum class DeltaMode { kRelative, kAbsolute };

/// Relative: 100 * (current - baseline) / baseline; throws
/// UndefinedMetricError for a zero baseline. Absolute: percentage points,
/// 100 * (current - baseline).
double delta_percent(double current_mean, double baseline_mean, DeltaMode mode = DeltaMode::kRelative);

}  // namespace loopsim
