#pragma once

#include <cstddef>
#include <vector>

#include "loopsim/recommendation.hpp"
#include "loopsim/rng.hpp"

namespace loopsim {

struct ChoiceConfig {
  double alpha = -0.1;
  std::size_t k = 10;

  /// Throws ConfigError unless k >= 1 and alpha < 0. Non-negative alpha is
  /// accepted only with `allow_nonnegative_alpha` (for experiments).
  void validate(bool allow_nonnegative_alpha = false) const;
};

/// Acceptance probability of each rank r = 1..k of a list:
///   exp(alpha * r) / sum_{j=1..k} exp(alpha * j)
/// Throws ContractError for k == 0. Any finite alpha is evaluated; alpha = 0
/// gives the uniform distribution.
std::vector<double> acceptance_probabilities(std::size_t k, double alpha);

/// Draws exactly one item of `rec`; the item at rank r is returned with
/// probability acceptance_probabilities(rec.size(), alpha)[r - 1], so short
/// lists renormalise over their actual length. Throws NoAcceptableItemError
/// for an empty list.
TrackIndex sample_accepted_item(const RecommendationList& rec, double alpha, Rng& rng);

/// Same draw, returning the 0-based rank instead of the item.
std::size_t sample_accepted_rank(std::size_t list_length, double alpha, Rng& rng);

}  // namespace loopsim
