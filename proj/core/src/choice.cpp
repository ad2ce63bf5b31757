#include "loopsim/choice.hpp"

#include <cmath>
#include <string>

#include "loopsim/errors.hpp"

namespace loopsim {

void ChoiceConfig::validate(bool allow_nonnegative_alpha) const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
  if (alpha >= 0.0 && !allow_nonnegative_alpha) {
    throw ConfigError("alpha must be < 0 (got " + std::to_string(alpha) + ")");
  }
}

std::vector<double> acceptance_probabilities(std::size_t k, double alpha) {
  if (k == 0) throw ContractError("acceptance probabilities need k >= 1");
  if (!std::isfinite(alpha)) throw ContractError("alpha must be finite");
  // Shifting the exponent by alpha (or by alpha * k for alpha > 0) leaves the
  // normalised vector unchanged and keeps the largest weight at exactly 1.
  const double shift = alpha <= 0.0 ? alpha : alpha * static_cast<double>(k);
  std::vector<double> p(k);
  double total = 0.0;
  for (std::size_t r = 1; r <= k; ++r) {
    p[r - 1] = std::exp(alpha * static_cast<double>(r) - shift);
    total += p[r - 1];
  }
  for (auto& v : p) v /= total;
  return p;
}

std::size_t sample_accepted_rank(std::size_t list_length, double alpha, Rng& rng) {
  if (list_length == 0) throw NoAcceptableItemError();
  const auto p = acceptance_probabilities(list_length, alpha);
  const double u = uniform01(rng);
  double cumulative = 0.0;
  for (std::size_t r = 0; r < p.size(); ++r) {
    cumulative += p[r];
    if (u < cumulative) return r;
  }
  return p.size() - 1;
}

TrackIndex sample_accepted_item(const RecommendationList& rec, double alpha, Rng& rng) {
  return rec.entries[sample_accepted_rank(rec.size(), alpha, rng)].track;
}

}  // namespace loopsim
