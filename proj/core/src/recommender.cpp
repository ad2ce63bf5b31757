#include "loopsim/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "loopsim/baselines.hpp"
#include "loopsim/bpr.hpp"
#include "loopsim/errors.hpp"
#include "loopsim/fixture_model.hpp"
#include "loopsim/itemknn.hpp"
#include "loopsim/metrics.hpp"

namespace loopsim {

void TrainingConfig::validate() const {
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (eval_k < 1) throw ConfigError("eval_k must be >= 1");
  if (itemknn.neighbors < 1) throw ConfigError("itemknn neighbors must be >= 1");
  if (itemknn.shrinkage < 0.0) throw ConfigError("itemknn shrinkage must be >= 0");
  if (bpr.dim < 1) throw ConfigError("bpr dim must be >= 1");
  if (!(bpr.learning_rate > 0.0)) throw ConfigError("bpr learning_rate must be > 0");
  if (bpr.l2 < 0.0) throw ConfigError("bpr l2 must be >= 0");
  if (bpr.negatives < 1) throw ConfigError("bpr negatives must be >= 1");
}

RecommendationList top_k_from_scores(UserIndex user, std::span<const double> scores, std::size_t k,
                                     std::span<const TrackIndex> seen_sorted) {
  if (k == 0) throw ContractError("k must be >= 1");
  constexpr double kLowest = -std::numeric_limits<double>::infinity();

  std::vector<ScoredItem> candidates;
  candidates.reserve(scores.size());
  auto seen_it = seen_sorted.begin();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto t = static_cast<TrackIndex>(i);
    while (seen_it != seen_sorted.end() && *seen_it < t) ++seen_it;
    if (seen_it != seen_sorted.end() && *seen_it == t) continue;
    const double s = std::isnan(scores[i]) ? kLowest : scores[i];
    candidates.push_back(ScoredItem{t, s});
  }
  auto better = [](const ScoredItem& a, const ScoredItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.track < b.track;
  };
  const std::size_t take = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), better);
  candidates.resize(take);
  return RecommendationList{user, std::move(candidates)};
}

RecommendationList recommend_top_k(const Recommender& model, UserIndex user, std::size_t k,
                                   std::span<const TrackIndex> seen_sorted) {
  std::vector<double> scores(model.num_items());
  model.score(user, scores);
  return top_k_from_scores(user, scores, k, seen_sorted);
}

double validation_ndcg(const Recommender& model, const UserItemMatrix& train,
                       const UserItemMatrix& validation, std::size_t k) {
  std::vector<double> scores(model.num_items());
  double total = 0.0;
  std::size_t users = 0;
  for (std::size_t u = 0; u < validation.rows(); ++u) {
    const auto relevant = validation.row(u);
    if (relevant.empty()) continue;
    model.score(static_cast<UserIndex>(u), scores);
    const auto rec = top_k_from_scores(static_cast<UserIndex>(u), scores, k, train.row(u));
    total += ndcg_at_k(rec, relevant, k);
    ++users;
  }
  return users == 0 ? 0.0 : total / static_cast<double>(users);
}

std::unique_ptr<Recommender> make_recommender(const ModelSpec& spec) {
  if (spec.name == "pop") return std::make_unique<PopRecommender>();
  if (spec.name == "itemknn") return std::make_unique<ItemKnnRecommender>();
  if (spec.name == "bpr") return std::make_unique<BprRecommender>();
  if (spec.name == "random") return std::make_unique<RandomRecommender>();
  if (spec.name == "fixture") {
    if (spec.fixture_path.empty()) throw ConfigError("fixture model needs a fixture_path");
    return std::make_unique<FixtureRecommender>(spec.fixture_path);
  }
  throw ConfigError("unknown model '" + spec.name + "' (expected pop, itemknn, bpr, random or fixture)");
}

}  // namespace loopsim
