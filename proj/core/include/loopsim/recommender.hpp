#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loopsim/dataset.hpp"
#include "loopsim/matrix.hpp"
#include "loopsim/recommendation.hpp"

namespace loopsim {

struct ItemKnnParams {
  std::size_t neighbors = 100;
  double shrinkage = 0.0;
};

struct BprParams {
  std::size_t dim = 64;
  double learning_rate = 0.01;
  double l2 = 1e-4;
  std::size_t negatives = 1;
};

struct TrainingConfig {
  int max_epochs = 200;
  int patience = 5;
  std::size_t eval_k = 10;
  ItemKnnParams itemknn;
  BprParams bpr;
  std::uint64_t seed = 0;
  /// Continue from the current parameters instead of re-initialising
  /// (models without trainable state ignore this).
  bool warm_start = false;

  void validate() const;
};

/// What a model sees when fitting: binarized train/validation matrices over
/// the full user and track universe of the dataset.
struct TrainingData {
  const UserItemMatrix& train;
  const UserItemMatrix& validation;
  std::span<const UserMeta> users;
  std::span<const TrackMeta> tracks;
};

struct FitReport {
  int epochs_run = 0;
  int best_epoch = 0;
  std::optional<double> best_validation_ndcg;
  std::vector<double> epoch_losses;
};

/// Contract every model in the loop satisfies. After `fit`, `score` is
/// defined for every (user, item) of the training universe and is a pure
/// function of the fitted state, so concurrent calls are safe.
class Recommender {
 public:
  virtual ~Recommender() = default;

  virtual std::string_view name() const = 0;
  virtual FitReport fit(const TrainingData& data, const TrainingConfig& config) = 0;

  /// Writes one score per item into `out` (size num_items()). Personalized
  /// models throw UnknownUserError for users outside the training universe.
  virtual void score(UserIndex user, std::span<double> out) const = 0;

  virtual std::size_t num_items() const = 0;
};

/// The k highest-scoring items not in `seen_sorted` (ascending indices),
/// ordered by score descending then track index ascending. NaN scores rank
/// below every number.
RecommendationList top_k_from_scores(UserIndex user, std::span<const double> scores, std::size_t k,
                                     std::span<const TrackIndex> seen_sorted);

RecommendationList recommend_top_k(const Recommender& model, UserIndex user, std::size_t k,
                                   std::span<const TrackIndex> seen_sorted);

/// Mean NDCG@k over users with at least one validation item, recommending
/// from items outside each user's training row.
double validation_ndcg(const Recommender& model, const UserItemMatrix& train,
                       const UserItemMatrix& validation, std::size_t k);

struct ModelSpec {
  /// pop | itemknn | bpr | random | fixture
  std::string name = "bpr";
  std::string fixture_path;
};

std::unique_ptr<Recommender> make_recommender(const ModelSpec& spec);

}  // namespace loopsim
