#pragma once

#include <vector>

#include "loopsim/recommender.hpp"

namespace loopsim {

/// Cosine similarity of item `item` to every item over binarized item-user
/// vectors: |U_i ∩ U_j| / (sqrt(|U_i| |U_j|) + shrinkage). Items without
/// users have similarity 0 to everything; the self-similarity entry is 0.
std::vector<double> item_cosine_row(const UserItemMatrix& item_users, TrackIndex item, double shrinkage);

/// Item-based nearest neighbours. Each item keeps its `neighbors` most
/// similar items (ties by ascending index, zero similarities dropped); a
/// user's score for item i sums sim(i, j) over neighbours j of i that the
/// user interacted with in training.
class ItemKnnRecommender final : public Recommender {
 public:
  struct Neighbor {
    TrackIndex item;
    double similarity;
  };

  std::string_view name() const override { return "itemknn"; }
  FitReport fit(const TrainingData& data, const TrainingConfig& config) override;
  void score(UserIndex user, std::span<double> out) const override;
  std::size_t num_items() const override { return n_items_; }

  /// Kept neighbours of `item`, in ascending item order.
  std::span<const Neighbor> neighbors(TrackIndex item) const;

 private:
  std::size_t n_items_ = 0;
  UserItemMatrix train_;
  std::vector<std::size_t> neighbor_offsets_;
  std::vector<Neighbor> neighbors_;
  // For each item j, the items i that list j as a neighbour.
  std::vector<std::size_t> reverse_offsets_;
  std::vector<Neighbor> reverse_;
};

}  // namespace loopsim
