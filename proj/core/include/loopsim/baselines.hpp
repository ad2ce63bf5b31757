#pragma once

#include <cstdint>
#include <vector>

#include "loopsim/recommender.hpp"

namespace loopsim {

/// Scores every item by its number of training interactions; the same list
/// for every user, so any user index is served.
class PopRecommender final : public Recommender {
 public:
  std::string_view name() const override { return "pop"; }
  FitReport fit(const TrainingData& data, const TrainingConfig& config) override;
  void score(UserIndex user, std::span<double> out) const override;
  std::size_t num_items() const override { return counts_.size(); }

  std::span<const std::uint32_t> counts() const noexcept { return counts_; }

 private:
  std::vector<std::uint32_t> counts_;
};

/// Uniform random scores, a fixed function of (seed, user). Reference point
/// for "better than chance" checks.
class RandomRecommender final : public Recommender {
 public:
  std::string_view name() const override { return "random"; }
  FitReport fit(const TrainingData& data, const TrainingConfig& config) override;
  void score(UserIndex user, std::span<double> out) const override;
  std::size_t num_items() const override { return n_items_; }

 private:
  std::size_t n_users_ = 0;
  std::size_t n_items_ = 0;
  std::uint64_t seed_ = 0;
};

}  // namespace loopsim
