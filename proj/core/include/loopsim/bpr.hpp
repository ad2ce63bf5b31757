#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "loopsim/recommender.hpp"
#include "loopsim/rng.hpp"

namespace loopsim {

/// Matrix-factorisation parameters: score(u, i) = <p_u, q_i> + b_i.
struct BprParameters {
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::size_t dim = 0;
  std::vector<double> user_factors;  // n_users x dim, row-major
  std::vector<double> item_factors;  // n_items x dim, row-major
  std::vector<double> item_bias;     // n_items

  /// Zero biases, factors uniform in [-1/sqrt(dim), 1/sqrt(dim)].
  static BprParameters initialise(std::size_t n_users, std::size_t n_items, std::size_t dim, Rng& rng);
  static BprParameters zeros(std::size_t n_users, std::size_t n_items, std::size_t dim);

  std::span<double> user(std::size_t u) { return {user_factors.data() + u * dim, dim}; }
  std::span<const double> user(std::size_t u) const { return {user_factors.data() + u * dim, dim}; }
  std::span<double> item(std::size_t i) { return {item_factors.data() + i * dim, dim}; }
  std::span<const double> item(std::size_t i) const { return {item_factors.data() + i * dim, dim}; }

  double score(std::size_t u, std::size_t i) const;
};

/// A (user, positive item, negative item) training triple.
struct BprTriple {
  std::size_t user = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
};

/// -ln sigmoid(x_ui - x_uj) + (l2 / 2) * (|p_u|^2 + |q_i|^2 + |q_j|^2 + b_i^2 + b_j^2)
double bpr_triple_loss(const BprParameters& params, const BprTriple& triple, double l2);

/// Gradient of bpr_triple_loss with respect to the parameters it touches.
struct BprTripleGradient {
  std::vector<double> user;
  std::vector<double> positive;
  std::vector<double> negative;
  double positive_bias = 0.0;
  double negative_bias = 0.0;
};

BprTripleGradient bpr_triple_gradient(const BprParameters& params, const BprTriple& triple, double l2);

/// One plain SGD step on a triple; returns the loss before the update.
double bpr_sgd_step(BprParameters& params, const BprTriple& triple, double learning_rate, double l2);

/// Bayesian personalised ranking with uniform negative sampling over items
/// outside the user's training row, early-stopped on validation NDCG.
class BprRecommender final : public Recommender {
 public:
  std::string_view name() const override { return "bpr"; }
  FitReport fit(const TrainingData& data, const TrainingConfig& config) override;
  void score(UserIndex user, std::span<double> out) const override;
  std::size_t num_items() const override { return params_.n_items; }

  const BprParameters& parameters() const noexcept { return params_; }

 private:
  BprParameters params_;
};

}  // namespace loopsim
