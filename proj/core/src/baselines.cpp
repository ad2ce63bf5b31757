#include "loopsim/baselines.hpp"

#include "loopsim/errors.hpp"
#include "loopsim/rng.hpp"

namespace loopsim {

FitReport PopRecommender::fit(const TrainingData& data, const TrainingConfig& /*config*/) {
  if (data.train.nnz() == 0) throw ContractError("pop: training split is empty");
  counts_.assign(data.train.cols(), 0);
  for (std::size_t u = 0; u < data.train.rows(); ++u) {
    for (auto i : data.train.row(u)) ++counts_[i];
  }
  return FitReport{};
}

void PopRecommender::score(UserIndex /*user*/, std::span<double> out) const {
  if (out.size() != counts_.size()) throw ContractError("pop: score buffer has the wrong size");
  for (std::size_t i = 0; i < counts_.size(); ++i) out[i] = static_cast<double>(counts_[i]);
}

FitReport RandomRecommender::fit(const TrainingData& data, const TrainingConfig& config) {
  n_users_ = data.train.rows();
  n_items_ = data.train.cols();
  seed_ = config.seed;
  return FitReport{};
}

void RandomRecommender::score(UserIndex user, std::span<double> out) const {
  if (user >= n_users_) throw UnknownUserError("random: unknown user index " + std::to_string(user));
  if (out.size() != n_items_) throw ContractError("random: score buffer has the wrong size");
  Rng rng(derive_seed(seed_, Stream::kScorer, {user}));
  for (auto& s : out) s = uniform01(rng);
}

}  // namespace loopsim
