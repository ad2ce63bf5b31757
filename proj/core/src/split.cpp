#include "loopsim/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "loopsim/errors.hpp"
#include "loopsim/rng.hpp"

namespace loopsim {

void SplitRatios::validate() const {
  if (train < 0.0 || validation < 0.0 || test < 0.0) {
    throw ConfigError("split ratios must be non-negative");
  }
  if (train <= 0.0) throw ConfigError("train ratio must be positive");
  const double sum = train + validation + test;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1, got " + std::to_string(sum));
  }
}

DatasetSplit random_split(const InteractionDataset& ds, const SplitRatios& ratios, std::uint64_t seed) {
  ratios.validate();
  if (ds.empty()) throw ContractError("cannot split an empty dataset");

  const std::size_t n = ds.num_interactions();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const auto n_train = std::min(n, static_cast<std::size_t>(std::llround(ratios.train * static_cast<double>(n))));
  const auto n_val = std::min(n - n_train,
                              static_cast<std::size_t>(std::llround(ratios.validation * static_cast<double>(n))));

  enum class Part : unsigned char { kTrain, kValidation, kTest };
  std::vector<Part> part(n, Part::kTest);
  for (std::size_t i = 0; i < n; ++i) {
    part[order[i]] = i < n_train ? Part::kTrain : (i < n_train + n_val ? Part::kValidation : Part::kTest);
  }

  const auto interactions = ds.interactions();
  std::vector<bool> has_train(ds.num_users(), false);
  for (std::size_t i = 0; i < n; ++i) {
    if (part[i] == Part::kTrain) has_train[interactions[i].user] = true;
  }
  std::vector<std::vector<std::size_t>> held_out(ds.num_users());
  bool any_missing = false;
  for (std::size_t u = 0; u < ds.num_users(); ++u) any_missing = any_missing || !has_train[u];
  if (any_missing) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!has_train[interactions[i].user]) held_out[interactions[i].user].push_back(i);
    }
    for (std::size_t u = 0; u < ds.num_users(); ++u) {
      if (has_train[u]) continue;
      const auto& candidates = held_out[u];
      std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
      part[candidates[pick(rng)]] = Part::kTrain;
    }
  }

  DatasetSplit split;
  split.train.reserve(n_train + ds.num_users());
  split.validation.reserve(n_val);
  split.test.reserve(n - n_train - n_val);
  for (std::size_t i = 0; i < n; ++i) {
    switch (part[i]) {
      case Part::kTrain: split.train.push_back(i); break;
      case Part::kValidation: split.validation.push_back(i); break;
      case Part::kTest: split.test.push_back(i); break;
    }
  }
  return split;
}

}  // namespace loopsim
