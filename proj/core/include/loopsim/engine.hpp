#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "loopsim/choice.hpp"
#include "loopsim/dataset.hpp"
#include "loopsim/metrics.hpp"
#include "loopsim/record.hpp"
#include "loopsim/recommender.hpp"
#include "loopsim/split.hpp"
#include "loopsim/stats.hpp"

namespace loopsim {

enum class BinningMode { kCurrent, kFrozen };

struct SimulationConfig {
  std::uint32_t n_iterations = 100;
  ChoiceConfig choice;
  bool allow_nonnegative_alpha = false;
  SplitRatios split;
  ModelSpec model;
  TrainingConfig training;
  /// Which popularity binning the headline `profile_pop_jsd` metric uses in
  /// reports. Both are always recorded.
  BinningMode binning = BinningMode::kCurrent;
  DeltaMode delta_mode = DeltaMode::kRelative;
  /// Test behind the *_t / *_p metric rows.
  TestKind test = TestKind::kPaired;
  std::uint64_t seed = 42;
  std::uint32_t checkpoint_every = 0;
  std::filesystem::path output_dir;
  /// Worker threads for per-user recommendation and acceptance.
  std::size_t threads = 1;
  /// Keep the model across iterations and continue training it.
  bool warm_start = false;
  /// When false, accepted items are recorded but never added to profiles.
  bool augment = true;

  void validate() const;
};

/// State derived once from the initial dataset.
struct InitialState {
  InteractionDataset initial;
  PopularityBinning frozen_binning;
  /// Per-user country distribution of the initial profile.
  std::vector<AttributeDistribution> country;
  /// Per-user popularity distribution of the initial profile, frozen bins.
  std::vector<AttributeDistribution> popularity_frozen;

  static InitialState from(const InteractionDataset& ds);
};

/// Iteration-0 record: profiles are the initial profiles, there are no
/// recommendations and every JSD is 0.
IterationRecord baseline_record(const InitialState& init);

/// One loop step: split, fit, recommend (excluding every seen item), accept
/// one item per user, augment. Recommendation metrics come from the lists
/// produced before augmentation; profile metrics from the augmented dataset.
/// `model` must be non-null when cfg.warm_start is set or when the caller
/// wants to reuse an instance; otherwise a fresh model is built.
std::pair<InteractionDataset, IterationRecord> run_iteration(const InteractionDataset& ds,
                                                             const InitialState& init,
                                                             const SimulationConfig& cfg,
                                                             std::uint32_t iteration,
                                                             Recommender* model = nullptr);

/// Stateful driver over run_iteration. The dataset may already carry
/// augmented interactions (resuming from a checkpoint); the loop continues
/// at dataset.last_iteration() + 1.
class Simulation {
 public:
  Simulation(InteractionDataset dataset, SimulationConfig config);
  /// Continues after `completed` iterations (needed when augmentation is
  /// disabled, since the dataset then carries no iteration tags).
  Simulation(InteractionDataset dataset, SimulationConfig config, std::uint32_t completed);

  const SimulationConfig& config() const noexcept { return config_; }
  const InteractionDataset& dataset() const noexcept { return dataset_; }
  const InitialState& initial() const noexcept { return init_; }
  const IterationRecord& baseline() const noexcept { return baseline_; }

  std::uint32_t next_iteration() const noexcept { return next_; }
  bool done() const noexcept { return next_ > config_.n_iterations; }

  /// Runs the next iteration and returns its record.
  IterationRecord step();

  /// Steps until n_iterations, calling `on_record` after each one.
  void run(const std::function<void(const IterationRecord&, const InteractionDataset&)>& on_record);

 private:
  SimulationConfig config_;
  InteractionDataset dataset_;
  InitialState init_;
  IterationRecord baseline_;
  std::uint32_t next_ = 1;
  std::unique_ptr<Recommender> model_;
};

/// Baseline record followed by records 1..n.
std::vector<IterationRecord> run_simulation(const InteractionDataset& ds0, const SimulationConfig& cfg);

}  // namespace loopsim
