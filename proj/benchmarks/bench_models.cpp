#include <benchmark/benchmark.h>

#include <numeric>

#include "loopsim/baselines.hpp"
#include "loopsim/bpr.hpp"
#include "loopsim/engine.hpp"
#include "loopsim/itemknn.hpp"
#include "loopsim/matrix.hpp"
#include "loopsim/split.hpp"
#include "loopsim/synthetic.hpp"

namespace {

using namespace loopsim;

const InteractionDataset& block_dataset() {
  static const InteractionDataset ds = generate_block_dataset(BlockSpec{}, 42);
  return ds;
}

const InteractionDataset& country_dataset() {
  static const InteractionDataset ds = [] {
    SyntheticSpec spec;
    spec.countries = {{CountryLabel("US"), 120, 200},
                      {CountryLabel("DE"), 80, 100},
                      {CountryLabel("BR"), 80, 80},
                      {CountryLabel::other(), 60, 120}};
    spec.majority_share = 0.45;
    return generate_synthetic(spec, 42);
  }();
  return ds;
}

struct Fixture {
  UserItemMatrix train;
  UserItemMatrix validation;

  explicit Fixture(const InteractionDataset& ds) {
    const auto split = random_split(ds, SplitRatios{}, 1);
    train = UserItemMatrix::from_interactions(ds, split.train);
    validation = UserItemMatrix::from_interactions(ds, split.validation);
  }
};

void BM_ItemKnnFit(benchmark::State& state) {
  const auto& ds = block_dataset();
  const Fixture f(ds);
  const TrainingData data{f.train, f.validation, ds.users(), ds.tracks()};
  for (auto _ : state) {
    ItemKnnRecommender knn;
    benchmark::DoNotOptimize(knn.fit(data, TrainingConfig{}));
  }
}
BENCHMARK(BM_ItemKnnFit)->Unit(benchmark::kMillisecond);

void BM_BprEpoch(benchmark::State& state) {
  const auto& ds = block_dataset();
  const Fixture f(ds);
  const TrainingData data{f.train, f.validation, ds.users(), ds.tracks()};
  TrainingConfig cfg;
  cfg.max_epochs = 1;
  for (auto _ : state) {
    BprRecommender bpr;
    benchmark::DoNotOptimize(bpr.fit(data, cfg));
  }
}
BENCHMARK(BM_BprEpoch)->Unit(benchmark::kMillisecond);

void BM_PopIteration(benchmark::State& state) {
  SimulationConfig cfg;
  cfg.model.name = "pop";
  cfg.n_iterations = 1000000;
  Simulation sim(country_dataset(), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
}
BENCHMARK(BM_PopIteration)->Unit(benchmark::kMillisecond)->Iterations(20);

}  // namespace

BENCHMARK_MAIN();
