#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "loopsim/choice.hpp"
#include "loopsim/metrics.hpp"
#include "loopsim/stats.hpp"

namespace {

using namespace loopsim;

std::vector<double> random_histogram(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> h(n);
  double total = 0.0;
  for (auto& v : h) total += v = u(rng);
  for (auto& v : h) v /= total;
  return h;
}

void BM_Jsd(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto p = random_histogram(rng, static_cast<std::size_t>(state.range(0)));
  const auto q = random_histogram(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(jsd(p, q));
}
BENCHMARK(BM_Jsd)->Arg(3)->Arg(64);

void BM_AcceptanceProbabilities(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(acceptance_probabilities(k, -0.1));
}
BENCHMARK(BM_AcceptanceProbabilities)->Arg(10)->Arg(1000);

void BM_SampleAcceptedRank(benchmark::State& state) {
  Rng rng(7);
  for (auto _ : state) benchmark::DoNotOptimize(sample_accepted_rank(10, -0.1, rng));
}
BENCHMARK(BM_SampleAcceptedRank);

void BM_PairedTTest(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(state.range(0)));
  std::vector<double> b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = n(rng);
    b[i] = a[i] + 0.1 + n(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(paired_t_test(a, b));
}
BENCHMARK(BM_PairedTTest)->Arg(1000)->Arg(12000);

}  // namespace
