#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "loopsim/baselines.hpp"
#include "loopsim/bpr.hpp"
#include "loopsim/errors.hpp"
#include "loopsim/fixture_model.hpp"
#include "loopsim/itemknn.hpp"
#include "loopsim/matrix.hpp"
#include "loopsim/recommender.hpp"
#include "loopsim/split.hpp"
#include "loopsim/synthetic.hpp"

namespace loopsim {
namespace {

struct Fitted {
  UserItemMatrix train;
  UserItemMatrix validation;
};

Fitted all_train(const InteractionDataset& ds) {
  std::vector<std::size_t> idx(ds.num_interactions());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return {UserItemMatrix::from_interactions(ds, idx), UserItemMatrix(ds.num_users(), ds.num_tracks(), {})};
}

TrainingData data_of(const Fitted& f, const InteractionDataset& ds) {
  return TrainingData{f.train, f.validation, ds.users(), ds.tracks()};
}

// ---- top-k selection ------------------------------------------------------

TEST(TopK, OrdersByScoreThenIndexAndSkipsSeen) {
  const std::vector<double> scores{1.0, 3.0, 3.0, std::nan(""), 2.0, 5.0};
  const std::vector<TrackIndex> seen{5};
  const auto rec = top_k_from_scores(0, scores, 4, seen);
  EXPECT_EQ(rec.tracks(), (std::vector<TrackIndex>{1, 2, 4, 0}));
  const auto all = top_k_from_scores(0, scores, 10, seen);
  EXPECT_EQ(all.size(), 5U);
  EXPECT_EQ(all.entries.back().track, 3U);  // NaN ranks last
  EXPECT_THROW(top_k_from_scores(0, scores, 0, seen), ContractError);
}

TEST(TopK, EverythingSeenGivesEmptyList) {
  const std::vector<double> scores{1.0, 2.0};
  const std::vector<TrackIndex> seen{0, 1};
  EXPECT_TRUE(top_k_from_scores(0, scores, 3, seen).empty());
}

// ---- Pop --------------------------------------------------------------------

TEST(Pop, MatchesBruteForceSort) {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<int>> m(15, std::vector<int>(20));
    for (auto& row : m) {
      for (auto& v : row) v = coin(rng) ? 1 : 0;
    }
    for (std::size_t t = 0; t < 20; ++t) m[t % 15][t] = 1;
    const auto ds = testing::from_matrix(m);
    const auto f = all_train(ds);
    PopRecommender pop;
    pop.fit(data_of(f, ds), TrainingConfig{});

    for (UserIndex u = 0; u < ds.num_users(); ++u) {
      std::vector<std::pair<int, int>> expected;  // (-count, index)
      for (int t = 0; t < 20; ++t) {
        if (ds.has_seen(u, static_cast<TrackIndex>(t))) continue;
        int count = 0;
        for (const auto& row : m) count += row[static_cast<std::size_t>(t)];
        expected.emplace_back(-count, t);
      }
      std::sort(expected.begin(), expected.end());
      const auto rec = recommend_top_k(pop, u, 10, ds.seen(u));
      ASSERT_EQ(rec.size(), std::min<std::size_t>(10, expected.size()));
      for (std::size_t r = 0; r < rec.size(); ++r) {
        EXPECT_EQ(rec.entries[r].track, static_cast<TrackIndex>(expected[r].second));
        EXPECT_EQ(rec.entries[r].score, -expected[r].first);
      }
    }
  }
}

TEST(Pop, MostPopularUnseenItemComesFirst) {
  // t00 is seen by everyone but u03; u03 must get it on top.
  const auto ds = testing::from_matrix({{1, 1, 0}, {1, 0, 1}, {1, 1, 0}, {0, 0, 1}});
  const auto f = all_train(ds);
  PopRecommender pop;
  pop.fit(data_of(f, ds), TrainingConfig{});
  EXPECT_EQ(recommend_top_k(pop, 3, 1, ds.seen(3)).entries[0].track, 0U);
  EXPECT_EQ(pop.counts()[0], 3U);
}

// ---- ItemKNN ----------------------------------------------------------------

std::vector<std::vector<int>> five_by_six() {
  return {
      {1, 1, 0, 0, 1, 0},
      {0, 1, 1, 0, 0, 1},
      {1, 0, 1, 1, 0, 0},
      {0, 1, 0, 1, 1, 0},
      {1, 1, 1, 0, 0, 0},
  };
}

// Dense cosine between item columns.
double dense_cosine(const std::vector<std::vector<int>>& m, std::size_t i, std::size_t j) {
  double dot = 0;
  double ni = 0;
  double nj = 0;
  for (const auto& row : m) {
    dot += row[i] * row[j];
    ni += row[i];
    nj += row[j];
  }
  if (ni == 0 || nj == 0) return 0.0;
  return dot / std::sqrt(ni * nj);
}

TEST(ItemKnn, CosineMatchesDenseOracle) {
  const auto m = five_by_six();
  const auto ds = testing::from_matrix(m);
  const auto f = all_train(ds);
  const auto item_users = f.train.transposed();
  for (TrackIndex i = 0; i < 6; ++i) {
    const auto row = item_cosine_row(item_users, i, 0.0);
    for (TrackIndex j = 0; j < 6; ++j) {
      const double expected = i == j ? 0.0 : dense_cosine(m, i, j);
      EXPECT_NEAR(row[j], expected, 1e-9) << i << "," << j;
    }
  }
}

TEST(ItemKnn, SimilarityIsSymmetric) {
  const auto m = five_by_six();
  const auto item_users = all_train(testing::from_matrix(m)).train.transposed();
  for (TrackIndex i = 0; i < 6; ++i) {
    const auto ri = item_cosine_row(item_users, i, 0.5);
    for (TrackIndex j = 0; j < 6; ++j) EXPECT_DOUBLE_EQ(ri[j], item_cosine_row(item_users, j, 0.5)[i]);
  }
}

TEST(ItemKnn, IdenticalAndDisjointItems) {
  // t00 and t01 share all users; t02 shares none with them.
  const auto ds = testing::from_matrix({{1, 1, 0}, {1, 1, 0}, {0, 0, 1}});
  const auto item_users = all_train(ds).train.transposed();
  const auto row = item_cosine_row(item_users, 0, 0.0);
  EXPECT_DOUBLE_EQ(row[1], 1.0);
  EXPECT_DOUBLE_EQ(row[2], 0.0);
}

TEST(ItemKnn, ScoresMatchDenseOracle) {
  const auto m = five_by_six();
  const auto ds = testing::from_matrix(m);
  const auto f = all_train(ds);
  ItemKnnRecommender knn;
  TrainingConfig cfg;
  cfg.itemknn.neighbors = 100;
  knn.fit(data_of(f, ds), cfg);
  std::vector<double> scores(6);
  for (UserIndex u = 0; u < 5; ++u) {
    knn.score(u, scores);
    std::vector<std::pair<double, TrackIndex>> oracle;
    for (std::size_t i = 0; i < 6; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < 6; ++j) {
        if (j != i && m[u][j]) s += dense_cosine(m, i, j);
      }
      EXPECT_NEAR(scores[i], s, 1e-9) << "user " << u << " item " << i;
      if (!m[u][i]) oracle.emplace_back(-s, static_cast<TrackIndex>(i));
    }
    std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
      if (std::abs(a.first - b.first) > 1e-12) return a.first < b.first;
      return a.second < b.second;
    });
    const auto rec = recommend_top_k(knn, u, 3, ds.seen(u));
    for (std::size_t r = 0; r < rec.size(); ++r) EXPECT_EQ(rec.entries[r].track, oracle[r].second);
  }
}

TEST(ItemKnn, NeighbourCapKeepsTheMostSimilar) {
  const auto m = five_by_six();
  const auto ds = testing::from_matrix(m);
  const auto f = all_train(ds);
  ItemKnnRecommender knn;
  TrainingConfig cfg;
  cfg.itemknn.neighbors = 2;
  knn.fit(data_of(f, ds), cfg);
  for (TrackIndex i = 0; i < 6; ++i) {
    const auto nb = knn.neighbors(i);
    ASSERT_LE(nb.size(), 2U);
    std::vector<double> sims;
    for (TrackIndex j = 0; j < 6; ++j) {
      if (j != i) sims.push_back(dense_cosine(m, i, j));
    }
    std::sort(sims.rbegin(), sims.rend());
    std::vector<double> kept;
    for (const auto& n : nb) kept.push_back(n.similarity);
    std::sort(kept.rbegin(), kept.rend());
    for (std::size_t r = 0; r < kept.size(); ++r) EXPECT_NEAR(kept[r], sims[r], 1e-12);
    EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end(), [](const auto& a, const auto& b) { return a.item < b.item; }));
  }
}

TEST(ItemKnn, ItemWithoutTrainingUsersScoresZero) {
  // t02 only appears in the validation split.
  const auto ds = testing::from_matrix({{1, 1, 0}, {1, 0, 1}});
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> val_idx;
  for (std::size_t i = 0; i < ds.num_interactions(); ++i) {
    (ds.interactions()[i].track == 2 ? val_idx : train_idx).push_back(i);
  }
  const auto train = UserItemMatrix::from_interactions(ds, train_idx);
  const auto validation = UserItemMatrix::from_interactions(ds, val_idx);
  ItemKnnRecommender knn;
  knn.fit(TrainingData{train, validation, ds.users(), ds.tracks()}, TrainingConfig{});
  std::vector<double> scores(3);
  knn.score(0, scores);
  EXPECT_EQ(scores[2], 0.0);
  EXPECT_TRUE(knn.neighbors(2).empty());
}

// ---- BPR --------------------------------------------------------------------

TEST(Bpr, GradientMatchesFiniteDifferences) {
  Rng rng(17);
  std::normal_distribution<double> normal(0.0, 0.5);
  constexpr double l2 = 0.01;
  constexpr double h = 1e-6;
  for (int point = 0; point < 10; ++point) {
    auto params = BprParameters::zeros(2, 3, 2);
    for (auto* vec : {&params.user_factors, &params.item_factors, &params.item_bias}) {
      for (auto& v : *vec) v = normal(rng);
    }
    const BprTriple triple{1, 0, 2};
    const auto grad = bpr_triple_gradient(params, triple, l2);

    auto check = [&](double& param, double analytic) {
      const double saved = param;
      param = saved + h;
      const double up = bpr_triple_loss(params, triple, l2);
      param = saved - h;
      const double down = bpr_triple_loss(params, triple, l2);
      param = saved;
      const double numeric = (up - down) / (2 * h);
      const double rel = std::abs(numeric - analytic) / std::max(1e-8, std::abs(numeric) + std::abs(analytic));
      EXPECT_LT(rel, 1e-4) << "point " << point << " analytic " << analytic << " numeric " << numeric;
    };
    for (std::size_t k = 0; k < 2; ++k) {
      check(params.user(1)[k], grad.user[k]);
      check(params.item(0)[k], grad.positive[k]);
      check(params.item(2)[k], grad.negative[k]);
    }
    check(params.item_bias[0], grad.positive_bias);
    check(params.item_bias[2], grad.negative_bias);
  }
}

TEST(Bpr, SgdStepIncreasesPreferenceMargin) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto params = BprParameters::initialise(3, 4, 8, rng);
    const BprTriple triple{1, 2, 0};
    const double before = params.score(1, 2) - params.score(1, 0);
    bpr_sgd_step(params, triple, 0.05, 0.0);
    EXPECT_GT(params.score(1, 2) - params.score(1, 0), before);
  }
}

TEST(Bpr, InitialisationScale) {
  Rng rng(1);
  const auto params = BprParameters::initialise(10, 20, 16, rng);
  for (double v : params.user_factors) EXPECT_LE(std::abs(v), 0.25);
  for (double v : params.item_bias) EXPECT_EQ(v, 0.0);
}

InteractionDataset block() {
  BlockSpec spec;
  spec.users = 60;
  spec.items = 80;
  return generate_block_dataset(spec, 2);
}

TEST(Bpr, LossMovingAverageDecreasesOverEarlyEpochs) {
  const auto ds = block();
  const auto f = all_train(ds);  // no validation: fixed epoch count
  BprRecommender bpr;
  TrainingConfig cfg;
  cfg.max_epochs = 10;
  cfg.bpr.dim = 16;
  cfg.bpr.learning_rate = 0.05;
  cfg.seed = 4;
  const auto report = bpr.fit(data_of(f, ds), cfg);
  ASSERT_EQ(report.epoch_losses.size(), 10U);
  std::vector<double> avg;
  for (std::size_t e = 2; e < 10; ++e) {
    avg.push_back((report.epoch_losses[e] + report.epoch_losses[e - 1] + report.epoch_losses[e - 2]) / 3.0);
  }
  for (std::size_t i = 1; i < avg.size(); ++i) EXPECT_LT(avg[i], avg[i - 1]) << "window " << i;
}

TEST(Bpr, FitIsDeterministicPerSeed) {
  const auto ds = block();
  const auto split = random_split(ds, SplitRatios{}, 1);
  const auto train = UserItemMatrix::from_interactions(ds, split.train);
  const auto validation = UserItemMatrix::from_interactions(ds, split.validation);
  TrainingConfig cfg;
  cfg.max_epochs = 5;
  cfg.bpr.dim = 8;
  cfg.seed = 9;
  BprRecommender a;
  BprRecommender b;
  const auto ra = a.fit(TrainingData{train, validation, ds.users(), ds.tracks()}, cfg);
  const auto rb = b.fit(TrainingData{train, validation, ds.users(), ds.tracks()}, cfg);
  EXPECT_EQ(ra.epoch_losses, rb.epoch_losses);
  EXPECT_EQ(a.parameters().user_factors, b.parameters().user_factors);
  EXPECT_TRUE(ra.best_validation_ndcg.has_value());
}

TEST(Bpr, HugeLearningRateDiverges) {
  const auto ds = block();
  const auto f = all_train(ds);
  BprRecommender bpr;
  TrainingConfig cfg;
  cfg.max_epochs = 50;
  cfg.bpr.learning_rate = 1e250;
  cfg.bpr.dim = 4;
  EXPECT_THROW(bpr.fit(data_of(f, ds), cfg), TrainingDivergedError);
}

TEST(Bpr, UnknownUserThrows) {
  const auto ds = block();
  const auto f = all_train(ds);
  BprRecommender bpr;
  TrainingConfig cfg;
  cfg.max_epochs = 1;
  cfg.bpr.dim = 4;
  bpr.fit(data_of(f, ds), cfg);
  std::vector<double> scores(ds.num_tracks());
  EXPECT_THROW(bpr.score(static_cast<UserIndex>(ds.num_users()), scores), UnknownUserError);
}

// ---- Random and fixture models ----------------------------------------------

TEST(RandomModel, ScoresArePerUserDeterministic) {
  const auto ds = block();
  const auto f = all_train(ds);
  RandomRecommender a;
  RandomRecommender b;
  TrainingConfig cfg;
  cfg.seed = 3;
  a.fit(data_of(f, ds), cfg);
  b.fit(data_of(f, ds), cfg);
  std::vector<double> sa(ds.num_tracks());
  std::vector<double> sb(ds.num_tracks());
  a.score(4, sa);
  b.score(4, sb);
  EXPECT_EQ(sa, sb);
  b.score(5, sb);
  EXPECT_NE(sa, sb);
}

TEST(FixtureModel, ScoresFromFileAndMissingPairsAreMinusInfinity) {
  const auto ds = testing::from_matrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  std::istringstream in("user_id\ttrack_id\tscore\nu00\tt01\t0.5\nu00\tt02\t0.9\nu01\tt00\t1\nzz\tt00\t3\n");
  FixtureRecommender model(in);
  const auto f = all_train(ds);
  model.fit(data_of(f, ds), TrainingConfig{});
  EXPECT_EQ(model.unmatched_rows(), 1U);
  std::vector<double> scores(3);
  model.score(0, scores);
  EXPECT_EQ(scores[1], 0.5);
  EXPECT_EQ(scores[2], 0.9);
  model.score(2, scores);
  EXPECT_EQ(scores[0], -std::numeric_limits<double>::infinity());
  EXPECT_EQ(recommend_top_k(model, 0, 2, ds.seen(0)).tracks(), (std::vector<TrackIndex>{2, 1}));
}

TEST(FixtureModel, MalformedRowsAreParseErrors) {
  std::istringstream bad("u00\tt01\n");
  EXPECT_THROW(FixtureRecommender{bad}, ParseError);
  std::istringstream bad_score("u00\tt01\tabc\n");
  EXPECT_THROW(FixtureRecommender{bad_score}, ParseError);
}

TEST(Factory, KnownAndUnknownNames) {
  for (const char* name : {"pop", "itemknn", "bpr", "random"}) {
    EXPECT_EQ(make_recommender(ModelSpec{name, {}})->name(), name);
  }
  EXPECT_THROW(make_recommender(ModelSpec{"svd", {}}), ConfigError);
  EXPECT_THROW(make_recommender(ModelSpec{"fixture", {}}), ConfigError);
}

TEST(ValidationNdcg, PerfectModelScoresOne) {
  // Fixture that ranks each user's held-out item first.
  const auto ds = testing::from_matrix({{1, 1, 0, 0}, {0, 1, 1, 0}});
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> val_idx;
  for (std::size_t i = 0; i < ds.num_interactions(); ++i) {
    const auto& x = ds.interactions()[i];
    ((x.user == 0 && x.track == 1) || (x.user == 1 && x.track == 2) ? val_idx : train_idx).push_back(i);
  }
  const auto train = UserItemMatrix::from_interactions(ds, train_idx);
  const auto validation = UserItemMatrix::from_interactions(ds, val_idx);
  std::istringstream in("u00\tt01\t5\nu01\tt02\t5\n");
  FixtureRecommender model(in);
  model.fit(TrainingData{train, validation, ds.users(), ds.tracks()}, TrainingConfig{});
  EXPECT_DOUBLE_EQ(validation_ndcg(model, train, validation, 10), 1.0);
}

}  // namespace
}  // namespace loopsim
