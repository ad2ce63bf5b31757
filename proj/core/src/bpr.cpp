#include "loopsim/bpr.hpp"

#include <cmath>
#include <string>

#include "loopsim/errors.hpp"

namespace loopsim {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

// -ln(sigmoid(x)), stable for large |x|.
double neg_log_sigmoid(double x) {
  return x > 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

// sigmoid(-x) = 1 - sigmoid(x)
double sigmoid_complement(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

}  // namespace

BprParameters BprParameters::zeros(std::size_t n_users, std::size_t n_items, std::size_t dim) {
  BprParameters p;
  p.n_users = n_users;
  p.n_items = n_items;
  p.dim = dim;
  p.user_factors.assign(n_users * dim, 0.0);
  p.item_factors.assign(n_items * dim, 0.0);
  p.item_bias.assign(n_items, 0.0);
  return p;
}

BprParameters BprParameters::initialise(std::size_t n_users, std::size_t n_items, std::size_t dim, Rng& rng) {
  auto p = zeros(n_users, n_items, dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (auto& v : p.user_factors) v = (2.0 * uniform01(rng) - 1.0) * scale;
  for (auto& v : p.item_factors) v = (2.0 * uniform01(rng) - 1.0) * scale;
  return p;
}

double BprParameters::score(std::size_t u, std::size_t i) const { return dot(user(u), item(i)) + item_bias[i]; }

double bpr_triple_loss(const BprParameters& params, const BprTriple& triple, double l2) {
  const double x = params.score(triple.user, triple.positive) - params.score(triple.user, triple.negative);
  const double reg = squared_norm(params.user(triple.user)) + squared_norm(params.item(triple.positive)) +
                     squared_norm(params.item(triple.negative)) +
                     params.item_bias[triple.positive] * params.item_bias[triple.positive] +
                     params.item_bias[triple.negative] * params.item_bias[triple.negative];
  return neg_log_sigmoid(x) + 0.5 * l2 * reg;
}

BprTripleGradient bpr_triple_gradient(const BprParameters& params, const BprTriple& triple, double l2) {
  const auto pu = params.user(triple.user);
  const auto qi = params.item(triple.positive);
  const auto qj = params.item(triple.negative);
  const double x = params.score(triple.user, triple.positive) - params.score(triple.user, triple.negative);
  // d/dx of -ln sigmoid(x)
  const double g = -sigmoid_complement(x);

  BprTripleGradient grad;
  grad.user.resize(params.dim);
  grad.positive.resize(params.dim);
  grad.negative.resize(params.dim);
  for (std::size_t k = 0; k < params.dim; ++k) {
    grad.user[k] = g * (qi[k] - qj[k]) + l2 * pu[k];
    grad.positive[k] = g * pu[k] + l2 * qi[k];
    grad.negative[k] = -g * pu[k] + l2 * qj[k];
  }
  grad.positive_bias = g + l2 * params.item_bias[triple.positive];
  grad.negative_bias = -g + l2 * params.item_bias[triple.negative];
  return grad;
}

double bpr_sgd_step(BprParameters& params, const BprTriple& triple, double learning_rate, double l2) {
  const double loss = bpr_triple_loss(params, triple, l2);
  const auto grad = bpr_triple_gradient(params, triple, l2);
  auto pu = params.user(triple.user);
  auto qi = params.item(triple.positive);
  auto qj = params.item(triple.negative);
  for (std::size_t k = 0; k < params.dim; ++k) {
    pu[k] -= learning_rate * grad.user[k];
    qi[k] -= learning_rate * grad.positive[k];
    qj[k] -= learning_rate * grad.negative[k];
  }
  params.item_bias[triple.positive] -= learning_rate * grad.positive_bias;
  params.item_bias[triple.negative] -= learning_rate * grad.negative_bias;
  return loss;
}

FitReport BprRecommender::fit(const TrainingData& data, const TrainingConfig& config) {
  config.validate();
  const auto& train = data.train;
  if (train.nnz() == 0) throw ContractError("bpr: training split is empty");
  const auto& hp = config.bpr;

  Rng rng(config.seed);
  const bool reuse = config.warm_start && params_.n_users == train.rows() &&
                     params_.n_items == train.cols() && params_.dim == hp.dim;
  if (!reuse) params_ = BprParameters::initialise(train.rows(), train.cols(), hp.dim, rng);

  std::vector<std::pair<std::uint32_t, std::uint32_t>> positives;
  positives.reserve(train.nnz());
  for (std::size_t u = 0; u < train.rows(); ++u) {
    if (train.row(u).size() >= train.cols()) continue;  // no negative exists
    for (auto i : train.row(u)) positives.emplace_back(static_cast<std::uint32_t>(u), i);
  }

  FitReport report;
  if (positives.empty()) return report;

  std::uniform_int_distribution<std::size_t> pick_positive(0, positives.size() - 1);
  std::uniform_int_distribution<std::uint32_t> pick_item(0, static_cast<std::uint32_t>(train.cols() - 1));
  auto sample_negative = [&](std::size_t u) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const auto j = pick_item(rng);
      if (!train.contains(u, j)) return j;
    }
    const auto offset = pick_item(rng);
    for (std::size_t k = 0; k < train.cols(); ++k) {
      const auto j = static_cast<std::uint32_t>((offset + k) % train.cols());
      if (!train.contains(u, j)) return j;
    }
    throw InvariantViolation("bpr: user without negative items was sampled");
  };

  const bool early_stopping = data.validation.nnz() > 0;
  BprParameters best = params_;
  double best_ndcg = -1.0;
  int since_improvement = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t s = 0; s < train.nnz(); ++s) {
      const auto [u, i] = positives[pick_positive(rng)];
      for (std::size_t n = 0; n < hp.negatives; ++n) {
        const BprTriple triple{u, i, sample_negative(u)};
        loss_sum += bpr_sgd_step(params_, triple, hp.learning_rate, hp.l2);
        ++steps;
      }
    }
    const double mean_loss = loss_sum / static_cast<double>(steps);
    if (!std::isfinite(mean_loss)) throw TrainingDivergedError(epoch);
    report.epoch_losses.push_back(mean_loss);
    report.epochs_run = epoch;

    if (!early_stopping) continue;
    const double ndcg = validation_ndcg(*this, train, data.validation, config.eval_k);
    if (ndcg > best_ndcg) {
      best_ndcg = ndcg;
      best = params_;
      report.best_epoch = epoch;
      since_improvement = 0;
    } else if (++since_improvement >= config.patience) {
      break;
    }
  }

  if (early_stopping) {
    params_ = std::move(best);
    report.best_validation_ndcg = best_ndcg;
  } else {
    report.best_epoch = report.epochs_run;
  }
  return report;
}

void BprRecommender::score(UserIndex user, std::span<double> out) const {
  if (user >= params_.n_users) throw UnknownUserError("bpr: unknown user index " + std::to_string(user));
  if (out.size() != params_.n_items) throw ContractError("bpr: score buffer has the wrong size");
  const auto pu = params_.user(user);
  for (std::size_t i = 0; i < params_.n_items; ++i) out[i] = dot(pu, params_.item(i)) + params_.item_bias[i];
}

}  // namespace loopsim
