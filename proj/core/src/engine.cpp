#include "loopsim/engine.hpp"

#include <algorithm>
#include <exception>
#include <string>
#include <thread>

#include "loopsim/errors.hpp"
#include "loopsim/matrix.hpp"
#include "loopsim/rng.hpp"

namespace loopsim {

void SimulationConfig::validate() const {
  if (n_iterations < 1) throw ConfigError("n_iterations must be >= 1");
  choice.validate(allow_nonnegative_alpha);
  split.validate();
  training.validate();
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (model.name == "fixture" && model.fixture_path.empty()) {
    throw ConfigError("fixture model needs a fixture_path");
  }
}

InitialState InitialState::from(const InteractionDataset& ds) {
  InitialState s{ds.initial_only(), {}, {}, {}};
  s.frozen_binning = popularity_binning(s.initial);
  const auto countries = s.initial.track_countries();
  s.country.reserve(s.initial.num_users());
  s.popularity_frozen.reserve(s.initial.num_users());
  for (std::size_t u = 0; u < s.initial.num_users(); ++u) {
    const auto profile = s.initial.profile(static_cast<UserIndex>(u));
    s.country.push_back(country_distribution(profile, s.initial.users()[u].country, countries));
    s.popularity_frozen.push_back(popularity_distribution(profile, s.frozen_binning));
  }
  return s;
}

namespace {

// Profile-side metrics of every user against the initial profiles. `recs`
// may be empty (baseline).
IterationRecord build_record(const InteractionDataset& ds, const InitialState& init,
                             std::uint32_t iteration, std::vector<RecommendationList> recs,
                             const AcceptedItems& accepted) {
  IterationRecord record;
  record.iteration = iteration;
  const auto countries = ds.track_countries();
  const auto current = iteration == 0 ? init.frozen_binning : popularity_binning(ds);

  record.users.resize(ds.num_users());
  for (std::size_t i = 0; i < ds.num_users(); ++i) {
    const auto u = static_cast<UserIndex>(i);
    const auto country = ds.users()[i].country;
    auto& r = record.users[i];
    r.user = u;
    if (auto it = accepted.find(u); it != accepted.end()) r.accepted = it->second;

    const auto profile = ds.profile(u);
    const auto initial = ds.initial_profile(u);
    r.profile_size = profile.size();
    const auto props = country_proportions(profile, country, countries);
    r.prof_local = props.local;
    r.prof_us = props.us;
    r.profile_country_jsd = jsd(country_distribution(profile, country, countries), init.country[i]);
    r.profile_pop_jsd = jsd(popularity_distribution(profile, current),
                            popularity_distribution(initial, current));
    r.profile_pop_jsd_frozen =
        jsd(popularity_distribution(profile, init.frozen_binning), init.popularity_frozen[i]);

    if (i < recs.size() && !recs[i].empty()) {
      r.recommended = recs[i].tracks();
      const auto rec_props = country_proportions(r.recommended, country, countries);
      r.rec_local = rec_props.local;
      r.rec_us = rec_props.us;
      r.rec_country_jsd = jsd(country_distribution(r.recommended, country, countries), init.country[i]);
      r.rec_pop_jsd = jsd(popularity_distribution(r.recommended, current),
                          popularity_distribution(initial, current));
    }
  }
  record.skipped_users = iteration == 0 ? 0 : ds.num_users() - accepted.size();
  return record;
}

template <typename Fn>
void for_each_user(std::size_t n_users, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n_users));
  if (threads == 1) {
    for (std::size_t u = 0; u < n_users; ++u) fn(u, 0);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t u = w; u < n_users; u += threads) fn(u, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

IterationRecord baseline_record(const InitialState& init) {
  return build_record(init.initial, init, 0, {}, {});
}

std::pair<InteractionDataset, IterationRecord> run_iteration(const InteractionDataset& ds,
                                                             const InitialState& init,
                                                             const SimulationConfig& cfg,
                                                             std::uint32_t iteration,
                                                             Recommender* model) {
  if (iteration < 1) throw ContractError("iterations are numbered from 1");

  const auto split = random_split(ds, cfg.split, derive_seed(cfg.seed, Stream::kSplit, {iteration}));
  const auto train = UserItemMatrix::from_interactions(ds, split.train);
  const auto validation = UserItemMatrix::from_interactions(ds, split.validation);

  std::unique_ptr<Recommender> fresh;
  if (model == nullptr) {
    fresh = make_recommender(cfg.model);
    model = fresh.get();
  }
  TrainingConfig training = cfg.training;
  training.seed = derive_seed(cfg.seed, Stream::kFit, {iteration});
  training.warm_start = cfg.warm_start;
  const TrainingData data{train, validation, ds.users(), ds.tracks()};
  auto fit_report = model->fit(data, training);
  const double ndcg = validation_ndcg(*model, train, validation, training.eval_k);

  const std::size_t n_users = ds.num_users();
  std::vector<RecommendationList> recs(n_users);
  std::vector<std::optional<TrackIndex>> choices(n_users);
  std::vector<std::vector<double>> buffers(std::max<std::size_t>(1, cfg.threads));
  for_each_user(n_users, cfg.threads, [&](std::size_t i, std::size_t worker) {
    const auto u = static_cast<UserIndex>(i);
    auto& scores = buffers[worker];
    scores.resize(model->num_items());
    model->score(u, scores);
    const auto seen = ds.seen(u);
    recs[i] = top_k_from_scores(u, scores, cfg.choice.k, seen);
    for (const auto& e : recs[i].entries) {
      if (ds.has_seen(u, e.track)) {
        throw InvariantViolation("recommended an already-seen item to user '" + ds.users()[i].id + "'");
      }
    }
    if (recs[i].empty()) return;  // nothing unseen left: skipped
    Rng rng(derive_seed(cfg.seed, Stream::kChoice, {iteration, fnv1a64(ds.users()[i].id)}));
    choices[i] = sample_accepted_item(recs[i], cfg.choice.alpha, rng);
  });

  AcceptedItems accepted;
  for (std::size_t i = 0; i < n_users; ++i) {
    if (choices[i]) accepted.emplace(static_cast<UserIndex>(i), *choices[i]);
  }
  auto next = cfg.augment ? ds.augmented(accepted, iteration) : ds;

  auto record = build_record(next, init, iteration, std::move(recs), accepted);
  record.skipped_users = n_users - accepted.size();
  record.validation_ndcg = ndcg;
  record.fit = std::move(fit_report);
  return {std::move(next), std::move(record)};
}

Simulation::Simulation(InteractionDataset dataset, SimulationConfig config)
    : Simulation(dataset, std::move(config), dataset.last_iteration()) {}

Simulation::Simulation(InteractionDataset dataset, SimulationConfig config, std::uint32_t completed)
    : config_(std::move(config)),
      dataset_(std::move(dataset)),
      init_(InitialState::from(dataset_)),
      baseline_(baseline_record(init_)),
      next_(completed + 1) {
  config_.validate();
  if (config_.augment && completed != dataset_.last_iteration()) {
    throw ContractError("dataset carries " + std::to_string(dataset_.last_iteration()) +
                        " iterations, expected " + std::to_string(completed));
  }
  // The fixture model reads its file once; warm starts need one instance.
  if (config_.warm_start || config_.model.name == "fixture") model_ = make_recommender(config_.model);
}

IterationRecord Simulation::step() {
  if (done()) throw ContractError("simulation already finished");
  auto [next, record] = run_iteration(dataset_, init_, config_, next_, model_.get());
  dataset_ = std::move(next);
  ++next_;
  return std::move(record);
}

void Simulation::run(const std::function<void(const IterationRecord&, const InteractionDataset&)>& on_record) {
  while (!done()) {
    auto record = step();
    if (on_record) on_record(record, dataset_);
  }
}

std::vector<IterationRecord> run_simulation(const InteractionDataset& ds0, const SimulationConfig& cfg) {
  Simulation sim(ds0, cfg);
  std::vector<IterationRecord> records;
  records.reserve(cfg.n_iterations + 1);
  records.push_back(sim.baseline());
  sim.run([&](const IterationRecord& r, const InteractionDataset&) { records.push_back(r); });
  return records;
}

}  // namespace loopsim
