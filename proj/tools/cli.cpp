#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "loopsim/checkpoint.hpp"
#include "loopsim/engine.hpp"
#include "loopsim/errors.hpp"
#include "loopsim/ingest.hpp"
#include "loopsim/metrics_csv.hpp"
#include "loopsim/report.hpp"
#include "loopsim/synthetic.hpp"

#ifndef LOOPSIM_VERSION
#define LOOPSIM_VERSION "unknown"
#endif

namespace loopsim::cli {

namespace fs = std::filesystem;

namespace {

std::string utc_now(const char* format = "%Y-%m-%dT%H:%M:%SZ") {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, format, &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size())) || !out.flush()) {
    throw DataError("cannot write '" + path.string() + "'");
  }
}

// Writes via a temporary file so a reader never sees a half-written manifest.
void write_file_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  write_file(tmp, text);
  fs::rename(tmp, path);
}

template <typename T>
void set_if(Json& config, std::initializer_list<const char*> path, const std::optional<T>& value) {
  if (!value) return;
  Json* node = &config;
  for (const auto* key : path) node = &(*node)[key];
  *node = *value;
}

InteractionDataset load_dataset(const Json& config) {
  const auto path = config.at("dataset").get<std::string>();
  if (path.empty()) throw ConfigError("no dataset given (set \"dataset\" in the config or pass --dataset)");
  if (!fs::exists(path)) throw ConfigError("dataset file '" + path + "' does not exist");
  return ingest(path, to_ingest_options(config));
}

std::string format_mean(std::optional<double> v) { return v ? format_value(*v) : "n/a"; }

// ---------------------------------------------------------------- gen-synthetic

struct GenOptions {
  std::optional<std::string> config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string kind = "synthetic";
};

int cmd_gen_synthetic(const GenOptions& opt, std::ostream& out) {
  auto config = load_config(opt.config ? std::optional<fs::path>(*opt.config) : std::nullopt);
  const auto seed = resolve_seed(opt.seed, config);
  InteractionDataset ds;
  if (opt.kind == "block") {
    ds = generate_block_dataset(to_block_spec(config), seed);
  } else if (opt.kind == "synthetic") {
    const auto spec = to_synthetic_spec(config);
    if (spec.countries.empty()) throw ConfigError("synthetic.countries is empty");
    ds = generate_synthetic(spec, seed);
  } else {
    throw ConfigError("--kind must be 'synthetic' or 'block'");
  }
  const fs::path path(opt.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_interactions(ds, path);
  out << "wrote " << ds.num_interactions() << " interactions (" << ds.num_users() << " users, " << ds.num_tracks()
      << " tracks, seed " << seed << ") to " << path.string() << "\n"
      << "fingerprint " << fingerprint_hex(dataset_fingerprint(ds)) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::optional<std::string> config;
  std::optional<std::string> dataset;
  std::optional<std::string> model;
  std::optional<std::string> fixture;
  std::optional<std::uint32_t> iterations;
  std::optional<std::size_t> k;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> run_dir;
  std::optional<std::uint32_t> checkpoint_every;
  std::optional<std::string> resume;
  std::optional<int> max_epochs;
  std::optional<int> patience;
  std::optional<std::string> binning;
  std::optional<std::string> delta_mode;
  std::optional<std::string> t_test;
  std::optional<std::size_t> threads;
  bool warm_start = false;
  bool allow_nonnegative_alpha = false;
};

fs::path fresh_run_dir(const fs::path& root, const std::string& hash) {
  const auto base = utc_now("%Y%m%dT%H%M%SZ") + "-" + hash;
  fs::path dir = root / base;
  for (int n = 2; fs::exists(dir); ++n) dir = root / (base + "-" + std::to_string(n));
  return dir;
}

class Manifest {
 public:
  Manifest(fs::path path, Json config, std::string hash) : path_(std::move(path)) {
    doc_["tool"] = "loopsim";
    doc_["version"] = LOOPSIM_VERSION;
    doc_["command"] = "simulate";
    doc_["status"] = "running";
    doc_["started_at"] = utc_now();
    doc_["finished_at"] = nullptr;
    doc_["seed"] = config.at("seed");
    doc_["config_hash"] = std::move(hash);
    doc_["config"] = std::move(config);
  }

  Json& doc() { return doc_; }

  void write() const { write_file_atomic(path_, doc_.dump(2) + "\n"); }

  void finish(const std::string& status, const std::string& error = {}) {
    doc_["status"] = status;
    doc_["finished_at"] = utc_now();
    if (!error.empty()) doc_["error"] = error;
    write();
  }

 private:
  fs::path path_;
  Json doc_;
};

int cmd_simulate(const SimulateOptions& opt, std::ostream& out) {
  std::optional<Checkpoint> checkpoint;
  if (opt.resume) checkpoint = load_checkpoint(*opt.resume);

  // A resumed run defaults to the configuration stored in its checkpoint.
  Json config = default_config();
  if (opt.config) {
    config = load_config(fs::path(*opt.config));
  } else if (checkpoint && !checkpoint->config_text.empty()) {
    try {
      merge_config(config, Json::parse(checkpoint->config_text));
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError("checkpoint config.json: " + std::string(e.what()));
    }
  }
  set_if(config, {"dataset"}, opt.dataset);
  set_if(config, {"model", "name"}, opt.model);
  set_if(config, {"model", "fixture_path"}, opt.fixture);
  set_if(config, {"simulation", "iterations"}, opt.iterations);
  set_if(config, {"simulation", "k"}, opt.k);
  set_if(config, {"simulation", "alpha"}, opt.alpha);
  set_if(config, {"simulation", "checkpoint_every"}, opt.checkpoint_every);
  set_if(config, {"model", "max_epochs"}, opt.max_epochs);
  set_if(config, {"model", "patience"}, opt.patience);
  set_if(config, {"simulation", "popularity_binning"}, opt.binning);
  set_if(config, {"simulation", "delta_mode"}, opt.delta_mode);
  set_if(config, {"simulation", "t_test"}, opt.t_test);
  set_if(config, {"simulation", "threads"}, opt.threads);
  set_if(config, {"output", "root"}, opt.out);
  if (opt.warm_start) config["simulation"]["warm_start"] = true;
  if (opt.allow_nonnegative_alpha) config["simulation"]["allow_nonnegative_alpha"] = true;
  config["seed"] = resolve_seed(opt.seed, config);

  const auto cfg = to_simulation_config(config);
  if (cfg.choice.alpha >= 0.0) {
    out << "warning: alpha >= 0 does not favour higher ranks; use only for testing\n";
  }

  InteractionDataset dataset;
  std::uint32_t completed = 0;
  if (checkpoint) {
    if (cfg.warm_start) throw ConfigError("--resume cannot be combined with warm_start");
    if (checkpoint->state.seed != cfg.seed) {
      throw ConfigError("seed " + std::to_string(cfg.seed) + " differs from the checkpoint's seed " +
                        std::to_string(checkpoint->state.seed));
    }
    completed = checkpoint->state.iteration;
    if (completed >= cfg.n_iterations) {
      throw ConfigError("checkpoint is at iteration " + std::to_string(completed) + ", nothing left of " +
                        std::to_string(cfg.n_iterations) + " iterations");
    }
    dataset = checkpoint->dataset;
  } else {
    dataset = load_dataset(config);
  }

  const auto config_text = dump_config(config);
  const auto hash = config_hash(config);
  const fs::path run_dir = opt.run_dir ? fs::path(*opt.run_dir)
                                       : fresh_run_dir(config.at("output").at("root").get<std::string>(), hash);
  fs::create_directories(run_dir);
  write_file(run_dir / "config.json", config_text);

  const auto metrics_path = run_dir / "metrics.csv";
  Manifest manifest(run_dir / "manifest.json", config, hash);
  const auto initial_fingerprint = fingerprint_hex(dataset_fingerprint(dataset.initial_only()));
  manifest.doc()["dataset"] = {{"path", config.at("dataset")},
                               {"fingerprint", initial_fingerprint},
                               {"users", dataset.num_users()},
                               {"tracks", dataset.num_tracks()},
                               {"interactions", dataset.initial_only().num_interactions()}};
  manifest.doc()["outputs"] = {{"run_dir", run_dir.string()},
                               {"config", (run_dir / "config.json").string()},
                               {"metrics", metrics_path.string()},
                               {"checkpoints", Json::array()}};
  if (checkpoint) {
    manifest.doc()["resumed_from"] = {{"checkpoint", checkpoint->dir.string()}, {"iteration", completed}};
  }
  manifest.write();

  try {
    Simulation sim(std::move(dataset), cfg, completed);
    const auto users = sim.initial().initial.users();

    std::optional<MetricsCsvWriter> writer;
    if (checkpoint) {
      if (checkpoint->metrics_csv.empty()) throw DataError("checkpoint holds no metrics.csv snapshot");
      if (fs::absolute(checkpoint->metrics_csv) != fs::absolute(metrics_path)) {
        truncate_metrics_csv(checkpoint->metrics_csv, metrics_path, completed);
      }
      writer.emplace(metrics_path, true);
    } else {
      writer.emplace(metrics_path);
      const auto rows = iteration_rows(sim.baseline(), sim.baseline(), users, cfg.model.name, cfg.test);
      writer->write(rows);
    }

    sim.run([&](const IterationRecord& record, const InteractionDataset& ds) {
      const auto rows = iteration_rows(record, sim.baseline(), users, cfg.model.name, cfg.test);
      writer->write(rows);
      const auto summary = summarize(record, users);
      out << "iteration " << record.iteration << "/" << cfg.n_iterations
          << ": ndcg=" << format_mean(record.validation_ndcg) << " rec_local=" << format_mean(summary.rec_local)
          << " prof_local=" << format_value(summary.prof_local) << " skipped=" << record.skipped_users << "\n";
      if (cfg.checkpoint_every > 0 && record.iteration % cfg.checkpoint_every == 0) {
        const auto dir = checkpoint_path(run_dir, record.iteration);
        write_checkpoint(dir, ds,
                         CheckpointState{record.iteration, cfg.seed, hash, fingerprint_hex(dataset_fingerprint(ds))},
                         metrics_path, config_text);
        manifest.doc()["outputs"]["checkpoints"].push_back(dir.string());
        manifest.write();
      }
    });
  } catch (const std::exception& e) {
    manifest.finish("failed", e.what());
    throw;
  }
  manifest.finish("completed");
  out << "run directory: " << run_dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct ReportCliOptions {
  std::vector<std::string> metrics;
  std::optional<std::string> config;
  std::optional<std::string> dataset;
  std::string out;
  std::optional<std::uint32_t> min_users;
  std::optional<std::uint32_t> min_tracks;
  std::optional<std::string> delta_mode;
  std::optional<std::string> binning;
  std::optional<std::uint32_t> min_track_interactions;
  std::optional<std::uint32_t> k_core;
  bool drop_unknown_country = false;
};

int cmd_report(const ReportCliOptions& opt, std::ostream& out) {
  auto config = load_config(opt.config ? std::optional<fs::path>(*opt.config) : std::nullopt);
  set_if(config, {"dataset"}, opt.dataset);
  set_if(config, {"report", "min_country_users"}, opt.min_users);
  set_if(config, {"report", "min_country_tracks"}, opt.min_tracks);
  set_if(config, {"simulation", "delta_mode"}, opt.delta_mode);
  set_if(config, {"simulation", "popularity_binning"}, opt.binning);
  set_if(config, {"ingest", "min_track_interactions"}, opt.min_track_interactions);
  set_if(config, {"ingest", "k_core"}, opt.k_core);
  if (opt.drop_unknown_country) config["ingest"]["drop_unknown_country"] = true;
  const auto options = to_report_options(config);

  for (const auto& m : opt.metrics) {
    if (!fs::exists(m)) throw ConfigError("metrics file '" + m + "' does not exist");
  }
  std::vector<MetricTable> runs;
  for (const auto& m : opt.metrics) runs.push_back(read_metrics_csv(fs::path(m)));
  const auto initial = load_dataset(config).initial_only();

  const auto report = build_report(runs, initial, options);
  write_report(report, opt.out);
  for (const auto& run : runs) {
    out << run.model() << ": iterations 0.." << run.last_iteration() << "\n";
  }
  if (report.qualifying_countries.empty()) {
    out << "no country meets the per-country thresholds\n";
  } else {
    out << "countries:";
    for (const auto& c : report.qualifying_countries) out << ' ' << c;
    out << "\n";
  }
  out << "report written to " << opt.out << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feedback-loop simulator for music recommenders"};
  app.set_version_flag("--version", LOOPSIM_VERSION);
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Generate a synthetic interactions file");
  gen_cmd->add_option("--config", gen.config, "JSON config with a 'synthetic' or 'block' section");
  gen_cmd->add_option("--out", gen.out, "Output interactions file")->required();
  gen_cmd->add_option("--seed", gen.seed, "Master seed");
  gen_cmd->add_option("--kind", gen.kind, "synthetic (country-skewed) or block (clustered)")
      ->check(CLI::IsMember({"synthetic", "block"}));

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the feedback loop");
  sim_cmd->add_option("--config", sim.config, "JSON config file");
  sim_cmd->add_option("--dataset", sim.dataset, "Interactions file");
  sim_cmd->add_option("--model", sim.model, "pop, itemknn, bpr, random or fixture");
  sim_cmd->add_option("--fixture", sim.fixture, "Score file for the fixture model");
  sim_cmd->add_option("--iterations", sim.iterations, "Number of loop iterations");
  sim_cmd->add_option("--k", sim.k, "Recommendation list length");
  sim_cmd->add_option("--alpha", sim.alpha, "Acceptance rank decay (< 0)");
  sim_cmd->add_option("--seed", sim.seed, "Master seed");
  sim_cmd->add_option("--out", sim.out, "Root directory for run directories");
  sim_cmd->add_option("--run-dir", sim.run_dir, "Exact run directory");
  sim_cmd->add_option("--checkpoint-every", sim.checkpoint_every, "Checkpoint interval in iterations (0: never)");
  sim_cmd->add_option("--resume", sim.resume, "Checkpoint directory to continue from");
  sim_cmd->add_option("--max-epochs", sim.max_epochs, "Training epoch limit");
  sim_cmd->add_option("--patience", sim.patience, "Early-stopping patience in epochs");
  sim_cmd->add_option("--popularity-binning", sim.binning, "current or frozen");
  sim_cmd->add_option("--delta-mode", sim.delta_mode, "relative or absolute");
  sim_cmd->add_option("--t-test", sim.t_test, "paired or independent");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads for per-user work");
  sim_cmd->add_flag("--warm-start", sim.warm_start, "Keep training the previous iteration's model");
  sim_cmd->add_flag("--allow-nonnegative-alpha", sim.allow_nonnegative_alpha, "Accept alpha >= 0 (testing only)");

  ReportCliOptions rep;
  auto* rep_cmd = app.add_subcommand("report", "Build summary tables and trajectory CSVs from metrics CSVs");
  rep_cmd->add_option("--metrics", rep.metrics, "metrics.csv of a run (repeatable)")->required();
  rep_cmd->add_option("--config", rep.config, "JSON config (dataset, ingest and report sections)");
  rep_cmd->add_option("--dataset", rep.dataset, "Initial interactions file");
  rep_cmd->add_option("--out", rep.out, "Output directory")->required();
  rep_cmd->add_option("--min-country-users", rep.min_users, "Per-country user minimum");
  rep_cmd->add_option("--min-country-tracks", rep.min_tracks, "Per-country track minimum");
  rep_cmd->add_option("--delta-mode", rep.delta_mode, "relative or absolute");
  rep_cmd->add_option("--popularity-binning", rep.binning, "current or frozen");
  rep_cmd->add_option("--min-track-interactions", rep.min_track_interactions, "Ingest filter");
  rep_cmd->add_option("--k-core", rep.k_core, "Ingest filter");
  rep_cmd->add_flag("--drop-unknown-country", rep.drop_unknown_country, "Ingest filter");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen_cmd) return cmd_gen_synthetic(gen, out);
    if (*sim_cmd) return cmd_simulate(sim, out);
    if (*rep_cmd) return cmd_report(rep, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const TrainingDivergedError& e) {
    err << "training diverged: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const InvariantViolation& e) {
    err << "invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace loopsim::cli
