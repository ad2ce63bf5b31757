#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "loopsim/errors.hpp"
#include "loopsim/rng.hpp"

namespace loopsim::cli {

Json default_config() {
  return Json{
      {"seed", nullptr},
      {"dataset", ""},
      {"ingest", {{"drop_unknown_country", false}, {"min_track_interactions", 0}, {"k_core", 0}}},
      {"simulation",
       {{"iterations", 100},
        {"k", 10},
        {"alpha", -0.1},
        {"allow_nonnegative_alpha", false},
        {"split", {{"train", 0.75}, {"validation", 0.20}, {"test", 0.05}}},
        {"popularity_binning", "current"},
        {"delta_mode", "relative"},
        {"t_test", "paired"},
        {"checkpoint_every", 0},
        {"threads", 1},
        {"warm_start", false}}},
      {"model",
       {{"name", "bpr"},
        {"fixture_path", ""},
        {"max_epochs", 200},
        {"patience", 5},
        {"eval_k", 10},
        {"itemknn", {{"neighbors", 100}, {"shrinkage", 0.0}}},
        {"bpr", {{"dim", 64}, {"learning_rate", 0.01}, {"l2", 1e-4}, {"negatives", 1}}}}},
      {"output", {{"root", "runs"}}},
      {"report", {{"min_country_users", 100}, {"min_country_tracks", 1000}}},
      {"synthetic",
       {{"countries", Json::array()},
        {"majority_country", "US"},
        {"majority_share", 0.45},
        {"local_affinity", 0.5},
        {"popularity_exponent", 1.0},
        {"min_user_interactions", 20},
        {"max_user_interactions", 40},
        {"core", 5}}},
      {"block",
       {{"users", 200}, {"items", 400}, {"clusters", 2}, {"within_density", 0.8}, {"across_density", 0.05}}},
  };
}

namespace {

bool compatible(const Json& base, const Json& value) {
  if (base.is_null()) return true;
  if (base.is_number()) return value.is_number();
  return base.type() == value.type();
}

template <typename T>
T get(const Json& j, const char* section, const char* key) {
  try {
    return j.at(section).at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(section) + "." + key + ": " + e.what());
  }
}

template <typename T>
T get_unsigned(const Json& j, const char* section, const char* key) {
  const auto& v = j.at(section).at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string(section) + "." + key + " must be a non-negative integer");
  }
  return v.get<T>();
}

CountryLabel parse_country(const std::string& code, const std::string& where) {
  if (code == "OTHER") return CountryLabel::other();
  auto c = CountryLabel::parse(code);
  if (!c) throw ConfigError(where + ": invalid country code '" + code + "'");
  return *c;
}

DeltaMode delta_mode(const Json& config) {
  const auto delta = get<std::string>(config, "simulation", "delta_mode");
  if (delta == "relative") return DeltaMode::kRelative;
  if (delta == "absolute") return DeltaMode::kAbsolute;
  throw ConfigError("simulation.delta_mode must be 'relative' or 'absolute'");
}

BinningMode binning_mode(const Json& config) {
  const auto binning = get<std::string>(config, "simulation", "popularity_binning");
  if (binning == "current") return BinningMode::kCurrent;
  if (binning == "frozen") return BinningMode::kFrozen;
  throw ConfigError("simulation.popularity_binning must be 'current' or 'frozen'");
}

}  // namespace

void merge_config(Json& base, const Json& overrides, const std::string& path) {
  if (!overrides.is_object()) throw ConfigError("config" + (path.empty() ? "" : " '" + path + "'") + " must be an object");
  for (const auto& [key, value] : overrides.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) throw ConfigError("unknown config key '" + where + "'");
    auto& target = base[key];
    if (!compatible(target, value)) throw ConfigError("config key '" + where + "' has the wrong type");
    if (target.is_object()) {
      merge_config(target, value, where);
    } else {
      target = value;
    }
  }
}

Json load_config(const std::optional<std::filesystem::path>& path) {
  Json config = default_config();
  if (!path) return config;
  std::ifstream in(*path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path->string() + "'");
  Json file;
  try {
    file = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path->string() + "': " + e.what());
  }
  merge_config(config, file);
  return config;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const Json& file_config) {
  if (flag) return *flag;
  const auto& s = file_config.at("seed");
  if (!s.is_null()) {
    if (!s.is_number_integer() || s.get<long long>() < 0) throw ConfigError("seed must be a non-negative integer");
    return s.get<std::uint64_t>();
  }
  if (const char* env = std::getenv("LOOPSIM_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("LOOPSIM_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  return 42;
}

SimulationConfig to_simulation_config(const Json& config) {
  SimulationConfig cfg;
  cfg.seed = config.at("seed").is_null() ? 42 : config.at("seed").get<std::uint64_t>();
  cfg.n_iterations = get_unsigned<std::uint32_t>(config, "simulation", "iterations");
  cfg.choice.k = get_unsigned<std::size_t>(config, "simulation", "k");
  cfg.choice.alpha = get<double>(config, "simulation", "alpha");
  cfg.allow_nonnegative_alpha = get<bool>(config, "simulation", "allow_nonnegative_alpha");
  const auto& split = config.at("simulation").at("split");
  cfg.split = SplitRatios{split.at("train").get<double>(), split.at("validation").get<double>(),
                          split.at("test").get<double>()};

  cfg.binning = binning_mode(config);
  cfg.delta_mode = delta_mode(config);
  const auto test = get<std::string>(config, "simulation", "t_test");
  if (test == "paired") {
    cfg.test = TestKind::kPaired;
  } else if (test == "independent") {
    cfg.test = TestKind::kIndependent;
  } else {
    throw ConfigError("simulation.t_test must be 'paired' or 'independent'");
  }
  cfg.checkpoint_every = get_unsigned<std::uint32_t>(config, "simulation", "checkpoint_every");
  cfg.threads = get_unsigned<std::size_t>(config, "simulation", "threads");
  cfg.warm_start = get<bool>(config, "simulation", "warm_start");

  cfg.model.name = get<std::string>(config, "model", "name");
  cfg.model.fixture_path = get<std::string>(config, "model", "fixture_path");
  cfg.training.max_epochs = get<int>(config, "model", "max_epochs");
  cfg.training.patience = get<int>(config, "model", "patience");
  cfg.training.eval_k = get_unsigned<std::size_t>(config, "model", "eval_k");
  const auto& knn = config.at("model").at("itemknn");
  cfg.training.itemknn.neighbors = knn.at("neighbors").get<std::size_t>();
  cfg.training.itemknn.shrinkage = knn.at("shrinkage").get<double>();
  const auto& bpr = config.at("model").at("bpr");
  cfg.training.bpr.dim = bpr.at("dim").get<std::size_t>();
  cfg.training.bpr.learning_rate = bpr.at("learning_rate").get<double>();
  cfg.training.bpr.l2 = bpr.at("l2").get<double>();
  cfg.training.bpr.negatives = bpr.at("negatives").get<std::size_t>();
  if (cfg.model.name.find(',') != std::string::npos) throw ConfigError("model.name must not contain commas");
  cfg.validate();
  return cfg;
}

IngestOptions to_ingest_options(const Json& config) {
  IngestOptions options;
  options.drop_unknown_country = get<bool>(config, "ingest", "drop_unknown_country");
  options.filters.min_track_interactions = get_unsigned<std::uint32_t>(config, "ingest", "min_track_interactions");
  options.filters.k_core = get_unsigned<std::uint32_t>(config, "ingest", "k_core");
  return options;
}

SyntheticSpec to_synthetic_spec(const Json& config) {
  SyntheticSpec spec;
  const auto& s = config.at("synthetic");
  try {
    for (const auto& c : s.at("countries")) {
      spec.countries.push_back(CountrySpec{parse_country(c.at("country").get<std::string>(), "synthetic.countries"),
                                           c.at("users").get<std::uint32_t>(), c.at("tracks").get<std::uint32_t>()});
    }
    spec.majority_country = parse_country(s.at("majority_country").get<std::string>(), "synthetic.majority_country");
    spec.majority_share = s.at("majority_share").get<double>();
    spec.local_affinity = s.at("local_affinity").get<double>();
    spec.popularity_exponent = s.at("popularity_exponent").get<double>();
    spec.min_user_interactions = s.at("min_user_interactions").get<std::uint32_t>();
    spec.max_user_interactions = s.at("max_user_interactions").get<std::uint32_t>();
    spec.core = s.at("core").get<std::uint32_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synthetic: ") + e.what());
  }
  spec.validate();
  return spec;
}

BlockSpec to_block_spec(const Json& config) {
  BlockSpec spec;
  spec.users = get_unsigned<std::uint32_t>(config, "block", "users");
  spec.items = get_unsigned<std::uint32_t>(config, "block", "items");
  spec.clusters = get_unsigned<std::uint32_t>(config, "block", "clusters");
  spec.within_density = get<double>(config, "block", "within_density");
  spec.across_density = get<double>(config, "block", "across_density");
  return spec;
}

ReportOptions to_report_options(const Json& config) {
  ReportOptions options;
  options.min_country_users = get_unsigned<std::uint32_t>(config, "report", "min_country_users");
  options.min_country_tracks = get_unsigned<std::uint32_t>(config, "report", "min_country_tracks");
  options.delta_mode = delta_mode(config);
  options.binning = binning_mode(config);
  return options;
}

std::string dump_config(const Json& config) { return config.dump(2) + "\n"; }

std::string config_hash(const Json& config) {
  return fingerprint_hex(fnv1a64(dump_config(config))).substr(0, 8);
}

}  // namespace loopsim::cli
