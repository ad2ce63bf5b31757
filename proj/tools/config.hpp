#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "loopsim/engine.hpp"
#include "loopsim/ingest.hpp"
#include "loopsim/report.hpp"
#include "loopsim/synthetic.hpp"

namespace loopsim::cli {

using Json = nlohmann::ordered_json;

/// Every recognised key with its default value. Config files may set any
/// subset; unknown keys are rejected.
Json default_config();

/// Overlays `overrides` on `base`. Throws ConfigError naming the path of the
/// first unknown key or type mismatch.
void merge_config(Json& base, const Json& overrides, const std::string& path = "");

/// default_config() overlaid with the file (when given).
Json load_config(const std::optional<std::filesystem::path>& path);

/// Seed precedence: flag, then config file, then LOOPSIM_SEED, then 42.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const Json& file_config);

SimulationConfig to_simulation_config(const Json& config);
IngestOptions to_ingest_options(const Json& config);
SyntheticSpec to_synthetic_spec(const Json& config);
BlockSpec to_block_spec(const Json& config);
ReportOptions to_report_options(const Json& config);

/// Canonical text of the effective config (stable key order, 2-space indent).
std::string dump_config(const Json& config);

/// First 8 hex digits of the FNV-1a hash of dump_config(config).
std::string config_hash(const Json& config);

}  // namespace loopsim::cli
