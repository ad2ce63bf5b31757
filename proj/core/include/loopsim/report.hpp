#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "loopsim/dataset.hpp"
#include "loopsim/engine.hpp"
#include "loopsim/metrics.hpp"
#include "loopsim/metrics_csv.hpp"
#include "loopsim/record.hpp"
#include "loopsim/stats.hpp"

namespace loopsim {

struct ReportOptions {
  /// A country enters the per-country tables when the initial dataset has at
  /// least this many users from it and tracks from it. OTHER never does.
  std::uint32_t min_country_users = 100;
  std::uint32_t min_country_tracks = 1000;
  DeltaMode delta_mode = DeltaMode::kRelative;
  /// Binning behind the headline JSD_Prof_pop row; both variants are listed
  /// separately as well.
  BinningMode binning = BinningMode::kCurrent;
  double significance = kBonferroniThreshold;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const CsvTable& table, std::ostream& out);
void write_csv(const CsvTable& table, const std::filesystem::path& path);

struct Report {
  /// model, indicator, baseline, value, delta, t, p, star, delta_mode, note
  CsvTable population;
  /// country, model, users, tracks, profile_country_jsd, rec_country_jsd, note
  CsvTable country_jsd;
  /// country, model, indicator, baseline, value, delta, t, p, star, delta_mode, note
  CsvTable country_deltas;
  /// iteration, model, metric, value: local/US proportion trajectories
  CsvTable proportions;
  /// iteration, model, metric, value: miscalibration trajectories
  CsvTable miscalibration;
  std::vector<std::string> qualifying_countries;
};

/// Countries (ascending code) meeting the user and track minimums.
std::vector<std::string> qualifying_countries(const InteractionDataset& initial, const ReportOptions& options);

/// Builds every table from one metrics table per model. Deltas compare the
/// last iteration with the iteration-0 profile means; significance uses the
/// test rows recorded for the last iteration.
Report build_report(std::span<const MetricTable> runs, const InteractionDataset& initial,
                    const ReportOptions& options = {});

/// Same tables straight from in-memory records (baseline first). The delta
/// mode and binning of `cfg` override those of `options`.
Report final_report(std::span<const IterationRecord> records, const InteractionDataset& initial,
                    const SimulationConfig& cfg, const ReportOptions& options = {});

/// Writes population_deltas.csv, country_jsd.csv, country_deltas.csv,
/// trajectory_proportions.csv and trajectory_miscalibration.csv into `dir`.
void write_report(const Report& report, const std::filesystem::path& dir);

}  // namespace loopsim
