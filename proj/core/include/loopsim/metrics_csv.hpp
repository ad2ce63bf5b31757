#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loopsim/dataset.hpp"
#include "loopsim/record.hpp"
#include "loopsim/stats.hpp"

namespace loopsim {

inline constexpr std::string_view kMetricsHeader = "iteration,scope,model,metric,country,value";

/// Last row of every iteration group; its absence marks a truncated file.
inline constexpr std::string_view kIterationCompleteMetric = "iteration_complete";

inline constexpr std::string_view kPopulationScope = "population";
inline constexpr std::string_view kCountryScope = "country";

struct MetricRow {
  std::uint32_t iteration = 0;
  std::string scope;
  std::string model;
  std::string metric;
  std::string country;  // empty for the population scope
  double value = 0.0;

  bool operator==(const MetricRow&) const = default;
};

/// Shortest round-trip decimal representation ("nan", "inf", "-inf" for
/// non-finite values).
std::string format_value(double v);
std::string format_row(const MetricRow& row);

/// Rows of one iteration for the population and for every user country:
///
///   users, accepted, skipped_users, prof_local_mean, prof_us_mean,
///   profile_country_jsd, profile_pop_jsd, profile_pop_jsd_frozen,
///   rec_local_mean, rec_us_mean, rec_country_jsd, rec_pop_jsd (when any user
///   got a list), validation_ndcg (population, iterations >= 1), and for
///   iterations >= 1 the test statistics {prof,rec}_{local,us}_{t,p} of the
///   per-user values against the baseline profile values of the same users
///   (emitted when at least two users take part).
///
/// The final row is the iteration_complete marker.
std::vector<MetricRow> iteration_rows(const IterationRecord& record, const IterationRecord& baseline,
                                      std::span<const UserMeta> users, std::string_view model,
                                      TestKind test = TestKind::kPaired);

/// Appends iteration groups to a metrics CSV. Each group is written with a
/// single write and flushed, so a crash leaves at most one partial group.
class MetricsCsvWriter {
 public:
  /// Creates (or truncates) the file and writes the header; with `append`
  /// an existing file is extended instead.
  explicit MetricsCsvWriter(const std::filesystem::path& path, bool append = false);

  void write(std::span<const MetricRow> rows);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// A parsed metrics CSV holding complete iteration groups only.
class MetricTable {
 public:
  MetricTable() = default;
  explicit MetricTable(std::vector<MetricRow> rows);

  std::span<const MetricRow> rows() const noexcept { return rows_; }
  /// Model name of the run (first row's model).
  const std::string& model() const noexcept { return model_; }
  std::uint32_t last_iteration() const noexcept { return last_iteration_; }

  std::optional<double> get(std::uint32_t iteration, std::string_view scope, std::string_view metric,
                            std::string_view country = {}) const;

  /// Country codes appearing in country-scope rows, ascending.
  std::vector<std::string> countries() const;

 private:
  std::vector<MetricRow> rows_;
  std::string model_;
  std::uint32_t last_iteration_ = 0;
};

/// Parses a metrics CSV. Throws ParseError for malformed rows and DataError
/// when the file ends inside an iteration group, when iterations are not
/// contiguous from 0, or when no iteration is complete; the message names
/// the last complete iteration.
MetricTable read_metrics_csv(std::istream& in);
MetricTable read_metrics_csv(const std::filesystem::path& path);

/// Copies the header and the complete groups of iterations <= `iteration`.
void truncate_metrics_csv(const std::filesystem::path& from, const std::filesystem::path& to,
                          std::uint32_t iteration);

}  // namespace loopsim
