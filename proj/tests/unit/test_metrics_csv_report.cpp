#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fixtures.hpp"
#include "loopsim/engine.hpp"
#include "loopsim/errors.hpp"
#include "loopsim/metrics_csv.hpp"
#include "loopsim/report.hpp"
#include "loopsim/synthetic.hpp"

namespace loopsim {
namespace {

InteractionDataset small_synthetic() {
  SyntheticSpec spec;
  spec.countries = {{CountryLabel("US"), 20, 60}, {CountryLabel("DE"), 15, 40}, {CountryLabel::other(), 10, 30}};
  spec.min_user_interactions = 20;
  spec.max_user_interactions = 40;
  return generate_synthetic(spec, 2);
}

SimulationConfig pop_config(std::uint32_t iterations) {
  SimulationConfig cfg;
  cfg.n_iterations = iterations;
  cfg.model.name = "pop";
  return cfg;
}

std::string to_csv(const std::vector<IterationRecord>& records, const InteractionDataset& ds) {
  std::ostringstream out;
  out << kMetricsHeader << '\n';
  for (const auto& r : records) {
    for (const auto& row : iteration_rows(r, records.front(), ds.users(), "pop")) out << format_row(row) << '\n';
  }
  return out.str();
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(FormatValue, ShortestRoundTrip) {
  EXPECT_EQ(format_value(0.1), "0.1");
  EXPECT_EQ(format_value(1.0), "1");
  EXPECT_EQ(format_value(-47.5), "-47.5");
  EXPECT_EQ(format_value(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_value(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_value(-std::numeric_limits<double>::infinity()), "-inf");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_value(x)), x);
}

TEST(IterationRows, GroupLayout) {
  const auto ds = small_synthetic();
  const auto records = run_simulation(ds, pop_config(2));
  const auto base = iteration_rows(records[0], records[0], ds.users(), "pop");
  ASSERT_FALSE(base.empty());
  EXPECT_EQ(base.back().metric, kIterationCompleteMetric);
  bool has_rec = false;
  for (const auto& r : base) has_rec = has_rec || r.metric == "rec_local_mean" || r.metric == "prof_local_t";
  EXPECT_FALSE(has_rec);

  const auto one = iteration_rows(records[1], records[0], ds.users(), "pop");
  EXPECT_EQ(one.back().metric, kIterationCompleteMetric);
  const MetricTable table(one);
  EXPECT_TRUE(table.get(1, kPopulationScope, "rec_local_mean").has_value());
  EXPECT_TRUE(table.get(1, kPopulationScope, "prof_us_p").has_value());
  EXPECT_TRUE(table.get(1, kPopulationScope, "validation_ndcg").has_value());
  EXPECT_TRUE(table.get(1, kCountryScope, "prof_local_mean", "DE").has_value());
  EXPECT_TRUE(table.get(1, kCountryScope, "users", "OTHER").has_value());
  EXPECT_FALSE(table.get(1, kCountryScope, "validation_ndcg", "DE").has_value());
  EXPECT_EQ(*table.get(1, kPopulationScope, "users"), static_cast<double>(ds.num_users()));
  EXPECT_EQ(table.countries(), (std::vector<std::string>{"DE", "OTHER", "US"}));
}

TEST(MetricsCsv, RoundTrip) {
  const auto ds = small_synthetic();
  const auto records = run_simulation(ds, pop_config(3));
  const auto text = to_csv(records, ds);
  std::istringstream in(text);
  const auto table = read_metrics_csv(in);
  EXPECT_EQ(table.last_iteration(), 3U);
  EXPECT_EQ(table.model(), "pop");
  std::ostringstream again;
  again << kMetricsHeader << '\n';
  for (const auto& row : table.rows()) again << format_row(row) << '\n';
  EXPECT_EQ(again.str(), text);
}

TEST(MetricsCsv, WriterMatchesInMemoryRows) {
  const auto ds = small_synthetic();
  const auto records = run_simulation(ds, pop_config(2));
  const auto dir = testing::temp_dir("csv_writer");
  {
    MetricsCsvWriter writer(dir / "m.csv");
    writer.write(iteration_rows(records[0], records[0], ds.users(), "pop"));
  }
  {
    MetricsCsvWriter writer(dir / "m.csv", /*append=*/true);
    for (std::size_t i = 1; i < records.size(); ++i) {
      writer.write(iteration_rows(records[i], records[0], ds.users(), "pop"));
    }
  }
  EXPECT_EQ(read_file(dir / "m.csv"), to_csv(records, ds));
}

TEST(MetricsCsv, TruncationNamesTheLastCompleteIteration) {
  const auto ds = small_synthetic();
  const auto text = to_csv(run_simulation(ds, pop_config(3)), ds);
  // Cut five rows into iteration 2's group, once at a line end and once
  // inside a line.
  auto pos = text.find("\n2,") + 1;
  for (int i = 0; i < 5; ++i) pos = text.find('\n', pos) + 1;
  for (const auto& partial : {text.substr(0, pos), text.substr(0, pos + 7)}) {
    std::istringstream in(partial);
    try {
      read_metrics_csv(in);
      FAIL() << "expected DataError";
    } catch (const DataError& e) {
      EXPECT_NE(std::string(e.what()).find("last complete iteration is 1"), std::string::npos) << e.what();
    }
  }

  std::istringstream header_only(std::string(kMetricsHeader) + "\n0,population,pop,users,,60\n");
  try {
    read_metrics_csv(header_only);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("no iteration is complete"), std::string::npos) << e.what();
  }
}

TEST(MetricsCsv, MalformedInput) {
  std::istringstream bad_header("a,b,c\n");
  EXPECT_THROW(read_metrics_csv(bad_header), ParseError);
  std::istringstream empty("");
  EXPECT_THROW(read_metrics_csv(empty), DataError);
  std::istringstream gap(std::string(kMetricsHeader) + "\n1,population,pop,iteration_complete,,1\n");
  EXPECT_THROW(read_metrics_csv(gap), DataError);
  std::istringstream bad_scope(std::string(kMetricsHeader) +
                               "\n0,galaxy,pop,users,,1\n0,population,pop,iteration_complete,,1\n");
  EXPECT_THROW(read_metrics_csv(bad_scope), ParseError);
  EXPECT_THROW(read_metrics_csv(std::filesystem::path("/nonexistent/metrics.csv")), DataError);
}

TEST(MetricsCsv, TruncateCopiesCompleteGroups) {
  const auto ds = small_synthetic();
  const auto records = run_simulation(ds, pop_config(3));
  const auto dir = testing::temp_dir("csv_truncate");
  {
    std::ofstream(dir / "full.csv", std::ios::binary) << to_csv(records, ds);
  }
  truncate_metrics_csv(dir / "full.csv", dir / "two.csv", 2);
  const std::vector<IterationRecord> first(records.begin(), records.begin() + 3);
  EXPECT_EQ(read_file(dir / "two.csv"), to_csv(first, ds));
  EXPECT_THROW(truncate_metrics_csv(dir / "full.csv", dir / "x.csv", 9), DataError);
}

// ---- report -----------------------------------------------------------------

struct CountrySize {
  const char* code;
  std::uint32_t users;
  std::uint32_t tracks;
};

// Per-country user and track counts of the full-scale music dataset.
constexpr CountrySize kFullScale[] = {
    {"US", 1582, 39614}, {"GB", 823, 15522}, {"DE", 805, 6793}, {"SE", 320, 4519}, {"CA", 217, 3754},
    {"FR", 254, 2800},   {"AU", 193, 2346},  {"FI", 420, 2260}, {"NO", 208, 1765}, {"BR", 1064, 2236},
    {"NL", 375, 1738},   {"PL", 1040, 1709}, {"RU", 1162, 1888}, {"JP", 101, 1796}, {"IT", 222, 1506},
    {"OTHER", 2990, 9651},
};

InteractionDataset shaped(const std::vector<CountrySize>& sizes) {
  DatasetBuilder b;
  for (const auto& c : sizes) {
    const auto label = testing::label(c.code);
    const std::string prefix = c.code;
    for (std::uint32_t t = 0; t < std::max(c.tracks, c.users); ++t) {
      b.add(prefix + "-u" + std::to_string(t % c.users), label, prefix + "-t" + std::to_string(t % c.tracks), label);
    }
  }
  return b.build();
}

TEST(Report, CountryThresholdsOnFullScaleShape) {
  const std::vector<CountrySize> sizes(std::begin(kFullScale), std::end(kFullScale));
  const auto ds = shaped(sizes);
  EXPECT_EQ(ds.num_tracks(), 99897U);
  EXPECT_EQ(ds.num_users(), 11776U);
  const auto countries = qualifying_countries(ds, ReportOptions{});
  EXPECT_EQ(countries, (std::vector<std::string>{"AU", "BR", "CA", "DE", "FI", "FR", "GB", "IT", "JP", "NL", "NO",
                                                 "PL", "RU", "SE", "US"}));
}

TEST(Report, CountriesJustBelowAThresholdAreExcluded) {
  const auto ds = shaped({{"US", 100, 1000}, {"JP", 99, 1796}, {"IT", 222, 999}, {"OTHER", 500, 5000}});
  EXPECT_EQ(qualifying_countries(ds, ReportOptions{}), (std::vector<std::string>{"US"}));
  ReportOptions loose;
  loose.min_country_users = 99;
  loose.min_country_tracks = 999;
  EXPECT_EQ(qualifying_countries(ds, loose), (std::vector<std::string>{"IT", "JP", "US"}));
}

const std::vector<std::string>* find_row(const CsvTable& table, const std::string& indicator) {
  for (const auto& row : table.rows) {
    if (row[1] == indicator) return &row;
  }
  return nullptr;
}

TEST(Report, StarsFollowTheSignificanceThreshold) {
  const auto ds = small_synthetic();
  const auto cfg = pop_config(5);
  const auto records = run_simulation(ds, cfg);
  ReportOptions options;
  options.min_country_users = 1;
  options.min_country_tracks = 1;
  const auto report = final_report(records, ds, cfg, options);
  ASSERT_EQ(report.population.header[7], "star");
  for (const auto& row : report.population.rows) {
    if (row[6].empty()) {
      EXPECT_EQ(row[7], "");
      continue;
    }
    const double p = std::stod(row[6]);
    EXPECT_EQ(row[7] == "*", p < kBonferroniThreshold) << row[1] << " p=" << row[6];
  }
  for (const auto& row : report.country_deltas.rows) {
    if (row[7].empty()) continue;
    EXPECT_EQ(row[8] == "*", std::stod(row[7]) < kBonferroniThreshold) << row[0] << " " << row[2];
  }
  EXPECT_EQ(report.qualifying_countries, (std::vector<std::string>{"DE", "US"}));
}

TEST(Report, DeltasAreRelativeToTheBaselineProfileMean) {
  const auto ds = small_synthetic();
  auto cfg = pop_config(3);
  const auto records = run_simulation(ds, cfg);
  const auto report = final_report(records, ds, cfg);
  const auto* rec_local = find_row(report.population, "Rec_local");
  ASSERT_NE(rec_local, nullptr);
  const double base = std::stod((*rec_local)[2]);
  const double value = std::stod((*rec_local)[3]);
  EXPECT_NEAR(std::stod((*rec_local)[4]), 100.0 * (value - base) / base, 1e-9);
  EXPECT_EQ(base, summarize(records[0], ds.users()).prof_local);
  EXPECT_EQ((*rec_local)[8], "relative");

  cfg.delta_mode = DeltaMode::kAbsolute;
  const auto absolute = final_report(records, ds, cfg);
  const auto* row = find_row(absolute.population, "Rec_local");
  EXPECT_NEAR(std::stod((*row)[4]), 100.0 * (value - base), 1e-9);
}

TEST(Report, NoQualifyingCountryLeavesANote) {
  const auto ds = small_synthetic();
  const auto cfg = pop_config(1);
  const auto report = final_report(run_simulation(ds, cfg), ds, cfg);
  EXPECT_TRUE(report.qualifying_countries.empty());
  ASSERT_FALSE(report.country_deltas.rows.empty());
  EXPECT_NE(report.country_deltas.rows.front().back().find("no country has at least 100 users"), std::string::npos);
  EXPECT_EQ(report.country_jsd.rows.back()[0], "all");
}

TEST(Report, HeadlinePopularityJsdFollowsBinning) {
  const auto ds = small_synthetic();
  auto cfg = pop_config(2);
  const auto records = run_simulation(ds, cfg);
  const auto current = final_report(records, ds, cfg);
  cfg.binning = BinningMode::kFrozen;
  const auto frozen = final_report(records, ds, cfg);
  const auto* a = find_row(current.population, "JSD_Prof_pop");
  const auto* b = find_row(frozen.population, "JSD_Prof_pop");
  EXPECT_EQ((*a)[3], (*find_row(current.population, "JSD_Prof_pop_current"))[3]);
  EXPECT_EQ((*b)[3], (*find_row(frozen.population, "JSD_Prof_pop_frozen"))[3]);
}

TEST(Report, WritesAllTables) {
  const auto ds = small_synthetic();
  const auto cfg = pop_config(1);
  const auto report = final_report(run_simulation(ds, cfg), ds, cfg);
  const auto dir = testing::temp_dir("report_tables");
  write_report(report, dir);
  for (const char* name : {"population_deltas.csv", "country_jsd.csv", "country_deltas.csv",
                           "trajectory_proportions.csv", "trajectory_miscalibration.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
  }
  EXPECT_EQ(read_file(dir / "population_deltas.csv").substr(0, 22), "model,indicator,baseli");
}

TEST(CsvWriter, QuotesSpecialCells) {
  std::ostringstream out;
  write_csv(CsvTable{{"a", "b"}, {{"x,y", "say \"hi\""}}}, out);
  EXPECT_EQ(out.str(), "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
}

}  // namespace
}  // namespace loopsim
