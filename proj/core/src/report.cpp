#include "loopsim/report.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include "loopsim/errors.hpp"

namespace loopsim {

void write_csv(const CsvTable& table, std::ostream& out) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      const auto& c = cells[i];
      if (c.find_first_of(",\"\n") != std::string::npos) {
        out << '"';
        for (char ch : c) {
          if (ch == '"') out << '"';
          out << ch;
        }
        out << '"';
      } else {
        out << c;
      }
    }
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(table, out);
  if (!out.flush()) throw DataError("failed writing '" + path.string() + "'");
}

namespace {

struct CountryCounts {
  std::size_t users = 0;
  std::size_t tracks = 0;
};

std::map<std::string, CountryCounts> country_counts(const InteractionDataset& ds) {
  std::map<std::string, CountryCounts> counts;
  for (const auto& u : ds.users()) ++counts[std::string(u.country.code())].users;
  for (const auto& t : ds.tracks()) ++counts[std::string(t.country.code())].tracks;
  return counts;
}

std::string cell(std::optional<double> v) { return v ? format_value(*v) : std::string(); }

std::string mode_name(DeltaMode mode) { return mode == DeltaMode::kRelative ? "relative" : "absolute"; }

struct Indicator {
  const char* name;
  const char* current;   // metric at the last iteration
  const char* baseline;  // metric at iteration 0
  const char* test;      // prefix of the _t / _p rows
};

constexpr Indicator kDeltaIndicators[] = {
    {"Rec_local", "rec_local_mean", "prof_local_mean", "rec_local"},
    {"Rec_US", "rec_us_mean", "prof_us_mean", "rec_us"},
    {"Prof_local", "prof_local_mean", "prof_local_mean", "prof_local"},
    {"Prof_US", "prof_us_mean", "prof_us_mean", "prof_us"},
};

constexpr std::pair<const char*, const char*> kJsdIndicators[] = {
    {"JSD_Prof_country", "profile_country_jsd"},
    {"JSD_Prof_pop_current", "profile_pop_jsd"},
    {"JSD_Prof_pop_frozen", "profile_pop_jsd_frozen"},
    {"JSD_Rec_country", "rec_country_jsd"},
    {"JSD_Rec_pop", "rec_pop_jsd"},
};

// baseline, value, delta, t, p, star, delta_mode, note
std::vector<std::string> delta_cells(const MetricTable& run, const Indicator& ind, std::string_view scope,
                                     std::string_view country, const ReportOptions& options) {
  const auto last = run.last_iteration();
  const auto base = run.get(0, scope, ind.baseline, country);
  const auto value = run.get(last, scope, ind.current, country);
  const auto t = run.get(last, scope, std::string(ind.test) + "_t", country);
  const auto p = run.get(last, scope, std::string(ind.test) + "_p", country);
  std::string delta;
  std::string note;
  if (last == 0) {
    note = "no simulated iteration";
  } else if (!base || !value) {
    note = "not recorded";
  } else {
    try {
      delta = format_value(delta_percent(*value, *base, options.delta_mode));
    } catch (const UndefinedMetricError&) {
      note = "delta undefined for a zero baseline";
    }
  }
  const bool star = p && *p < options.significance;
  return {cell(base), cell(value), delta, cell(t), cell(p), star ? "*" : "", mode_name(options.delta_mode), note};
}

CsvTable trajectory(std::span<const MetricTable> runs, std::initializer_list<const char*> metrics) {
  CsvTable table{{"iteration", "model", "metric", "value"}, {}};
  for (const auto& run : runs) {
    for (const auto* metric : metrics) {
      for (std::uint32_t it = 0; it <= run.last_iteration(); ++it) {
        if (auto v = run.get(it, kPopulationScope, metric)) {
          table.rows.push_back({std::to_string(it), run.model(), metric, format_value(*v)});
        }
      }
    }
  }
  return table;
}

}  // namespace

std::vector<std::string> qualifying_countries(const InteractionDataset& initial, const ReportOptions& options) {
  std::vector<std::string> out;
  for (const auto& [code, counts] : country_counts(initial)) {
    if (code == CountryLabel::other().code()) continue;
    if (counts.users >= options.min_country_users && counts.tracks >= options.min_country_tracks) {
      out.push_back(code);
    }
  }
  return out;
}

Report build_report(std::span<const MetricTable> runs, const InteractionDataset& initial,
                    const ReportOptions& options) {
  if (runs.empty()) throw ContractError("report needs at least one metrics table");
  Report report;
  report.qualifying_countries = qualifying_countries(initial, options);
  const auto counts = country_counts(initial);

  report.population.header = {"model", "indicator", "baseline", "value", "delta", "t", "p", "star", "delta_mode", "note"};
  report.country_jsd.header = {"country", "model", "users", "tracks", "profile_country_jsd", "rec_country_jsd", "note"};
  report.country_deltas.header = {"country", "model", "indicator", "baseline", "value", "delta",
                                  "t",       "p",     "star",      "delta_mode", "note"};

  for (const auto& run : runs) {
    const auto last = run.last_iteration();
    for (const auto& ind : kDeltaIndicators) {
      auto row = delta_cells(run, ind, kPopulationScope, {}, options);
      row.insert(row.begin(), {run.model(), ind.name});
      report.population.rows.push_back(std::move(row));
    }
    const bool frozen = options.binning == BinningMode::kFrozen;
    const char* pop_metric = frozen ? "profile_pop_jsd_frozen" : "profile_pop_jsd";
    report.population.rows.push_back({run.model(), "JSD_Prof_pop", cell(run.get(0, kPopulationScope, pop_metric)),
                                      cell(run.get(last, kPopulationScope, pop_metric)), "", "", "", "", "",
                                      frozen ? "frozen initial popularity bins" : "current popularity bins"});
    for (const auto& [name, metric] : kJsdIndicators) {
      report.population.rows.push_back({run.model(), name, cell(run.get(0, kPopulationScope, metric)),
                                        cell(run.get(last, kPopulationScope, metric)), "", "", "", "", "", ""});
    }
    report.population.rows.push_back({run.model(), "nDCG", "", cell(run.get(1, kPopulationScope, "validation_ndcg")),
                                      "", "", "", "", "", "validation NDCG@10 of iteration 1"});
    report.population.rows.push_back({run.model(), "nDCG_last", "",
                                      cell(run.get(last, kPopulationScope, "validation_ndcg")), "", "", "", "",
                                      "", "validation NDCG@10 of the last iteration"});

    const std::string rule = "no country has at least " + std::to_string(options.min_country_users) +
                             " users and " + std::to_string(options.min_country_tracks) + " tracks";
    if (report.qualifying_countries.empty()) {
      report.country_jsd.rows.push_back({"", run.model(), "", "", "", "", rule});
      report.country_deltas.rows.push_back({"", run.model(), "", "", "", "", "", "", "", "", rule});
    }
    for (const auto& country : report.qualifying_countries) {
      const auto& c = counts.at(country);
      report.country_jsd.rows.push_back({country, run.model(), std::to_string(c.users), std::to_string(c.tracks),
                                         cell(run.get(last, kCountryScope, "profile_country_jsd", country)),
                                         cell(run.get(last, kCountryScope, "rec_country_jsd", country)), ""});
      for (const auto& ind : kDeltaIndicators) {
        auto row = delta_cells(run, ind, kCountryScope, country, options);
        row.insert(row.begin(), {country, run.model(), ind.name});
        report.country_deltas.rows.push_back(std::move(row));
      }
    }
    report.country_jsd.rows.push_back({"all", run.model(), std::to_string(initial.num_users()),
                                       std::to_string(initial.num_tracks()),
                                       cell(run.get(last, kPopulationScope, "profile_country_jsd")),
                                       cell(run.get(last, kPopulationScope, "rec_country_jsd")), ""});
  }

  report.proportions = trajectory(runs, {"rec_local_mean", "rec_us_mean", "prof_local_mean", "prof_us_mean"});
  report.miscalibration = trajectory(runs, {"profile_country_jsd", "profile_pop_jsd", "profile_pop_jsd_frozen",
                                            "rec_country_jsd", "rec_pop_jsd"});
  return report;
}

Report final_report(std::span<const IterationRecord> records, const InteractionDataset& initial,
                    const SimulationConfig& cfg, const ReportOptions& options) {
  if (records.empty() || !records.front().is_baseline()) {
    throw ContractError("final_report needs the baseline record first");
  }
  std::vector<MetricRow> rows;
  for (const auto& record : records) {
    auto group = iteration_rows(record, records.front(), initial.users(), cfg.model.name, cfg.test);
    rows.insert(rows.end(), std::make_move_iterator(group.begin()), std::make_move_iterator(group.end()));
  }
  const MetricTable table(std::move(rows));
  auto effective = options;
  effective.delta_mode = cfg.delta_mode;
  effective.binning = cfg.binning;
  return build_report(std::span<const MetricTable>(&table, 1), initial, effective);
}

void write_report(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_csv(report.population, dir / "population_deltas.csv");
  write_csv(report.country_jsd, dir / "country_jsd.csv");
  write_csv(report.country_deltas, dir / "country_deltas.csv");
  write_csv(report.proportions, dir / "trajectory_proportions.csv");
  write_csv(report.miscalibration, dir / "trajectory_miscalibration.csv");
}

}  // namespace loopsim
