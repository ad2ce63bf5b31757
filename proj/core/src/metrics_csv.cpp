#include "loopsim/metrics_csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <set>

#include "loopsim/errors.hpp"

namespace loopsim {

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw ContractError("cannot format value");
  return std::string(buf, ptr);
}

std::string format_row(const MetricRow& row) {
  std::string s = std::to_string(row.iteration);
  s += ',';
  s += row.scope;
  s += ',';
  s += row.model;
  s += ',';
  s += row.metric;
  s += ',';
  s += row.country;
  s += ',';
  s += format_value(row.value);
  return s;
}

namespace {

struct RowSink {
  std::vector<MetricRow>& rows;
  std::uint32_t iteration;
  std::string_view scope;
  std::string_view model;
  std::string country;

  void operator()(std::string_view metric, double value) const {
    rows.push_back(MetricRow{iteration, std::string(scope), std::string(model), std::string(metric), country, value});
  }
};

void emit_tests(const RowSink& sink, const IterationRecord& record, const IterationRecord& baseline,
                std::span<const UserIndex> selection, TestKind kind) {
  auto emit = [&](std::string_view prefix, const std::vector<double>& before, const std::vector<double>& after) {
    if (before.size() < 2) return;
    const auto r = t_test(kind, before, after);
    sink(std::string(prefix) + "_t", r.t);
    sink(std::string(prefix) + "_p", r.p);
  };

  std::vector<double> base_local, base_us, prof_local, prof_us;
  std::vector<double> rec_base_local, rec_base_us, rec_local, rec_us;
  for (auto u : selection) {
    const auto& b = baseline.users.at(u);
    const auto& r = record.users.at(u);
    base_local.push_back(b.prof_local);
    base_us.push_back(b.prof_us);
    prof_local.push_back(r.prof_local);
    prof_us.push_back(r.prof_us);
    if (r.rec_local) {
      rec_base_local.push_back(b.prof_local);
      rec_base_us.push_back(b.prof_us);
      rec_local.push_back(*r.rec_local);
      rec_us.push_back(r.rec_us.value_or(0.0));
    }
  }
  emit("rec_local", rec_base_local, rec_local);
  emit("rec_us", rec_base_us, rec_us);
  emit("prof_local", base_local, prof_local);
  emit("prof_us", base_us, prof_us);
}

void emit_scope(const RowSink& sink, const IterationRecord& record, const IterationRecord& baseline,
                std::span<const UserIndex> selection, TestKind kind) {
  const auto s = summarize(record, selection);
  sink("users", static_cast<double>(s.users));
  sink("accepted", static_cast<double>(s.accepted));
  sink("skipped_users", record.is_baseline() ? 0.0 : static_cast<double>(s.users - s.accepted));
  sink("prof_local_mean", s.prof_local);
  sink("prof_us_mean", s.prof_us);
  sink("profile_country_jsd", s.profile_country_jsd);
  sink("profile_pop_jsd", s.profile_pop_jsd);
  sink("profile_pop_jsd_frozen", s.profile_pop_jsd_frozen);
  if (s.rec_local) {
    sink("rec_local_mean", *s.rec_local);
    sink("rec_us_mean", *s.rec_us);
    sink("rec_country_jsd", *s.rec_country_jsd);
    sink("rec_pop_jsd", *s.rec_pop_jsd);
  }
  if (!record.is_baseline()) emit_tests(sink, record, baseline, selection, kind);
}

}  // namespace

std::vector<MetricRow> iteration_rows(const IterationRecord& record, const IterationRecord& baseline,
                                      std::span<const UserMeta> users, std::string_view model,
                                      TestKind test) {
  if (record.users.size() != users.size() || baseline.users.size() != users.size()) {
    throw ContractError("record, baseline and user table disagree on the number of users");
  }
  std::vector<MetricRow> rows;
  std::vector<UserIndex> all(users.size());
  for (std::size_t u = 0; u < users.size(); ++u) all[u] = static_cast<UserIndex>(u);

  const RowSink population{rows, record.iteration, kPopulationScope, model, {}};
  emit_scope(population, record, baseline, all, test);
  if (record.validation_ndcg) population("validation_ndcg", *record.validation_ndcg);

  std::set<CountryLabel> countries;
  for (const auto& u : users) countries.insert(u.country);
  for (const auto& c : countries) {
    std::vector<UserIndex> selection;
    for (std::size_t u = 0; u < users.size(); ++u) {
      if (users[u].country == c) selection.push_back(static_cast<UserIndex>(u));
    }
    const RowSink sink{rows, record.iteration, kCountryScope, model, std::string(c.code())};
    emit_scope(sink, record, baseline, selection, test);
  }
  population(kIterationCompleteMetric, 1.0);
  return rows;
}

MetricsCsvWriter::MetricsCsvWriter(const std::filesystem::path& path, bool append) : path_(path) {
  const bool existing = append && std::filesystem::exists(path) && std::filesystem::file_size(path) > 0;
  out_.open(path, std::ios::binary | (existing ? std::ios::app : std::ios::trunc));
  if (!out_) throw DataError("cannot open metrics file '" + path.string() + "'");
  if (!existing) {
    out_ << kMetricsHeader << '\n';
    out_.flush();
  }
}

void MetricsCsvWriter::write(std::span<const MetricRow> rows) {
  std::string buffer;
  for (const auto& row : rows) {
    buffer += format_row(row);
    buffer += '\n';
  }
  out_.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  out_.flush();
  if (!out_) throw DataError("failed writing metrics file '" + path_.string() + "'");
}

MetricTable::MetricTable(std::vector<MetricRow> rows) : rows_(std::move(rows)) {
  if (!rows_.empty()) {
    model_ = rows_.front().model;
    last_iteration_ = rows_.back().iteration;
  }
}

std::optional<double> MetricTable::get(std::uint32_t iteration, std::string_view scope, std::string_view metric,
                                       std::string_view country) const {
  // Groups are contiguous and ordered, so narrow to the iteration first.
  auto first = std::lower_bound(rows_.begin(), rows_.end(), iteration,
                                [](const MetricRow& r, std::uint32_t it) { return r.iteration < it; });
  for (auto it = first; it != rows_.end() && it->iteration == iteration; ++it) {
    if (it->scope == scope && it->metric == metric && it->country == country) return it->value;
  }
  return std::nullopt;
}

std::vector<std::string> MetricTable::countries() const {
  std::set<std::string> out;
  for (const auto& r : rows_) {
    if (r.scope == kCountryScope) out.insert(r.country);
  }
  return {out.begin(), out.end()};
}

namespace {

MetricRow parse_row(const std::string& line, std::size_t line_no) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.emplace_back(line.data() + start, (comma == std::string::npos ? line.size() : comma) - start);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (fields.size() != 6) throw ParseError(line_no, "expected 6 comma-separated fields");

  MetricRow row;
  auto [p1, e1] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), row.iteration);
  if (e1 != std::errc{} || p1 != fields[0].data() + fields[0].size()) {
    throw ParseError(line_no, "invalid iteration '" + std::string(fields[0]) + "'");
  }
  row.scope = fields[1];
  if (row.scope != kPopulationScope && row.scope != kCountryScope) {
    throw ParseError(line_no, "unknown scope '" + row.scope + "'");
  }
  row.model = fields[2];
  row.metric = fields[3];
  row.country = fields[4];
  const auto v = fields[5];
  if (v == "nan") {
    row.value = std::numeric_limits<double>::quiet_NaN();
  } else if (v == "inf" || v == "-inf") {
    row.value = v == "inf" ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  } else {
    auto [p2, e2] = std::from_chars(v.data(), v.data() + v.size(), row.value);
    if (e2 != std::errc{} || p2 != v.data() + v.size()) {
      throw ParseError(line_no, "invalid value '" + std::string(v) + "'");
    }
  }
  return row;
}

std::string last_good(std::optional<std::uint32_t> iteration) {
  return iteration ? "last complete iteration is " + std::to_string(*iteration) : "no iteration is complete";
}

}  // namespace

MetricTable read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("metrics CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMetricsHeader) throw ParseError(1, "expected header '" + std::string(kMetricsHeader) + "'");

  std::vector<MetricRow> rows;
  std::size_t complete_rows = 0;
  std::optional<std::uint32_t> last_complete;
  std::optional<std::uint32_t> open_group;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    MetricRow row;
    try {
      row = parse_row(line, line_no);
    } catch (const ParseError&) {
      // A torn final line is truncation; anything else is corruption.
      if (in.peek() == std::char_traits<char>::eof()) {
        throw DataError("metrics CSV is truncated (" + last_good(last_complete) + ")");
      }
      throw;
    }
    const std::uint32_t expected = last_complete ? *last_complete + 1 : 0;
    if (open_group && row.iteration != *open_group) {
      throw DataError("metrics CSV: iteration " + std::to_string(*open_group) +
                      " is incomplete at line " + std::to_string(line_no) + " (" + last_good(last_complete) + ")");
    }
    if (!open_group && row.iteration != expected) {
      throw DataError("metrics CSV: expected iteration " + std::to_string(expected) + " at line " +
                      std::to_string(line_no) + ", found " + std::to_string(row.iteration));
    }
    open_group = row.iteration;
    const bool marker = row.metric == kIterationCompleteMetric;
    rows.push_back(std::move(row));
    if (marker) {
      last_complete = open_group;
      open_group.reset();
      complete_rows = rows.size();
    }
  }
  if (open_group || !last_complete) {
    throw DataError("metrics CSV is truncated (" + last_good(last_complete) + ")");
  }
  rows.resize(complete_rows);
  return MetricTable(std::move(rows));
}

MetricTable read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open metrics CSV '" + path.string() + "'");
  try {
    return read_metrics_csv(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void truncate_metrics_csv(const std::filesystem::path& from, const std::filesystem::path& to,
                          std::uint32_t iteration) {
  const auto table = read_metrics_csv(from);
  if (table.last_iteration() < iteration) {
    throw DataError("metrics CSV '" + from.string() + "' ends at iteration " +
                    std::to_string(table.last_iteration()) + ", before " + std::to_string(iteration));
  }
  std::ofstream out(to, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write metrics CSV '" + to.string() + "'");
  out << kMetricsHeader << '\n';
  for (const auto& row : table.rows()) {
    if (row.iteration > iteration) break;
    out << format_row(row) << '\n';
  }
  if (!out) throw DataError("failed writing metrics CSV '" + to.string() + "'");
}

}  // namespace loopsim
