#include "loopsim/ingest.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "loopsim/errors.hpp"
#include "loopsim/rng.hpp"

namespace loopsim {

namespace {

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::optional<CountryLabel> parse_country_column(std::string_view field, std::size_t line_no,
                                                 const char* column) {
  if (field.empty()) return std::nullopt;
  auto label = CountryLabel::parse(field);
  if (!label) {
    throw ParseError(line_no, std::string("invalid ") + column + " '" + std::string(field) + "'");
  }
  return label;
}

}  // namespace

InteractionDataset ingest(std::istream& in, const IngestOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing header row");
  ++line_no;
  if (strip_cr(line) != kInteractionsHeader) {
    throw ParseError(1, "unexpected header; expected '" + std::string(kInteractionsHeader) + "'");
  }

  DatasetBuilder builder;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = strip_cr(line);
    if (row.empty()) continue;

    std::array<std::string_view, 5> fields;
    std::size_t n = 0;
    std::size_t start = 0;
    while (true) {
      const auto tab = row.find('\t', start);
      if (n == fields.size()) throw ParseError(line_no, "too many columns");
      fields[n++] = row.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start);
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (n != fields.size()) {
      throw ParseError(line_no, "expected 5 tab-separated columns, found " + std::to_string(n));
    }
    if (fields[0].empty()) throw ParseError(line_no, "empty user_id");
    if (fields[1].empty()) throw ParseError(line_no, "empty track_id");

    const auto user_country = parse_country_column(fields[2], line_no, "user_country");
    const auto track_country = parse_country_column(fields[3], line_no, "track_country");

    std::uint32_t count = 0;
    const auto* first = fields[4].data();
    const auto* last = first + fields[4].size();
    auto [ptr, ec] = std::from_chars(first, last, count);
    if (ec != std::errc{} || ptr != last || count == 0) {
      throw ParseError(line_no, "count must be an integer >= 1, got '" + std::string(fields[4]) + "'");
    }

    if (options.drop_unknown_country && (!user_country || !track_country)) continue;
    try {
      builder.add(fields[0], user_country.value_or(CountryLabel::other()), fields[1],
                  track_country.value_or(CountryLabel::other()), count);
    } catch (const ParseError&) {
      throw;
    } catch (const DataError& e) {
      throw ParseError(line_no, e.what());
    }
  }

  if (builder.size() == 0) throw EmptyDatasetError();
  auto ds = builder.build();
  if (options.filters.min_track_interactions > 1 || options.filters.k_core > 0) {
    ds = apply_filters(ds, options.filters);
  }
  return ds;
}

InteractionDataset ingest(const std::filesystem::path& path, const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open interactions file '" + path.string() + "'");
  return ingest(in, options);
}

void write_interactions(const InteractionDataset& ds, std::ostream& out) {
  std::string buffer;
  buffer.reserve(64 * ds.num_interactions() + 64);
  buffer.append(kInteractionsHeader);
  buffer.push_back('\n');
  for (const auto& x : ds.interactions()) {
    const auto& user = ds.user(x.user);
    const auto& track = ds.track(x.track);
    buffer.append(user.id);
    buffer.push_back('\t');
    buffer.append(track.id);
    buffer.push_back('\t');
    buffer.append(user.country.code());
    buffer.push_back('\t');
    buffer.append(track.country.code());
    buffer.push_back('\t');
    buffer.append(std::to_string(x.count));
    buffer.push_back('\n');
  }
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
}

void write_interactions(const InteractionDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write interactions file '" + path.string() + "'");
  write_interactions(ds, out);
  if (!out.flush()) throw DataError("failed writing '" + path.string() + "'");
}

std::uint64_t dataset_fingerprint(const InteractionDataset& ds) {
  std::ostringstream out;
  write_interactions(ds, out);
  return fnv1a64(out.str());
}

std::string fingerprint_hex(std::uint64_t fingerprint) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(fingerprint));
  return std::string(buf.data(), 16);
}

}  // namespace loopsim
