#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "loopsim/dataset.hpp"
#include "loopsim/filter.hpp"

namespace loopsim {

/// Header row of the tab-separated interactions file.
inline constexpr std::string_view kInteractionsHeader =
    "user_id\ttrack_id\tuser_country\ttrack_country\tcount";

struct IngestOptions {
  /// Rows with an empty user or track country are dropped; otherwise the
  /// empty column maps to the OTHER sentinel.
  bool drop_unknown_country = false;
  FilterOptions filters;
};

/// Reads an interactions file. Throws ParseError (with 1-based line number)
/// for malformed rows, DataError if the file cannot be opened, and
/// EmptyDatasetError when nothing survives filtering.
InteractionDataset ingest(const std::filesystem::path& path, const IngestOptions& options = {});
InteractionDataset ingest(std::istream& in, const IngestOptions& options = {});

/// Writes `ds` in interaction order. OTHER is written as the literal
/// "OTHER" so that re-ingesting with drop_unknown_country keeps the row.
void write_interactions(const InteractionDataset& ds, std::ostream& out);
void write_interactions(const InteractionDataset& ds, const std::filesystem::path& path);

/// Content fingerprint: FNV-1a over the canonical serialization.
std::uint64_t dataset_fingerprint(const InteractionDataset& ds);
std::string fingerprint_hex(std::uint64_t fingerprint);

}  // namespace loopsim
