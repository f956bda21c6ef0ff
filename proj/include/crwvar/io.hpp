#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crwvar/types.hpp"

namespace crwvar::io {

/// Daily closes for one symbol; dates are ISO-8601 and strictly increasing.
struct DailySeries {
  std::string symbol;
  std::vector<std::string> dates;
  std::vector<double> closes;
  std::vector<std::optional<double>> volumes;

  /// Mean of the reported volumes, if any row has one.
  std::optional<double> mean_volume() const;
};

/// One row of an optional universe manifest.
struct ManifestEntry {
  std::string symbol;
  std::optional<double> volume;
  double market_cap = 0.0;
  std::string listing_group;
};

struct IngestOptions {
  /// Skip malformed rows (and count them) instead of failing.
  bool permissive = false;
};

struct IngestStats {
  std::size_t rows_read = 0;
  std::size_t rows_skipped = 0;
};

/// True for a valid proleptic Gregorian YYYY-MM-DD date.
bool is_iso_date(std::string_view text);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/**
 * Reads a daily CSV with a header naming `date` and `close` (optionally `volume`
 * and `symbol`). Without a symbol column the file stem names the single asset.
 * Malformed rows raise DataError("<file>:<line>: ...") unless permissive.
 */
std::vector<DailySeries> read_daily_csv(const std::filesystem::path& path,
                                        const IngestOptions& options = {},
                                        IngestStats* stats = nullptr);

/// Long-format writer: symbol,date,close[,volume].
std::string daily_csv(const std::vector<DailySeries>& series);

/**
 * Reads a tick CSV with header `timestamp,price`. Timestamps must be
 * nondecreasing; repeated prices and same-timestamp rows are collapsed.
 */
TickSeries read_tick_csv(const std::filesystem::path& path, const IngestOptions& options = {},
                         IngestStats* stats = nullptr);

std::string tick_csv(const TickSeries& ticks);

/// Manifest CSV with header symbol,market_cap[,volume][,group].
std::vector<ManifestEntry> read_manifest_csv(const std::filesystem::path& path);

/// Writes to a temporary sibling, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace crwvar::io
