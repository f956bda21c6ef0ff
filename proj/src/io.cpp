#include "crwvar/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "crwvar/errors.hpp"

namespace crwvar::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                          : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Header-indexed CSV reader that reports 1-based line numbers.
class CsvReader {
 public:
  explicit CsvReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw DataError(path.string() + ": cannot open file");
    std::string header;
    if (!next_line(header)) throw DataError(path.string() + ": empty file, header row expected");
    const auto cols = split(header);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      std::string name(cols[i]);
      for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      columns_[name] = i;
    }
  }

  std::optional<std::size_t> column(const std::string& name) const {
    const auto it = columns_.find(name);
    return it == columns_.end() ? std::nullopt : std::optional(it->second);
  }

  std::size_t require(const std::string& name) const {
    const auto c = column(name);
    if (!c) throw DataError(path_.string() + ":1: missing column '" + name + "'");
    return *c;
  }

  /// Next nonblank row; false at end of file.
  bool next(std::vector<std::string_view>& fields) {
    while (next_line(line_)) {
      if (trim(line_).empty()) continue;
      fields = split(line_);
      return true;
    }
    return false;
  }

  std::size_t line_number() const noexcept { return line_no_; }

  [[noreturn]] void fail(const std::string& message) const {
    throw DataError(path_.string() + ":" + std::to_string(line_no_) + ": " + message);
  }

 private:
  bool next_line(std::string& out) {
    if (!std::getline(in_, out)) return false;
    ++line_no_;
    return true;
  }

  std::filesystem::path path_;
  std::ifstream in_;
  std::map<std::string, std::size_t> columns_;
  std::string line_;
  std::size_t line_no_ = 0;
};

std::string_view field(const std::vector<std::string_view>& fields, std::size_t i) {
  return i < fields.size() ? fields[i] : std::string_view{};
}

}  // namespace

bool is_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  int y = 0;
  int m = 0;
  int d = 0;
  auto num = [&](std::size_t pos, std::size_t len, int& out) {
    const auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return ec == std::errc{} && ptr == s.data() + pos + len;
  };
  if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return false;
  if (m < 1 || m > 12 || d < 1) return false;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  const int days = kDays[m - 1] + (m == 2 && leap ? 1 : 0);
  return d <= days;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::optional<double> DailySeries::mean_volume() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : volumes) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::vector<DailySeries> read_daily_csv(const std::filesystem::path& path,
                                        const IngestOptions& options, IngestStats* stats) {
  CsvReader reader(path);
  const std::size_t c_date = reader.require("date");
  const std::size_t c_close = reader.require("close");
  const auto c_volume = reader.column("volume");
  const auto c_symbol = reader.column("symbol");

  std::vector<DailySeries> out;
  std::map<std::string, std::size_t, std::less<>> by_symbol;
  IngestStats local;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    ++local.rows_read;
    auto reject = [&](const std::string& message) {
      if (!options.permissive) reader.fail(message);
      ++local.rows_skipped;
    };
    const std::string symbol = c_symbol ? std::string(field(fields, *c_symbol)) : path.stem().string();
    if (symbol.empty()) {
      reject("empty symbol");
      continue;
    }
    const auto date = field(fields, c_date);
    if (!is_iso_date(date)) {
      reject("bad date '" + std::string(date) + "'");
      continue;
    }
    const auto close = parse_double(field(fields, c_close));
    if (!close || !(*close > 0.0)) {
      reject("nonpositive or unparsable close '" + std::string(field(fields, c_close)) + "'");
      continue;
    }
    std::optional<double> volume;
    if (c_volume && !field(fields, *c_volume).empty()) {
      volume = parse_double(field(fields, *c_volume));
      if (!volume || *volume < 0.0) {
        reject("bad volume '" + std::string(field(fields, *c_volume)) + "'");
        continue;
      }
    }
    auto [it, inserted] = by_symbol.try_emplace(symbol, out.size());
    if (inserted) out.push_back(DailySeries{symbol, {}, {}, {}});
    auto& series = out[it->second];
    if (!series.dates.empty() && !(date > std::string_view(series.dates.back()))) {
      reject("date " + std::string(date) + " not after " + series.dates.back() + " for " + symbol);
      continue;
    }
    series.dates.emplace_back(date);
    series.closes.push_back(*close);
    series.volumes.push_back(volume);
  }
  if (stats) *stats = local;
  return out;
}

std::string daily_csv(const std::vector<DailySeries>& series) {
  bool any_volume = false;
  for (const auto& s : series) {
    for (const auto& v : s.volumes) any_volume = any_volume || v.has_value();
  }
  std::ostringstream os;
  os << "symbol,date,close" << (any_volume ? ",volume" : "") << '\n';
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.closes.size(); ++i) {
      os << s.symbol << ',' << s.dates[i] << ',' << format_double(s.closes[i]);
      if (any_volume) {
        os << ',';
        if (i < s.volumes.size() && s.volumes[i]) os << format_double(*s.volumes[i]);
      }
      os << '\n';
    }
  }
  return os.str();
}

TickSeries read_tick_csv(const std::filesystem::path& path, const IngestOptions& options,
                         IngestStats* stats) {
  CsvReader reader(path);
  const std::size_t c_time = reader.require("timestamp");
  const std::size_t c_price = reader.require("price");
  std::vector<TickEvent> rows;
  IngestStats local;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    ++local.rows_read;
    auto reject = [&](const std::string& message) {
      if (!options.permissive) reader.fail(message);
      ++local.rows_skipped;
    };
    const auto t = parse_double(field(fields, c_time));
    if (!t || *t < 0.0) {
      reject("bad timestamp '" + std::string(field(fields, c_time)) + "'");
      continue;
    }
    const auto price = parse_double(field(fields, c_price));
    if (!price || !(*price > 0.0)) {
      reject("nonpositive or unparsable price '" + std::string(field(fields, c_price)) + "'");
      continue;
    }
    if (!rows.empty() && *t < rows.back().time) {
      reject("timestamp " + format_double(*t) + " precedes " + format_double(rows.back().time));
      continue;
    }
    rows.push_back({*t, *price});
  }
  if (stats) *stats = local;
  return TickSeries::collapse(rows);
}

std::string tick_csv(const TickSeries& ticks) {
  std::ostringstream os;
  os << "timestamp,price\n";
  for (const auto& e : ticks.events()) os << format_double(e.time) << ',' << format_double(e.price) << '\n';
  return os.str();
}

std::vector<ManifestEntry> read_manifest_csv(const std::filesystem::path& path) {
  CsvReader reader(path);
  const std::size_t c_symbol = reader.require("symbol");
  const std::size_t c_cap = reader.require("market_cap");
  const auto c_volume = reader.column("volume");
  const auto c_group = reader.column("group");
  std::vector<ManifestEntry> out;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    ManifestEntry e;
    e.symbol = std::string(field(fields, c_symbol));
    if (e.symbol.empty()) reader.fail("empty symbol");
    const auto cap = parse_double(field(fields, c_cap));
    if (!cap || *cap < 0.0) reader.fail("bad market_cap");
    e.market_cap = *cap;
    if (c_volume && !field(fields, *c_volume).empty()) {
      e.volume = parse_double(field(fields, *c_volume));
      if (!e.volume || *e.volume < 0.0) reader.fail("bad volume");
    }
    if (c_group) e.listing_group = std::string(field(fields, *c_group));
    out.push_back(std::move(e));
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError(path.string() + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError(path.string() + ": rename failed: " + ec.message());
  }
}

}  // namespace crwvar::io
