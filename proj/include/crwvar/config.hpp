#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "crwvar/types.hpp"

namespace crwvar {

/// Inclusive grid start, start + step, ..., stop.
struct PGrid {
  double start = 0.05;
  double stop = 0.95;
  double step = 0.01;

  /// Throws UsageError unless 0 < start <= stop < 1 and step > 0.
  std::vector<double> values() const;
};

/// "start:stop:step" -> PGrid. Throws UsageError on malformed text.
PGrid parse_p_grid(std::string_view text);

struct RunConfig {
  std::uint64_t master_seed = 20210315;
  std::size_t n_sims = 100'000;
  PGrid p_grid;
  double horizon_s = 300.0;
  double stride_s = 300.0;
  double volume_min = 100'000;
  double stale_fraction_max = 0.05;
  Scale scale = Scale::log;

  /// Throws UsageError for nonpositive bounds or a grid outside (0, 1).
  void validate() const;
};

inline constexpr const char* kConfigEnvVar = "CRWVAR_CONFIG";

/// Overlays the keys present in a JSON object onto `base`. Unknown keys are a UsageError.
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

/// Explicit path if given, else the file named by $CRWVAR_CONFIG, else defaults.
RunConfig resolve_run_config(const std::optional<std::filesystem::path>& explicit_path);

}  // namespace crwvar
