#include "crwvar/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "crwvar/errors.hpp"

namespace crwvar {

std::vector<double> PGrid::values() const {
  if (!(start > 0.0 && stop < 1.0 && start <= stop && step > 0.0)) {
    throw UsageError("p grid must satisfy 0 < start <= stop < 1 and step > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    // Round to 12 decimals so 0.05 + 25 * 0.01 prints as 0.3.
    out[k] = std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12;
  }
  return out;
}

PGrid parse_p_grid(std::string_view text) {
  PGrid g;
  double* slots[] = {&g.start, &g.stop, &g.step};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const auto colon = text.find(':', pos);
    if ((i < 2) == (colon == std::string_view::npos)) {
      throw UsageError("p grid must look like start:stop:step, got '" + std::string(text) + "'");
    }
    const auto part = text.substr(pos, i < 2 ? colon - pos : std::string_view::npos);
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), *slots[i]);
    if (ec != std::errc{} || ptr != part.data() + part.size()) {
      throw UsageError("bad number '" + std::string(part) + "' in p grid");
    }
    pos = colon + 1;
  }
  static_cast<void>(g.values());
  return g;
}

void RunConfig::validate() const {
  if (n_sims == 0) throw UsageError("sims must be positive");
  if (!(horizon_s > 0.0)) throw UsageError("horizon must be positive");
  if (!(stride_s > 0.0)) throw UsageError("stride must be positive");
  if (!(volume_min >= 0.0)) throw UsageError("volume minimum must be >= 0");
  if (!(stale_fraction_max > 0.0 && stale_fraction_max <= 1.0)) {
    throw UsageError("stale fraction maximum must lie in (0, 1]");
  }
  static_cast<void>(p_grid.values());
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config " + path.string() + ": top level must be an object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "master_seed") base.master_seed = value.get<std::uint64_t>();
      else if (key == "n_sims") base.n_sims = value.get<std::size_t>();
      else if (key == "p_grid") base.p_grid = parse_p_grid(value.get<std::string>());
      else if (key == "horizon_s") base.horizon_s = value.get<double>();
      else if (key == "stride_s") base.stride_s = value.get<double>();
      else if (key == "volume_min") base.volume_min = value.get<double>();
      else if (key == "stale_fraction_max") base.stale_fraction_max = value.get<double>();
      else if (key == "scale") base.scale = parse_scale(value.get<std::string>());
      else throw UsageError("config " + path.string() + ": unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config " + path.string() + ": " + e.what());
  }
  base.validate();
  return base;
}

RunConfig resolve_run_config(const std::optional<std::filesystem::path>& explicit_path) {
  if (explicit_path) return load_run_config(*explicit_path);
  if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') {
    return load_run_config(env);
  }
  return {};
}

}  // namespace crwvar
