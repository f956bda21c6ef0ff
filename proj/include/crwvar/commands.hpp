#pragma once

#include <cstddef>
#include <cmath>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crwvar/config.hpp"
#include "crwvar/hf_forecast.hpp"
#include "crwvar/types.hpp"
#include "crwvar/validation.hpp"

namespace crwvar::cmd {

/// 0 success, 2 usage, 3 data, 4 numerical degeneracy, 1 anything else.
int exit_code_for(const std::exception& e) noexcept;

// ---------------------------------------------------------------------------
// simulate

enum class SimKind { rw, crw, semiparam, renewal };
enum class Emit { summary, paths, daily, ticks };

SimKind parse_sim_kind(std::string_view text);
Emit parse_emit(std::string_view text);

struct SimulateOptions {
  SimKind kind = SimKind::crw;
  double p = 0.5;
  std::size_t steps = 1000;
  std::size_t reps = 1000;
  /// Point mass 1 when unset; ignored by rw and crw.
  std::optional<MagnitudeModel> magnitude;
  Emit emit = Emit::summary;
  std::uint64_t seed = 20210315;
  Scale scale = Scale::log;

  // daily emission
  double start_price = 100.0;
  std::string symbol_prefix = "SYN";
  std::string start_date = "2018-08-09";

  // renewal
  double horizon_s = 300.0;
  std::optional<int> start_sign;
  std::optional<std::filesystem::path> train_file;
  double tau_mean = 1.0;
  bool tau_exponential = false;
  std::size_t grid_points = 100;
};

/// Returns the CSV text; the CLI writes it atomically.
std::string simulate(const SimulateOptions& options);

// ---------------------------------------------------------------------------
// variance-curve

enum class CurveMode { analytic, montecarlo };

struct VarianceCurveOptions {
  PGrid grid{0.05, 0.95, 0.05};
  std::size_t steps = 200;
  CurveMode mode = CurveMode::analytic;
  std::size_t reps = 100'000;
  std::uint64_t seed = 20210315;
};

struct VarianceCurveRow {
  double p = 0.0;
  double ratio_analytic = 0.0;
  double ratio_exact = 0.0;
  std::optional<double> ratio_mc;
};

/// Point-mass variance ratio against p = 1/2: asymptotic, exact at `steps`, and simulated.
std::vector<VarianceCurveRow> variance_curve(const VarianceCurveOptions& options);
std::string variance_curve_csv(const std::vector<VarianceCurveRow>& rows);

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  std::vector<std::filesystem::path> daily_files;
  std::optional<std::filesystem::path> manifest;
  RunConfig config;
  bool permissive = false;
};

struct AssetRow {
  std::string symbol;
  FilterDecision decision;
  /// "ok", or the reason the estimates are missing for a kept asset.
  std::string status = "ok";
  std::size_t n_increments = 0;
  double p_hat = NAN;
  double m1 = NAN;
  double m2 = NAN;
  double sigma_bar_sq = NAN;
  double ks_statistic = NAN;
  double ks_p_value = NAN;
  double corr_r = NAN;
  double corr_p_value = NAN;
};

struct AnalyzeReport {
  std::vector<AssetRow> rows;
  std::size_t kept = 0;
  std::size_t estimated = 0;
  double median_sigma_bar_sq = NAN;
  double lower_quartile = NAN;
  double upper_quartile = NAN;
  double symmetry_rejection_rate = NAN;
  double correlation_rejection_rate = NAN;
  std::size_t skipped_rows = 0;
};

/// Throws DataError if no asset survives filtering, DegenerateError if none can be estimated.
AnalyzeReport analyze(const AnalyzeOptions& options);
std::string analyze_csv(const AnalyzeReport& report);

// ---------------------------------------------------------------------------
// hf-eval

struct HfEvalOptions {
  std::filesystem::path train_file;
  std::filesystem::path test_file;
  RunConfig config;
  bool permissive = false;
  PitMode pit_mode = PitMode::mid_rank;
};

struct HfEvalReport {
  CalibrationCurve curve;
  double best_p = NAN;
  double best_ks = NAN;
  /// variance_rate(best_p) / variance_rate(1/2).
  double variance_ratio_at_best = NAN;
  std::vector<std::string> warnings;
};

HfEvalReport hf_eval(const HfEvalOptions& options);
std::string hf_eval_csv(const HfEvalReport& report);
std::string hf_eval_summary(const HfEvalReport& report);

}  // namespace crwvar::cmd
