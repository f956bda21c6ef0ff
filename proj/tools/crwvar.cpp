// Command-line front end: simulate, variance-curve, analyze, hf-eval.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crwvar/commands.hpp"
#include "crwvar/config.hpp"
#include "crwvar/errors.hpp"
#include "crwvar/io.hpp"

namespace {

using crwvar::RunConfig;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw crwvar::UsageError("bad magnitude sample '" + item + "'");
    }
  }
  return out;
}

void emit(const std::optional<std::string>& out, const std::string& content) {
  if (out) {
    crwvar::io::write_file_atomic(*out, content);
  } else {
    std::cout << content;
  }
}

/// Flags shared by the subcommands that read a RunConfig.
struct ConfigFlags {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> sims;
  std::optional<std::string> p_grid;
  std::optional<double> horizon_s;
  std::optional<double> stride_s;
  std::optional<double> volume_min;
  std::optional<double> stale_max;
  std::optional<std::string> scale;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON run config (default: $CRWVAR_CONFIG)");
    app->add_option("--seed", seed, "Master seed");
    app->add_option("--sims", sims, "Monte Carlo replicates per forecast");
    app->add_option("--p-grid", p_grid, "Persistence grid start:stop:step");
    app->add_option("--horizon-s", horizon_s, "Forecast horizon in seconds");
    app->add_option("--stride-s", stride_s, "Spacing of forecast origins in seconds");
    app->add_option("--volume-min", volume_min, "Minimum traded volume");
    app->add_option("--stale-max", stale_max, "Maximum fraction of zero increments");
    app->add_option("--scale", scale, "Increment scale: log or linear");
  }

  RunConfig resolve() const {
    RunConfig c = crwvar::resolve_run_config(
        config_path ? std::optional<std::filesystem::path>(*config_path) : std::nullopt);
    if (seed) c.master_seed = *seed;
    if (sims) c.n_sims = *sims;
    if (p_grid) c.p_grid = crwvar::parse_p_grid(*p_grid);
    if (horizon_s) c.horizon_s = *horizon_s;
    if (stride_s) c.stride_s = *stride_s;
    if (volume_min) c.volume_min = *volume_min;
    if (stale_max) c.stale_fraction_max = *stale_max;
    if (scale) c.scale = crwvar::parse_scale(*scale);
    c.validate();
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlated random walk variance toolkit"};
  app.require_subcommand(1);
  std::optional<std::string> out;

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate rw / crw / semiparam / renewal paths");
  crwvar::cmd::SimulateOptions so;
  std::string kind = "crw";
  std::string emit_mode = "summary";
  std::optional<double> mag_point;
  std::optional<std::string> mag_samples;
  std::optional<std::string> train;
  std::optional<int> start_sign;
  std::string sim_scale = "log";
  sim->add_option("--kind", kind, "rw, crw, semiparam or renewal")->required();
  sim->add_option("--p", so.p, "Persistence probability");
  sim->add_option("--steps,-n", so.steps, "Steps per path");
  sim->add_option("--reps", so.reps, "Replicates");
  sim->add_option("--emit", emit_mode, "summary, paths, daily or ticks");
  sim->add_option("--seed", so.seed, "Master seed");
  sim->add_option("--mag-point", mag_point, "Point-mass magnitude");
  sim->add_option("--mag-samples", mag_samples, "Comma-separated empirical magnitudes");
  sim->add_option("--scale", sim_scale, "Price scale for daily/ticks output: log or linear");
  sim->add_option("--start-price", so.start_price, "Start price for daily/ticks output");
  sim->add_option("--symbol-prefix", so.symbol_prefix, "Symbol prefix for daily output");
  sim->add_option("--start-date", so.start_date, "First date for daily output");
  sim->add_option("--horizon-s", so.horizon_s, "Renewal horizon in seconds");
  sim->add_option("--start-sign", start_sign, "Previous sign at time 0 (+1 or -1)");
  sim->add_option("--train", train, "Tick file for the conditional empirical model");
  sim->add_option("--tau", so.tau_mean, "Inter-event time (mean when --tau-exp)");
  sim->add_flag("--tau-exp", so.tau_exponential, "Exponential inter-event times");
  sim->add_option("--grid-points", so.grid_points, "Time grid size for renewal summaries");
  sim->add_option("--out", out, "Output CSV (default stdout)");

  // variance-curve
  auto* curve = app.add_subcommand("variance-curve", "Variance ratio against p, analytic and simulated");
  crwvar::cmd::VarianceCurveOptions vo;
  std::string grid_text = "0.05:0.95:0.05";
  std::string mode = "analytic";
  curve->add_option("--p-grid", grid_text, "start:stop:step");
  curve->add_option("--steps,-n", vo.steps, "Horizon T in steps");
  curve->add_option("--mode", mode, "analytic or montecarlo");
  curve->add_option("--reps", vo.reps, "Monte Carlo replicates");
  curve->add_option("--seed", vo.seed, "Master seed");
  curve->add_option("--out", out, "Output CSV (default stdout)");

  // analyze
  auto* an = app.add_subcommand("analyze", "Estimate p and the variance ratio per asset");
  ConfigFlags an_flags;
  std::vector<std::string> daily_files;
  std::optional<std::string> manifest;
  bool an_permissive = false;
  an->add_option("files", daily_files, "Daily CSV files")->required();
  an->add_option("--manifest", manifest, "Universe manifest CSV (symbol,market_cap,volume,group)");
  an->add_flag("--permissive", an_permissive, "Skip malformed rows and count them");
  an->add_option("--out", out, "Report CSV (default stdout)");
  an_flags.attach(an);

  // hf-eval
  auto* hf = app.add_subcommand("hf-eval", "PIT/KS calibration of tick forecasts swept over p");
  ConfigFlags hf_flags;
  std::string train_file;
  std::string test_file;
  bool hf_permissive = false;
  bool randomized_pit = false;
  hf->add_option("--train", train_file, "Training tick CSV")->required();
  hf->add_option("--test", test_file, "Test tick CSV")->required();
  hf->add_flag("--permissive", hf_permissive, "Skip malformed rows and count them");
  hf->add_flag("--randomized-pit", randomized_pit, "Randomise PIT values at ties");
  hf->add_option("--out", out, "Calibration curve CSV (default stdout)");
  hf_flags.attach(hf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*sim) {
      so.kind = crwvar::cmd::parse_sim_kind(kind);
      so.emit = crwvar::cmd::parse_emit(emit_mode);
      so.scale = crwvar::parse_scale(sim_scale);
      if (mag_point && mag_samples) throw crwvar::UsageError("give --mag-point or --mag-samples, not both");
      if (mag_point) so.magnitude = crwvar::MagnitudeModel::point_mass(*mag_point);
      if (mag_samples) so.magnitude = crwvar::MagnitudeModel::empirical(parse_list(*mag_samples));
      so.start_sign = start_sign;
      if (train) so.train_file = *train;
      emit(out, crwvar::cmd::simulate(so));
    } else if (*curve) {
      vo.grid = crwvar::parse_p_grid(grid_text);
      if (mode == "analytic") {
        vo.mode = crwvar::cmd::CurveMode::analytic;
      } else if (mode == "montecarlo") {
        vo.mode = crwvar::cmd::CurveMode::montecarlo;
      } else {
        throw crwvar::UsageError("mode must be analytic or montecarlo");
      }
      emit(out, crwvar::cmd::variance_curve_csv(crwvar::cmd::variance_curve(vo)));
    } else if (*an) {
      crwvar::cmd::AnalyzeOptions ao;
      ao.config = an_flags.resolve();
      for (const auto& f : daily_files) ao.daily_files.emplace_back(f);
      if (manifest) ao.manifest = *manifest;
      ao.permissive = an_permissive;
      const auto report = crwvar::cmd::analyze(ao);
      emit(out, crwvar::cmd::analyze_csv(report));
      if (out) {
        std::cerr << "kept " << report.kept << " of " << report.rows.size()
                  << " assets; median sigma_bar_sq " << report.median_sigma_bar_sq << '\n';
      }
    } else if (*hf) {
      crwvar::cmd::HfEvalOptions ho;
      ho.config = hf_flags.resolve();
      ho.train_file = train_file;
      ho.test_file = test_file;
      ho.permissive = hf_permissive;
      ho.pit_mode = randomized_pit ? crwvar::PitMode::randomized : crwvar::PitMode::mid_rank;
      const auto report = crwvar::cmd::hf_eval(ho);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      emit(out, crwvar::cmd::hf_eval_csv(report));
      (out ? std::cout : std::cerr) << crwvar::cmd::hf_eval_summary(report) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return crwvar::cmd::exit_code_for(e);
  }
  return 0;
}
