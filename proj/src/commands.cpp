#include "crwvar/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "crwvar/errors.hpp"
#include "crwvar/estimation.hpp"
#include "crwvar/io.hpp"
#include "crwvar/parallel.hpp"
#include "crwvar/simulate.hpp"
#include "crwvar/stats.hpp"
#include "crwvar/variance_theory.hpp"

namespace crwvar::cmd {

namespace {

constexpr std::size_t kBlock = 1024;

std::string num(double v) { return std::isnan(v) ? std::string() : io::format_double(v); }

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

SignChainParams params_or_usage(double p) {
  try {
    return SignChainParams(p);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

/// Per-index Welford accumulators fed in replicate order.
class ColumnMoments {
 public:
  explicit ColumnMoments(std::size_t width) : mean_(width, 0.0), m2_(width, 0.0) {}

  void add(const std::vector<double>& row) {
    ++n_;
    for (std::size_t i = 0; i < row.size(); ++i) {
      const double d = row[i] - mean_[i];
      mean_[i] += d / static_cast<double>(n_);
      m2_[i] += d * (row[i] - mean_[i]);
    }
  }

  double mean(std::size_t i) const { return mean_[i]; }
  double variance(std::size_t i) const {
    return n_ < 2 ? 0.0 : m2_[i] / static_cast<double>(n_ - 1);
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

/// Streams replicate rows through `sink` in replicate order, generating blocks in parallel.
template <class Gen, class Sink>
void for_each_replicate(std::size_t reps, Gen&& gen, Sink&& sink) {
  for (std::size_t base = 0; base < reps; base += kBlock) {
    const std::size_t count = std::min(kBlock, reps - base);
    auto block = map_replicates(count, [&](std::size_t j) { return gen(base + j); });
    for (auto& row : block) sink(row);
  }
}

std::chrono::sys_days parse_date(const std::string& s) {
  if (!io::is_iso_date(s)) throw UsageError("bad start date '" + s + "'");
  const int y = std::stoi(s.substr(0, 4));
  const unsigned m = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
  const unsigned d = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
  return std::chrono::sys_days{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

std::string format_date(std::chrono::sys_days day) {
  const std::chrono::year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string summary_csv(const ColumnMoments& main, const ColumnMoments* baseline,
                        const std::vector<double>& index, const char* index_name) {
  std::ostringstream os;
  os << index_name << ",mean,variance,std";
  if (baseline) os << ",rw_variance,rw_std,std_ratio";
  os << '\n';
  for (std::size_t i = 0; i < index.size(); ++i) {
    const double v = main.variance(i);
    os << num(index[i]) << ',' << num(main.mean(i)) << ',' << num(v) << ',' << num(std::sqrt(v));
    if (baseline) {
      const double bv = baseline->variance(i);
      os << ',' << num(bv) << ',' << num(std::sqrt(bv)) << ','
         << (bv > 0.0 ? num(std::sqrt(v / bv)) : std::string());
    }
    os << '\n';
  }
  return os.str();
}

template <class PathFn>
std::string emit_discrete(const SimulateOptions& o, PathFn&& path_fn, bool with_baseline) {
  const std::size_t width = o.steps + 1;
  switch (o.emit) {
    case Emit::summary: {
      ColumnMoments main(width);
      ColumnMoments base(width);
      for_each_replicate(o.reps, [&](std::size_t k) { return path_fn(k, false).values; },
                         [&](const std::vector<double>& row) { main.add(row); });
      if (with_baseline) {
        for_each_replicate(o.reps, [&](std::size_t k) { return path_fn(k, true).values; },
                           [&](const std::vector<double>& row) { base.add(row); });
      }
      std::vector<double> steps(width);
      for (std::size_t i = 0; i < width; ++i) steps[i] = static_cast<double>(i);
      return summary_csv(main, with_baseline ? &base : nullptr, steps, "step");
    }
    case Emit::paths: {
      std::vector<std::vector<double>> cols;
      cols.reserve(o.reps);
      for_each_replicate(o.reps, [&](std::size_t k) { return path_fn(k, false).values; },
                         [&](std::vector<double>& row) { cols.push_back(std::move(row)); });
      std::ostringstream os;
      os << "step";
      for (std::size_t k = 0; k < o.reps; ++k) os << ",rep_" << k;
      os << '\n';
      for (std::size_t i = 0; i < width; ++i) {
        os << i;
        for (const auto& c : cols) os << ',' << num(c[i]);
        os << '\n';
      }
      return os.str();
    }
    case Emit::daily: {
      if (!(o.start_price > 0.0)) throw UsageError("start price must be positive");
      const auto day0 = parse_date(o.start_date);
      std::vector<std::string> dates(width);
      for (std::size_t i = 0; i < width; ++i) {
        dates[i] = format_date(day0 + std::chrono::days{static_cast<int>(i)});
      }
      std::vector<io::DailySeries> out;
      out.reserve(o.reps);
      for_each_replicate(o.reps, [&](std::size_t k) { return path_fn(k, false).values; },
                         [&](const std::vector<double>& row) {
                           io::DailySeries s;
                           char sym[32];
                           std::snprintf(sym, sizeof(sym), "%s%04zu", o.symbol_prefix.c_str(),
                                         out.size() + 1);
                           s.symbol = sym;
                           s.dates = dates;
                           s.closes.resize(width);
                           for (std::size_t i = 0; i < width; ++i) {
                             s.closes[i] = o.scale == Scale::log ? o.start_price * std::exp(row[i])
                                                                 : o.start_price + row[i];
                             if (!(s.closes[i] > 0.0)) {
                               throw DataError("linear-scale path reached a nonpositive price");
                             }
                           }
                           s.volumes.assign(width, std::nullopt);
                           out.push_back(std::move(s));
                         });
      return io::daily_csv(out);
    }
    case Emit::ticks:
      throw UsageError("--emit ticks is only valid for --kind renewal");
  }
  return {};
}

template <JointSampler M>
std::string emit_renewal(const SimulateOptions& o, const SignChainParams& params, const M& joint) {
  if (!(o.horizon_s > 0.0)) throw UsageError("horizon must be positive");
  RenewalOptions ropts;
  ropts.scale = o.scale;
  if (o.emit == Emit::ticks) {
    if (o.reps != 1) throw UsageError("--emit ticks writes one replicate; use --reps 1");
    const TickSeries sim =
        simulate_renewal(params, joint, o.horizon_s, o.start_price, o.start_sign, RngStream(o.seed, 0), ropts);
    std::vector<TickEvent> events{{0.0, o.start_price}};
    events.insert(events.end(), sim.events().begin(), sim.events().end());
    return io::tick_csv(TickSeries(std::move(events)));
  }
  if (o.emit != Emit::summary) throw UsageError("renewal supports --emit summary or ticks");
  if (o.grid_points == 0) throw UsageError("grid points must be positive");
  const std::size_t width = o.grid_points + 1;
  std::vector<double> times(width);
  for (std::size_t j = 0; j < width; ++j) {
    times[j] = o.horizon_s * static_cast<double>(j) / static_cast<double>(o.grid_points);
  }
  ColumnMoments main(width);
  for_each_replicate(
      o.reps,
      [&](std::size_t k) {
        std::vector<double> row(width, 0.0);
        std::size_t j = 0;
        double current = 0.0;
        RngStream rng(o.seed, k);
        run_renewal(params, joint, o.horizon_s, o.start_sign, rng, ropts.max_events,
                    [&](double t, double cum, int) {
                      // Grid points before this event see the previous cumulative sum.
                      while (j < width && times[j] < t) row[j++] = current;
                      current = cum;
                    });
        while (j < width) row[j++] = current;
        return row;
      },
      [&](const std::vector<double>& row) { main.add(row); });
  return summary_csv(main, nullptr, times, "time");
}

}  // namespace

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const UsageError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  if (dynamic_cast<const DegenerateError*>(&e)) return 4;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return 2;
  return 1;
}

SimKind parse_sim_kind(std::string_view text) {
  if (text == "rw") return SimKind::rw;
  if (text == "crw") return SimKind::crw;
  if (text == "semiparam") return SimKind::semiparam;
  if (text == "renewal") return SimKind::renewal;
  throw UsageError("unknown kind '" + std::string(text) + "'");
}

Emit parse_emit(std::string_view text) {
  if (text == "summary") return Emit::summary;
  if (text == "paths") return Emit::paths;
  if (text == "daily") return Emit::daily;
  if (text == "ticks") return Emit::ticks;
  throw UsageError("unknown emit mode '" + std::string(text) + "'");
}

std::string simulate(const SimulateOptions& o) {
  if (o.reps == 0) throw UsageError("reps must be >= 1");
  if (o.kind != SimKind::renewal && o.steps == 0) throw UsageError("steps must be >= 1");
  switch (o.kind) {
    case SimKind::rw:
      return emit_discrete(
          o, [&](std::size_t k, bool) { return simulate_rw(o.steps, RngStream(o.seed, k)); }, false);
    case SimKind::crw: {
      const SignChainParams params = params_or_usage(o.p);
      return emit_discrete(
          o,
          [&](std::size_t k, bool baseline) {
            return baseline ? simulate_rw(o.steps, RngStream(o.seed, k).fork(1))
                            : simulate_crw(params, o.steps, RngStream(o.seed, k));
          },
          true);
    }
    case SimKind::semiparam: {
      const SignChainParams params = params_or_usage(o.p);
      const SignChainParams half(0.5);
      const MagnitudeModel mag = o.magnitude.value_or(MagnitudeModel::point_mass(1.0));
      if (!mag.sampleable()) throw UsageError("magnitude model not sampleable");
      return emit_discrete(
          o,
          [&](std::size_t k, bool baseline) {
            return baseline
                       ? simulate_semiparametric(half, mag, o.steps, RngStream(o.seed, k).fork(1))
                       : simulate_semiparametric(params, mag, o.steps, RngStream(o.seed, k));
          },
          true);
    }
    case SimKind::renewal: {
      const SignChainParams params = params_or_usage(o.p);
      if (o.train_file) {
        const TickSeries train = io::read_tick_csv(*o.train_file);
        return emit_renewal(o, params, build_conditional_empirical(train, o.scale));
      }
      const MagnitudeModel mag = o.magnitude.value_or(MagnitudeModel::point_mass(1.0));
      if (!mag.sampleable()) throw UsageError("magnitude model not sampleable");
      if (!(o.tau_mean > 0.0)) throw UsageError("tau mean must be positive");
      const IndependentJoint joint(mag,
                                   o.tau_exponential ? IndependentJoint::TauLaw::exponential
                                                     : IndependentJoint::TauLaw::fixed,
                                   o.tau_mean);
      return emit_renewal(o, params, joint);
    }
  }
  return {};
}

std::vector<VarianceCurveRow> variance_curve(const VarianceCurveOptions& o) {
  if (o.steps == 0) throw UsageError("steps must be >= 1");
  if (o.mode == CurveMode::montecarlo && o.reps < 2) throw UsageError("reps must be >= 2");
  const std::vector<double> grid = o.grid.values();
  const double n = static_cast<double>(o.steps);

  auto mc_variance = [&](const SignChainParams& params) {
    // Common random numbers: replicate k uses stream k at every p.
    const auto terminal = map_replicates(
        o.reps, [&](std::size_t k) { return crw_terminal(params, o.steps, RngStream(o.seed, k)); });
    return stats::summarize(terminal).variance;
  };
  double baseline = NAN;
  if (o.mode == CurveMode::montecarlo) baseline = mc_variance(SignChainParams(0.5));

  std::vector<VarianceCurveRow> rows;
  for (double p : grid) {
    const SignChainParams params(p);
    VarianceCurveRow row;
    row.p = p;
    row.ratio_analytic = variance_ratio(params, 1.0, 1.0);
    row.ratio_exact = exact_variance(params, 1.0, 1.0, o.steps) / n;
    if (o.mode == CurveMode::montecarlo) row.ratio_mc = mc_variance(params) / baseline;
    rows.push_back(row);
  }
  return rows;
}

std::string variance_curve_csv(const std::vector<VarianceCurveRow>& rows) {
  std::ostringstream os;
  os << "p,ratio_analytic,ratio_exact,ratio_mc\n";
  for (const auto& r : rows) {
    os << num(r.p) << ',' << num(r.ratio_analytic) << ',' << num(r.ratio_exact) << ','
       << (r.ratio_mc ? num(*r.ratio_mc) : std::string()) << '\n';
  }
  return os.str();
}

AnalyzeReport analyze(const AnalyzeOptions& o) {
  o.config.validate();
  if (o.daily_files.empty()) throw UsageError("no daily files given");
  AnalyzeReport report;
  std::vector<io::DailySeries> series;
  std::map<std::string, std::size_t> seen;
  for (const auto& f : o.daily_files) {
    io::IngestStats st;
    for (auto& s : io::read_daily_csv(f, {o.permissive}, &st)) {
      if (!seen.try_emplace(s.symbol, series.size()).second) {
        throw DataError(f.string() + ": symbol " + s.symbol + " appears in more than one file");
      }
      series.push_back(std::move(s));
    }
    report.skipped_rows += st.rows_skipped;
  }
  std::map<std::string, io::ManifestEntry> manifest;
  if (o.manifest) {
    for (auto& e : io::read_manifest_csv(*o.manifest)) manifest[e.symbol] = std::move(e);
  }

  std::vector<AssetRecord> assets;
  assets.reserve(series.size());
  for (const auto& s : series) {
    AssetRecord a;
    a.symbol = s.symbol;
    a.prices = s.closes;
    a.volume = s.mean_volume();
    if (const auto it = manifest.find(s.symbol); it != manifest.end()) {
      if (it->second.volume) a.volume = it->second.volume;
      a.market_cap = it->second.market_cap;
      a.listing_group = it->second.listing_group;
    }
    assets.push_back(std::move(a));
  }
  const auto decisions =
      filter_universe(assets, {o.config.volume_min, o.config.stale_fraction_max});

  report.rows = map_replicates(assets.size(), [&](std::size_t i) {
    AssetRow row;
    row.symbol = assets[i].symbol;
    row.decision = decisions[i];
    if (!row.decision.kept) {
      row.status = "excluded";
      return row;
    }
    try {
      const VarianceReport v = analyze_asset(assets[i].prices, o.config.scale);
      row.n_increments = v.n_increments;
      row.p_hat = v.p_hat;
      row.m1 = v.m1_hat;
      row.m2 = v.m2_hat;
      row.sigma_bar_sq = v.sigma_bar_sq;
      const ValidationReport val = validate_asset(assets[i].prices, o.config.scale);
      row.ks_statistic = val.symmetry.statistic;
      row.ks_p_value = val.symmetry.p_value;
      row.corr_r = val.sign_magnitude_corr.r;
      row.corr_p_value = val.sign_magnitude_corr.p_value;
    } catch (const DegenerateError& e) {
      row.status = std::string("degenerate: ") + e.what();
    } catch (const DataError& e) {
      row.status = std::string("data: ") + e.what();
    }
    return row;
  });

  std::vector<double> sigmas;
  std::size_t sym_reject = 0;
  std::size_t corr_reject = 0;
  std::size_t validated = 0;
  for (const auto& r : report.rows) {
    report.kept += r.decision.kept;
    if (!std::isnan(r.sigma_bar_sq)) sigmas.push_back(r.sigma_bar_sq);
    if (!std::isnan(r.ks_p_value)) {
      ++validated;
      sym_reject += r.ks_p_value < 0.05;
      corr_reject += r.corr_p_value < 0.05;
    }
  }
  if (report.kept == 0) throw DataError("no assets survive filtering");
  report.estimated = sigmas.size();
  if (sigmas.empty()) throw DegenerateError("no surviving asset has a defined variance ratio");
  report.median_sigma_bar_sq = stats::quantile(sigmas, 0.5);
  report.lower_quartile = stats::quantile(sigmas, 0.25);
  report.upper_quartile = stats::quantile(sigmas, 0.75);
  if (validated > 0) {
    report.symmetry_rejection_rate = static_cast<double>(sym_reject) / static_cast<double>(validated);
    report.correlation_rejection_rate =
        static_cast<double>(corr_reject) / static_cast<double>(validated);
  }
  return report;
}

std::string analyze_csv(const AnalyzeReport& r) {
  std::ostringstream os;
  os << "symbol,kept,reason,status,n_increments,p_hat,m1,m2,sigma_bar_sq,ks_statistic,ks_p_value,"
        "corr_r,corr_p_value\n";
  for (const auto& a : r.rows) {
    os << a.symbol << ',' << (a.decision.kept ? 1 : 0) << ',' << to_string(a.decision.reason) << ','
       << sanitize(a.status) << ',' << a.n_increments << ',' << num(a.p_hat) << ',' << num(a.m1)
       << ',' << num(a.m2) << ',' << num(a.sigma_bar_sq) << ',' << num(a.ks_statistic) << ','
       << num(a.ks_p_value) << ',' << num(a.corr_r) << ',' << num(a.corr_p_value) << '\n';
  }
  os << "# assets=" << r.rows.size() << '\n'
     << "# kept=" << r.kept << '\n'
     << "# estimated=" << r.estimated << '\n'
     << "# median_sigma_bar_sq=" << num(r.median_sigma_bar_sq) << '\n'
     << "# lower_quartile_sigma_bar_sq=" << num(r.lower_quartile) << '\n'
     << "# upper_quartile_sigma_bar_sq=" << num(r.upper_quartile) << '\n'
     << "# symmetry_rejection_rate_5pct=" << num(r.symmetry_rejection_rate) << '\n'
     << "# correlation_rejection_rate_5pct=" << num(r.correlation_rejection_rate) << '\n'
     << "# skipped_rows=" << r.skipped_rows << '\n';
  return os.str();
}

HfEvalReport hf_eval(const HfEvalOptions& o) {
  o.config.validate();
  HfEvalReport report;
  io::IngestStats train_stats;
  io::IngestStats test_stats;
  const TickSeries train = io::read_tick_csv(o.train_file, {o.permissive}, &train_stats);
  const TickSeries test = io::read_tick_csv(o.test_file, {o.permissive}, &test_stats);
  if (train.size() < 3) {
    throw DataError("insufficient ticks: " + o.train_file.string() + " has " +
                    std::to_string(train.size()) + " price-change events from " +
                    std::to_string(train_stats.rows_read) + " rows (need 3)");
  }
  if (test.size() < 2) {
    throw DataError("insufficient ticks: " + o.test_file.string() + " has " +
                    std::to_string(test.size()) + " price-change events from " +
                    std::to_string(test_stats.rows_read) + " rows (need 2)");
  }
  const ConditionalEmpirical model = build_conditional_empirical(train, o.config.scale);
  for (int s_now : {1, -1}) {
    for (int s_prev : {1, -1}) {
      if (model.has_fallback(s_now, s_prev)) {
        report.warnings.push_back("bucket (" + std::to_string(s_now) + "," + std::to_string(s_prev) +
                                  ") is empty; drawing from the pooled sample");
      }
    }
  }
  if (train_stats.rows_skipped + test_stats.rows_skipped > 0) {
    report.warnings.push_back("skipped " +
                              std::to_string(train_stats.rows_skipped + test_stats.rows_skipped) +
                              " malformed rows");
  }

  SweepConfig sc;
  sc.horizon = o.config.horizon_s;
  sc.stride = o.config.stride_s;
  sc.n_sims = o.config.n_sims;
  sc.scale = o.config.scale;
  sc.pit_mode = o.pit_mode;
  const std::vector<double> grid = o.config.p_grid.values();
  report.curve = sweep_p(train, test, grid, sc, RngStream(o.config.master_seed, 0));
  if (report.curve.origins_skipped > 0) {
    report.warnings.push_back("skipped " + std::to_string(report.curve.origins_skipped) +
                              " forecast origins without a prior increment");
  }
  report.best_p = argmin_p(report.curve);
  for (const auto& row : report.curve.rows) {
    if (row.p == report.best_p) {
      report.best_ks = row.ks_distance;
      const double rw_rate = report.curve.mu_tau * report.curve.moments.m2;
      report.variance_ratio_at_best = rw_rate > 0.0 ? row.variance_rate / rw_rate : NAN;
    }
  }
  return report;
}

std::string hf_eval_csv(const HfEvalReport& r) {
  std::ostringstream os;
  os << "p,ks_distance,variance_rate,forecast_variance_rate,n_forecasts\n";
  for (const auto& row : r.curve.rows) {
    os << num(row.p) << ',' << num(row.ks_distance) << ',' << num(row.variance_rate) << ','
       << num(row.forecast_variance_rate) << ',' << row.n_forecasts << '\n';
  }
  return os.str();
}

std::string hf_eval_summary(const HfEvalReport& r) {
  std::ostringstream os;
  os << "argmin_p=" << num(r.best_p) << " ks_distance=" << num(r.best_ks)
     << " variance_ratio=" << num(r.variance_ratio_at_best)
     << " origins=" << r.curve.origins_total << " skipped=" << r.curve.origins_skipped
     << " mu_tau=" << num(r.curve.mu_tau);
  return os.str();
}

}  // namespace crwvar::cmd
