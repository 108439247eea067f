// Subcommand bodies. Each reads its resolved config and emits CSV or JSON.
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "fbsync/biphoton.hpp"
#include "fbsync/classical.hpp"
#include "fbsync/error.hpp"
#include "fbsync/io.hpp"
#include "fbsync/modeops.hpp"
#include "fbsync/qfp.hpp"
#include "options.hpp"

namespace fbsync::cli {
namespace {

using io::format_double;

OptionSpec rf_option() { return {"rf_frequency_hz", ValueType::real, 19e9, "RF drive frequency"}; }
OptionSpec depth_option() { return {"depth_rad", ValueType::real, 1.42, "modulation depth"}; }

modeops::SinusoidDrive drive_from(const Context& ctx) {
  modeops::SinusoidDrive drive;
  drive.rf_frequency_hz = ctx.real("rf_frequency_hz");
  drive.depth_rad = ctx.real("depth_rad");
  if (ctx.has("delay_s")) drive.delay_s = ctx.real("delay_s");
  drive.validate();
  return drive;
}

DelayDistribution delay_law(const Context& ctx) {
  const std::string drift = ctx.text("drift");
  const double delay = ctx.real("delay_s");
  if (drift == "none" || drift == "fixed") return DelayDistribution::fixed(delay);
  if (drift == "uniform") return DelayDistribution::uniform_over_period(delay);
  if (drift == "gaussian") return DelayDistribution::gaussian(delay, ctx.real("sigma_s"));
  throw ConfigError("--drift must be none, uniform or gaussian, got '" + drift + "'");
}

int quad_points(const Context& ctx, const DelayDistribution& dist) {
  const int q = ctx.integer("quad_points");
  return q > 0 ? q : dist.default_points();
}

std::vector<OptionSpec> drift_options() {
  return {{"drift", ValueType::text, "none", "delay law: none, uniform or gaussian"},
          {"delay_s", ValueType::real, 0.0, "fixed delay, or the law's location"},
          {"sigma_s", ValueType::real, 1e-12, "gaussian standard deviation"},
          {"quad_points", ValueType::integer, 0, "quadrature points (0: law default)"}};
}

std::vector<OptionSpec> join(std::vector<OptionSpec> a, const std::vector<OptionSpec>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void eopm_coeffs(const Context& ctx) {
  const auto drive = drive_from(ctx);
  int order = ctx.integer("max_order");
  if (order <= 0) order = modeops::TruncationPolicy::for_depth(drive.depth_rad).guard_bins;
  const auto c = modeops::eopm_coefficients(drive, order);
  std::ostringstream csv;
  csv << "order,re,im,power\n";
  for (int k = -order; k <= order; ++k) {
    csv << k << ',' << format_double(c[k].real()) << ',' << format_double(c[k].imag()) << ','
        << format_double(std::norm(c[k])) << '\n';
  }
  ctx.emit(csv.str());
}

void classical_sweep(const Context& ctx) {
  const auto drive = drive_from(ctx);
  const auto grid = classical::half_period_grid(drive, ctx.integer("points"));
  ctx.emit(io::sweep_to_csv(classical::tau_sweep(drive, grid)));
}

void suppression_to_tau(const Context& ctx) {
  const auto drive = drive_from(ctx);
  std::ostringstream csv;
  csv << "contrast_dbc,tau_s,status\n";
  const auto row = [&](double contrast, const classical::DelayEstimate& est) {
    csv << format_double(contrast) << ',' << format_double(est.tau_s) << ','
        << (est.at_floor ? "floor" : "ok") << '\n';
  };
  if (ctx.has("contrast_dbc") == ctx.has("in")) {
    throw ConfigError("give exactly one of --contrast-dbc and --in");
  }
  if (ctx.has("contrast_dbc")) {
    const double contrast = ctx.real("contrast_dbc");
    row(contrast, classical::invert_suppression(contrast, drive));
  } else {
    const auto table = io::parse_csv(io::read_file(ctx.text("in")));
    const std::size_t col = table.column("contrast_dbc");
    for (const auto& fields : table.rows) {
      const double contrast = io::parse_double(fields.at(col));
      try {
        row(contrast, classical::invert_suppression(contrast, drive));
      } catch (const DomainError&) {
        csv << format_double(contrast) << ",nan,out_of_range\n";
      }
    }
  }
  ctx.emit(csv.str());
}

void spectra_synth(const Context& ctx) {
  const auto drive = drive_from(ctx);
  if (!ctx.has("out")) throw ConfigError("--out (manifest path) is required");
  const int count = ctx.integer("count");
  if (count < 1) throw ConfigError("--count must be >= 1");
  const double t0 = ctx.real("tau_start_s");
  const double t1 = ctx.real("tau_end_s");
  const double interval = ctx.real("interval_s");
  const std::filesystem::path manifest = ctx.text("out");
  const auto dir = manifest.parent_path();
  const std::string stem = manifest.stem().string();

  std::vector<io::ManifestEntry> entries;
  for (int i = 0; i < count; ++i) {
    const double tau = count == 1 ? t0 : t0 + (t1 - t0) * i / (count - 1);
    const double ts = interval * i;
    const auto trace = classical::synthesize_trace(drive, tau, ts, ctx.integer("max_order"),
                                                   ctx.real("input_power_dbm"));
    const std::string name = stem + "_" + std::to_string(i) + ".csv";
    ctx.emit_file(dir / name, io::trace_to_csv(trace));
    entries.push_back({name, ts});
  }
  ctx.emit_file(manifest, io::manifest_to_json(entries));
}

void spectra_drift(const Context& ctx) {
  const auto drive = drive_from(ctx);
  const auto traces = io::read_trace_series(ctx.text("manifest"));
  classical::TraceLookup lookup;
  lookup.window_hz = ctx.real("window_hz");
  ctx.emit(io::drift_to_csv(classical::analyze_spectra_series(traces, drive, lookup)));
}

biphoton::DriveMode parse_mode(const std::string& mode) {
  if (mode == "none" || mode == "unmodulated") return biphoton::DriveMode::unmodulated;
  if (mode == "in-phase") return biphoton::DriveMode::in_phase;
  if (mode == "out-of-phase") return biphoton::DriveMode::out_of_phase;
  throw ConfigError("--mode must be none, in-phase or out-of-phase, got '" + mode + "'");
}

biphoton::MeasurementModel measurement_from(const Context& ctx) {
  biphoton::MeasurementModel model;
  model.passband_bins = ctx.integer("passband");
  model.filter_crosstalk = ctx.real("crosstalk");
  model.accidental_rate = ctx.real("accidentals");
  model.flux_scale = ctx.real("flux");
  model.validate();
  return model;
}

void jsi(const Context& ctx) {
  modeops::SinusoidDrive base;
  base.rf_frequency_hz = ctx.real("rf_frequency_hz");
  base.depth_rad = ctx.real("depth_rad");
  base.validate();
  const auto [signal_drive, idler_drive] = biphoton::drive_pair(parse_mode(ctx.text("mode")), base);
  const auto model = measurement_from(ctx);
  const auto scan =
      biphoton::ScanGeometry::centered(base.rf_frequency_hz, ctx.integer("bins"), ctx.real("bin_width_hz"));
  const int guard = modeops::TruncationPolicy::for_depth(base.depth_rad).guard_bins;
  const auto state = biphoton::make_source_state(model, scan, guard);
  const auto dist = delay_law(ctx);
  auto counts = biphoton::drift_averaged_jsi(state, signal_drive, idler_drive, dist, model,
                                             ctx.real("integration_s"), quad_points(ctx, dist), scan);
  if (ctx.flag("sample")) counts = biphoton::sample_counts(counts, ctx.seed());
  ctx.emit(io::jsi_to_csv(counts));
}

void jsi_fit(const Context& ctx) {
  const double spacing = ctx.real("rf_frequency_hz");
  const double width = ctx.real("bin_width_hz");
  const double integration = ctx.real("integration_s");
  const auto measured = io::jsi_from_csv(io::read_file(ctx.text("measured")), spacing, width, integration);
  const auto theory = io::jsi_from_csv(io::read_file(ctx.text("theory")), spacing, width, integration);
  const auto fit = biphoton::fit_theory(measured, theory);
  std::ostringstream csv;
  csv << "scale,offset,residual_rms,scale_stderr,offset_stderr\n"
      << format_double(fit.scale) << ',' << format_double(fit.offset) << ','
      << format_double(fit.residual_rms) << ',' << format_double(fit.scale_stderr) << ','
      << format_double(fit.offset_stderr) << '\n';
  ctx.emit(csv.str());
}

std::pair<int, int> dimension_range(const Context& ctx) {
  const auto [lo, hi] = parse_int_range(ctx.text("d"));
  if (lo < 1 || hi < lo) throw ConfigError("--d must be a range a..b with 1 <= a <= b");
  return {lo, hi};
}

void dft_fidelity(const Context& ctx) {
  const auto [d_lo, d_hi] = dimension_range(ctx);
  const auto [x_lo, x_hi] = parse_real_range(ctx.text("omega_tau"));
  if (!(x_hi >= x_lo)) throw ConfigError("--omega-tau range must be increasing");
  const int points = x_hi == x_lo ? 1 : ctx.integer("points");
  if (points < 1) throw ConfigError("--points must be >= 1");
  const std::string method = ctx.text("method");
  if (method != "closed-form" && method != "matrix") {
    throw ConfigError("--method must be closed-form or matrix");
  }
  std::ostringstream csv;
  csv << "d,omega_tau,fidelity\n";
  for (int d = d_lo; d <= d_hi; ++d) {
    const auto gate = qfp::dft_matrix(d);
    for (int i = 0; i < points; ++i) {
      const double x = points == 1 ? x_lo : x_lo + (x_hi - x_lo) * i / (points - 1);
      const double f = method == "matrix" ? qfp::matrix_fidelity(gate, qfp::shifted_gate(gate, x))
                                          : qfp::dft_fidelity_closed_form(d, x);
      csv << d << ',' << format_double(x) << ',' << format_double(f) << '\n';
    }
  }
  ctx.emit(csv.str());
}

void max_delay(const Context& ctx) {
  const auto [d_lo, d_hi] = dimension_range(ctx);
  const double threshold = ctx.real("threshold");
  const double omega = kTwoPi * ctx.real("rf_frequency_hz");
  std::ostringstream csv;
  csv << "d,threshold,tau_s,saturated\n";
  for (int d = d_lo; d <= d_hi; ++d) {
    const auto bound = qfp::max_tolerable_delay(d, threshold, omega);
    csv << d << ',' << format_double(threshold) << ',' << format_double(bound.tau_s) << ','
        << (bound.saturated ? 1 : 0) << '\n';
  }
  ctx.emit(csv.str());
}

void drift_channel(const Context& ctx) {
  const double omega = kTwoPi * ctx.real("rf_frequency_hz");
  qfp::DensityMatrix rho = qfp::DensityMatrix::maximally_mixed(1);
  if (ctx.has("state")) {
    rho = io::density_matrix_from_json(io::read_file(ctx.text("state")));
  } else {
    const int d = ctx.integer("d");
    if (d < 1) throw ConfigError("--d must be >= 1");
    rho = qfp::DensityMatrix::pure(Eigen::VectorXcd::Ones(d));
  }
  const auto dist = delay_law(ctx);
  const auto sigma =
      qfp::drift_channel(rho, qfp::dft_matrix(rho.dim()), dist, omega, quad_points(ctx, dist));
  ctx.emit(io::to_json(sigma) + "\n");
}

}  // namespace

const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> table = {
      {"eopm-coeffs",
       "Fourier coefficients c_k of a sinusoidally driven modulator",
       {rf_option(), depth_option(), {"delay_s", ValueType::real, 0.0, "drive delay"},
        {"max_order", ValueType::integer, 0, "largest |k| (0: truncation policy)"}},
       eopm_coeffs},
      {"classical-sweep",
       "Two-modulator cancellation contrast over delays in (0, T/2]",
       {rf_option(), depth_option(), {"points", ValueType::integer, 500, "number of delays"}},
       classical_sweep},
      {"suppression-to-tau",
       "Delay implied by a sideband contrast (single value or a CSV column)",
       {rf_option(), depth_option(), {"contrast_dbc", ValueType::real, nullptr, "contrast in dBc"},
        {"in", ValueType::text, nullptr, "CSV with a contrast_dbc column"}},
       suppression_to_tau},
      {"spectra-synth",
       "Synthetic spectrum traces for a linear delay ramp, with a manifest",
       {rf_option(), depth_option(), {"count", ValueType::integer, 10, "number of traces"},
        {"tau_start_s", ValueType::real, 0.0, "first delay"},
        {"tau_end_s", ValueType::real, 0.5e-12, "last delay"},
        {"interval_s", ValueType::real, 60.0, "time between traces"},
        {"max_order", ValueType::integer, 5, "largest sideband order written"},
        {"input_power_dbm", ValueType::real, 0.0, "carrier power without modulation"}},
       spectra_synth},
      {"spectra-drift",
       "Contrast and inferred delay for each trace of a manifest",
       {rf_option(), depth_option(), {"manifest", ValueType::text, nullptr, "trace manifest JSON"},
        {"window_hz", ValueType::real, 2e9, "integration window around each line"}},
       spectra_drift},
      {"jsi",
       "Expected (or sampled) coincidence counts on the bin scan",
       join({rf_option(), depth_option(),
             {"mode", ValueType::text, "none", "none, in-phase or out-of-phase"},
             {"bins", ValueType::integer, 9, "scan bins per arm"},
             {"bin_width_hz", ValueType::real, 12e9, "filter bandwidth"},
             {"passband", ValueType::integer, 7, "source passband in bins (0: broadband)"},
             {"crosstalk", ValueType::real, 0.02, "adjacent-bin filter leakage"},
             {"accidentals", ValueType::real, 0.0, "accidental rate per bin pair (1/s)"},
             {"flux", ValueType::real, 1e3, "pair flux (1/s)"},
             {"integration_s", ValueType::real, 2.0, "integration time"},
             {"sample", ValueType::boolean, false, "draw Poisson counts using --seed"}},
            drift_options()),
       jsi},
      {"jsi-fit",
       "Least-squares scale and offset of a measured JSI against theory",
       {rf_option(), {"bin_width_hz", ValueType::real, 12e9, "filter bandwidth"},
        {"integration_s", ValueType::real, 2.0, "integration time"},
        {"measured", ValueType::text, nullptr, "measured JSI CSV"},
        {"theory", ValueType::text, nullptr, "theory JSI CSV"}},
       jsi_fit},
      {"dft-fidelity",
       "DFT gate fidelity against the delay phase Omega tau",
       {{"d", ValueType::text, "2..10", "dimension range"},
        {"omega_tau", ValueType::text, "0..0.25pi", "phase range (accepts a pi suffix)"},
        {"points", ValueType::integer, 101, "phases per dimension"},
        {"method", ValueType::text, "closed-form", "closed-form or matrix"}},
       dft_fidelity},
      {"max-delay",
       "Largest delay keeping the DFT fidelity above a threshold",
       {rf_option(), {"d", ValueType::text, "2..10", "dimension range"},
        {"threshold", ValueType::real, 0.998, "fidelity threshold"}},
       max_delay},
      {"drift-channel",
       "Density matrix after a DFT gate under a delay law",
       join({rf_option(), {"d", ValueType::integer, 2, "dimension of the default |+> input"},
             {"state", ValueType::text, nullptr, "input density matrix JSON"}},
            drift_options()),
       drift_channel},
  };
  return table;
}

}  // namespace fbsync::cli
