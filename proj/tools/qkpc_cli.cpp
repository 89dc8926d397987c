// qkpc: command-line front end for the keyless-private-communication
// capacity library. Every subcommand is deterministic given its flags (and
// seed, where randomness is involved) and writes a tidy table in CSV or JSON
// together with a `<out>.manifest.json` describing the run.
//
// Exit codes: 0 success, 2 usage error, 3 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkpc/capacity.hpp"
#include "qkpc/detector.hpp"
#include "qkpc/protocol.hpp"
#include "qkpc/sky_background.hpp"
#include "qkpc/table_io.hpp"

namespace {

using namespace qkpc;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

const std::string kNotApplicable = "na";

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int count = 50;
  bool log_spaced = false;
};

// "lo:hi" or "lo:hi:n"; a degenerate lo==hi range yields a single point.
Range parse_range(const std::string& text, bool log_spaced) {
  Range r;
  r.log_spaced = log_spaced;
  std::istringstream in(text);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(in, part, ':')) {
    parts.push_back(part);
  }
  if (parts.size() < 2 || parts.size() > 3) {
    throw CLI::ValidationError("range must be lo:hi or lo:hi:n, got '" + text + "'");
  }
  r.lo = std::stod(parts[0]);
  r.hi = std::stod(parts[1]);
  if (parts.size() == 3) {
    r.count = std::stoi(parts[2]);
  }
  if (r.count < 1 || r.hi < r.lo) {
    throw CLI::ValidationError("bad range '" + text + "'");
  }
  return r;
}

std::vector<double> expand(const Range& r) {
  if (r.lo == r.hi || r.count == 1) {
    return {r.lo};
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(r.count));
  if (r.log_spaced) {
    if (!(r.lo > 0.0)) {
      throw CLI::ValidationError("log-spaced range needs positive endpoints");
    }
    const double llo = std::log(r.lo);
    const double lhi = std::log(r.hi);
    for (int i = 0; i < r.count; ++i) {
      out.push_back(std::exp(llo + (lhi - llo) * i / (r.count - 1)));
    }
  } else {
    for (int i = 0; i < r.count; ++i) {
      out.push_back(r.lo + (r.hi - r.lo) * i / (r.count - 1));
    }
  }
  return out;
}

std::string resolve_out_path(const std::string& out) {
  if (out.empty()) {
    return out;
  }
  std::filesystem::path p(out);
  if (p.is_absolute()) {
    return out;
  }
  const char* dir = std::getenv("QKPC_OUT_DIR");
  if (dir == nullptr || *dir == '\0') {
    return out;
  }
  return (std::filesystem::path(dir) / p).string();
}

// Flat key-value constraint file; keys mirror the optimizer bounds, angles
// in degrees like the rest of the CLI surface.
OptimizerConstraints load_constraints(const std::string& path, Scheme scheme) {
  OptimizerConstraints c = OptimizerConstraints::defaults_for(scheme);
  std::ifstream in(path);
  if (!in) {
    throw CLI::ValidationError("cannot open constraints file: " + path);
  }
  std::string key;
  while (in >> key) {
    if (key.empty() || key[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    double value = 0.0;
    if (!(in >> value)) {
      throw CLI::ValidationError("constraints file: missing value for key " + key);
    }
    if (key == "min_mean_photons") {
      c.min_mean_photons = value;
    } else if (key == "max_mean_photons") {
      c.max_mean_photons = value;
    } else if (key == "max_threshold_k") {
      c.max_threshold_k = static_cast<int>(value);
    } else if (key == "min_theta_deg") {
      c.min_theta = degrees_to_radians(value);
    } else if (key == "max_theta_deg") {
      c.max_theta = degrees_to_radians(value);
    } else if (key == "optimize_q0") {
      c.optimize_q0 = value != 0.0;
    } else {
      throw CLI::ValidationError("constraints file: unknown key " + key);
    }
  }
  return c;
}

void emit(const std::string& out, const std::string& format, const Table& table,
          RunManifest manifest) {
  const std::string path = resolve_out_path(out);
  if (path.empty()) {
    std::cout << (format == "json" ? to_json(table) : to_csv(table));
    return;
  }
  write_table_with_manifest(path, format, table, std::move(manifest));
}

std::vector<TableValue> capacity_row(double gamma, double delta,
                                     const CapacityResult& r, bool failed,
                                     bool full_record) {
  std::vector<TableValue> row;
  row.push_back(TableValue::number(gamma));
  row.push_back(TableValue::number(delta));
  row.push_back(TableValue::text(std::string(scheme_name(r.scheme))));
  if (failed) {
    const std::size_t tail = full_record ? 8 : 5;
    for (std::size_t i = 0; i < tail; ++i) {
      row.push_back(TableValue::text(kNotApplicable));
    }
    return row;
  }
  row.push_back(TableValue::number(r.c_p));
  if (full_record) {
    row.push_back(TableValue::number(r.i_bob));
    row.push_back(TableValue::number(r.i_eve));
  }
  if (const OokParams* p = std::get_if<OokParams>(&r.best_params)) {
    row.push_back(TableValue::number(p->mean_photons));
    row.push_back(TableValue::integer(p->threshold_k));
    row.push_back(TableValue::text(kNotApplicable));
    row.push_back(TableValue::text(kNotApplicable));
    if (full_record) row.push_back(TableValue::number(p->q0));
  } else {
    const PmParams& pm = std::get<PmParams>(r.best_params);
    row.push_back(TableValue::number(pm.mean_photons));
    row.push_back(TableValue::text(kNotApplicable));
    row.push_back(TableValue::number(radians_to_degrees(pm.theta)));
    row.push_back(TableValue::number(pm.kappa));
    if (full_record) row.push_back(TableValue::number(pm.q0));
  }
  return row;
}

struct CommonOutputFlags {
  std::string out;
  std::string format = "csv";

  void attach(CLI::App* cmd) {
    cmd->add_option("--out", out, "output file (default: stdout, no manifest)");
    cmd->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  }
};

int run(int argc, char** argv) {
  CLI::App app{"private capacity of keyless quantum communication over noisy links"};
  app.require_subcommand(1);

  // ---- qber-curve ----
  auto* curve_cmd = app.add_subcommand(
      "qber-curve", "QBER vs received photon number, analytic and Monte Carlo");
  std::string curve_scheme = "ook";
  std::string curve_alpha2_range = "0.1:20:40";
  double curve_delta = 0.03;
  double curve_eta = 1.0;
  std::vector<int> curve_ks{1, 2, 3};
  std::vector<double> curve_thetas_deg{90.0};
  double curve_kappa = 1.0;
  std::vector<double> curve_gammas;
  bool curve_mc = false;
  std::uint64_t curve_seed = 0;
  std::int64_t curve_pulses = 200000;
  int curve_reps = 5;
  CommonOutputFlags curve_out;
  curve_cmd->add_option("--scheme", curve_scheme, "ook or pm")
      ->check(CLI::IsMember({"ook", "pm"}));
  curve_cmd->add_option("--alpha2-range", curve_alpha2_range,
                        "received photons eta*|alpha|^2, lo:hi[:n]");
  curve_cmd->add_option("--delta", curve_delta, "noise clicks per pulse per detector");
  curve_cmd->add_option("--eta", curve_eta, "link efficiency");
  curve_cmd->add_option("--k-list", curve_ks, "OOK thresholds")->delimiter(',');
  curve_cmd->add_option("--theta-list", curve_thetas_deg, "PM angles in degrees")
      ->delimiter(',');
  curve_cmd->add_option("--kappa", curve_kappa, "PM photon ratio");
  curve_cmd->add_option("--gamma-list", curve_gammas, "Eve curves to add")
      ->delimiter(',');
  curve_cmd->add_flag("--monte-carlo", curve_mc, "add simulated series");
  curve_cmd->add_option("--seed", curve_seed, "master seed for the simulation");
  curve_cmd->add_option("--pulses", curve_pulses, "pulses per Monte Carlo repetition");
  curve_cmd->add_option("--repetitions", curve_reps, "Monte Carlo repetitions");
  curve_out.attach(curve_cmd);

  // ---- capacity ----
  auto* cap_cmd = app.add_subcommand("capacity", "optimized private capacity at one point");
  std::string cap_scheme = "ook-k1";
  double cap_gamma = 0.1;
  double cap_delta = 0.0;
  double cap_eta = 1.0;
  std::string cap_constraints;
  bool cap_literal_eve = false;
  CommonOutputFlags cap_out;
  cap_cmd->add_option("--scheme", cap_scheme, "ook-k1 | ook-pnr | pm | pm-constrained | usd")
      ->check(CLI::IsMember({"ook-k1", "ook-pnr", "pm", "pm-constrained", "usd"}));
  cap_cmd->add_option("--gamma", cap_gamma, "Eve's intercepted fraction");
  cap_cmd->add_option("--delta", cap_delta, "noise clicks per pulse per detector");
  cap_cmd->add_option("--eta", cap_eta, "link efficiency");
  cap_cmd->add_option("--constraints", cap_constraints, "key-value constraints file");
  cap_cmd->add_flag("--eve-literal-pm-bound", cap_literal_eve,
                    "drop eta from Eve's efficiency (the literal PM bound)");
  cap_out.attach(cap_cmd);

  // ---- heatmap ----
  auto* heat_cmd = app.add_subcommand(
      "heatmap", "capacity sweep over (gamma, delta), row-major with gamma outer");
  std::string heat_scheme = "ook-pnr";
  std::vector<double> heat_gammas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::string heat_delta_range = "1e-6:100:25";
  std::vector<double> heat_deltas;
  std::string heat_constraints;
  int heat_threads = 0;
  CommonOutputFlags heat_out;
  heat_cmd->add_option("--scheme", heat_scheme)
      ->check(CLI::IsMember({"ook-k1", "ook-pnr", "pm", "pm-constrained", "usd"}));
  heat_cmd->add_option("--gamma-list", heat_gammas, "gamma grid")->delimiter(',');
  heat_cmd->add_option("--delta-range", heat_delta_range, "log-spaced lo:hi[:n]");
  heat_cmd->add_option("--delta-list", heat_deltas, "explicit delta grid")->delimiter(',');
  heat_cmd->add_option("--constraints", heat_constraints, "key-value constraints file");
  heat_cmd->add_option("--threads", heat_threads, "worker threads (0 = auto)");
  heat_out.attach(heat_cmd);

  // ---- usd ----
  auto* usd_cmd = app.add_subcommand(
      "usd", "unambiguous-discrimination capacity vs the minimum-error benchmark");
  double usd_gamma = 0.1;
  std::string usd_range = "0.05:100:50";
  CommonOutputFlags usd_out;
  usd_cmd->add_option("--gamma", usd_gamma);
  usd_cmd->add_option("--alpha2-range", usd_range, "received photons, log-spaced lo:hi[:n]");
  usd_out.attach(usd_cmd);

  // ---- detector-loss ----
  auto* loss_cmd = app.add_subcommand(
      "detector-loss", "photons lost to interval collisions in the time-multiplexed readout");
  int loss_n = 250;
  std::string loss_range = "0:50:51";
  CommonOutputFlags loss_out;
  loss_cmd->add_option("--n", loss_n, "number of measurement intervals");
  loss_cmd->add_option("--alpha2-range", loss_range, "mean photons, lo:hi[:n]");
  loss_out.attach(loss_cmd);

  // ---- background ----
  auto* bg_cmd = app.add_subcommand("background", "sky-background noise photons per pulse");
  std::string bg_preset;
  SkyScene bg_scene;
  CommonOutputFlags bg_out;
  bg_cmd->add_option("--preset", bg_preset, "'table1' emits the six weather rows")
      ->check(CLI::IsMember({"table1"}));
  bg_cmd->add_option("--brightness", bg_scene.brightness, "W m^-2 sr^-1 um^-1");
  bg_cmd->add_option("--fov-half-angle", bg_scene.fov_half_angle, "radians");
  bg_cmd->add_option("--aperture-area", bg_scene.aperture_area, "m^2");
  bg_cmd->add_option("--filter-bandwidth", bg_scene.filter_bandwidth, "um");
  bg_cmd->add_option("--wavelength", bg_scene.wavelength, "m");
  bg_cmd->add_option("--gate-time", bg_scene.gate_time, "s");
  bg_out.attach(bg_cmd);

  // ---- simulate ----
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo transmission, QBER report");
  std::string sim_scheme = "ook";
  double sim_alpha2 = 1.0;
  int sim_k = 1;
  double sim_theta_deg = 90.0;
  double sim_kappa = 1.0;
  double sim_q0 = 0.5;
  double sim_eta = 1.0;
  double sim_delta = 0.03;
  double sim_gamma = 0.1;
  std::int64_t sim_pulses = 500000;
  int sim_reps = 10;
  std::uint64_t sim_seed = 0;
  std::string sim_sampling = "ideal";
  std::string sim_detector = "experiment";
  CommonOutputFlags sim_out;
  sim_cmd->add_option("--scheme", sim_scheme, "ook or pm")
      ->check(CLI::IsMember({"ook", "pm"}));
  sim_cmd->add_option("--alpha2", sim_alpha2, "|alpha|^2 at the channel input");
  sim_cmd->add_option("--k", sim_k, "OOK threshold");
  sim_cmd->add_option("--theta", sim_theta_deg, "PM angle in degrees");
  sim_cmd->add_option("--kappa", sim_kappa, "PM photon ratio");
  sim_cmd->add_option("--q0", sim_q0, "input prior of bit 0");
  sim_cmd->add_option("--eta", sim_eta);
  sim_cmd->add_option("--delta", sim_delta);
  sim_cmd->add_option("--gamma", sim_gamma);
  sim_cmd->add_option("--pulses", sim_pulses, "pulses per repetition");
  sim_cmd->add_option("--repetitions", sim_reps);
  sim_cmd->add_option("--seed", sim_seed);
  sim_cmd->add_option("--sampling", sim_sampling, "ideal | intervals | deadtime")
      ->check(CLI::IsMember({"ideal", "intervals", "deadtime"}));
  sim_cmd->add_option("--detector", sim_detector, "experiment (45 ns) or paper-appendix (40 ns)")
      ->check(CLI::IsMember({"experiment", "paper-appendix"}));
  sim_out.attach(sim_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse diagnostic
    return code == 0 ? 0 : kExitUsage;
  }

  auto manifest_for = [&](const CLI::App* cmd, bool has_seed, std::uint64_t seed) {
    RunManifest m;
    m.command = cmd->get_name();
    for (const CLI::Option* opt : cmd->get_options()) {
      if (opt->count() > 0 && !opt->get_name().empty()) {
        m.parameters.emplace_back(opt->get_name(),
                                  opt->results().empty() ? "true" : opt->results().front());
      }
    }
    m.has_seed = has_seed;
    m.seed = seed;
    return m;
  };

  if (curve_cmd->parsed()) {
    QberCurveRequest req;
    req.pm = curve_scheme == "pm";
    req.eta_alpha2_values = expand(parse_range(curve_alpha2_range, false));
    req.env.eta = curve_eta;
    req.env.delta = curve_delta;
    req.thresholds = curve_ks;
    for (double deg : curve_thetas_deg) {
      req.thetas.push_back(degrees_to_radians(deg));
    }
    req.kappa = curve_kappa;
    req.eve_gammas = curve_gammas;
    req.monte_carlo = curve_mc;
    req.mc_pulses = curve_pulses;
    req.mc_repetitions = curve_reps;
    req.seed = curve_seed;

    Table table;
    table.columns = {"series", "eta_alpha2", "qber", "qber_stddev"};
    for (const QberCurvePoint& p : qber_curve(req)) {
      table.add_row({TableValue::text(p.series), TableValue::number(p.eta_alpha2),
                     TableValue::number(p.qber),
                     p.monte_carlo ? TableValue::number(p.qber_stddev)
                                   : TableValue::text(kNotApplicable)});
    }
    emit(curve_out.out, curve_out.format, table,
         manifest_for(curve_cmd, curve_mc, curve_seed));
    return 0;
  }

  if (cap_cmd->parsed()) {
    const Scheme scheme = *parse_scheme(cap_scheme);
    LinkEnvironment env;
    env.gamma = cap_gamma;
    env.delta = cap_delta;
    env.eta = cap_eta;
    env.eve_includes_receiver_efficiency = !cap_literal_eve;
    std::optional<OptimizerConstraints> constraints;
    if (!cap_constraints.empty()) {
      constraints = load_constraints(cap_constraints, scheme);
    }
    const CapacityResult r = optimize_private_capacity(scheme, env, constraints);
    Table table;
    table.columns = {"gamma", "delta", "scheme", "c_p",       "i_bob", "i_eve",
                     "alpha2", "k",     "theta_deg", "kappa", "q0"};
    table.add_row(capacity_row(cap_gamma, cap_delta, r, false, true));
    emit(cap_out.out, cap_out.format, table, manifest_for(cap_cmd, false, 0));
    return 0;
  }

  if (heat_cmd->parsed()) {
    SweepGrid grid;
    grid.scheme = *parse_scheme(heat_scheme);
    grid.gamma_values = heat_gammas;
    grid.delta_values =
        heat_deltas.empty() ? expand(parse_range(heat_delta_range, true)) : heat_deltas;
    if (!heat_constraints.empty()) {
      grid.constraints = load_constraints(heat_constraints, grid.scheme);
    }
    const std::vector<SweepCell> cells = capacity_sweep(grid, heat_threads);
    Table table;
    table.columns = {"gamma", "delta", "scheme", "c_p", "alpha2", "k", "theta_deg", "kappa"};
    int failures = 0;
    for (const SweepCell& cell : cells) {
      if (cell.failed) {
        ++failures;
      }
      table.add_row(capacity_row(cell.gamma, cell.delta, cell.result, cell.failed, false));
    }
    emit(heat_out.out, heat_out.format, table, manifest_for(heat_cmd, false, 0));
    if (failures > 0) {
      std::cerr << "warning: " << failures << " sweep cell(s) failed\n";
    }
    return 0;
  }

  if (usd_cmd->parsed()) {
    Table table;
    table.columns = {"eta_alpha2", "c_p_usd", "c_p_pm_min_error"};
    for (double s : expand(parse_range(usd_range, true))) {
      table.add_row({TableValue::number(s),
                     TableValue::number(usd_capacity_at_photons(s, usd_gamma)),
                     TableValue::number(pm_minimum_error_capacity_at_photons(s, usd_gamma))});
    }
    emit(usd_out.out, usd_out.format, table, manifest_for(usd_cmd, false, 0));
    return 0;
  }

  if (loss_cmd->parsed()) {
    Table table;
    table.columns = {"alpha2", "interval_click_prob", "lost_exact", "lost_truncated"};
    for (double a2 : expand(parse_range(loss_range, false))) {
      table.add_row({TableValue::number(a2),
                     TableValue::number(interval_click_prob(a2, loss_n).value()),
                     TableValue::number(expected_lost_photons(a2, loss_n)),
                     TableValue::number(expected_lost_photons_truncated(a2, loss_n))});
    }
    emit(loss_out.out, loss_out.format, table, manifest_for(loss_cmd, false, 0));
    return 0;
  }

  if (bg_cmd->parsed()) {
    Table table;
    table.columns = {"conditions", "relative_brightness", "brightness",
                     "delta_photons_per_pulse"};
    if (bg_preset == "table1") {
      for (const SkyConditionRow& row : sky_condition_table()) {
        const SkyScene scene = sky_condition_scene(row);
        table.add_row({TableValue::text(row.conditions),
                       TableValue::number(row.relative_brightness),
                       TableValue::number(row.brightness),
                       TableValue::number(photons_per_pulse(scene).value())});
      }
    } else {
      table.add_row({TableValue::text("custom"), TableValue::text(kNotApplicable),
                     TableValue::number(bg_scene.brightness),
                     TableValue::number(photons_per_pulse(bg_scene).value())});
    }
    emit(bg_out.out, bg_out.format, table, manifest_for(bg_cmd, false, 0));
    return 0;
  }

  if (sim_cmd->parsed()) {
    TransmissionConfig cfg;
    if (sim_scheme == "ook") {
      OokParams p;
      p.mean_photons = sim_alpha2;
      p.threshold_k = sim_k;
      p.q0 = sim_q0;
      cfg.params = p;
    } else {
      PmParams p;
      p.mean_photons = sim_alpha2;
      p.theta = degrees_to_radians(sim_theta_deg);
      p.kappa = sim_kappa;
      p.q0 = sim_q0;
      cfg.params = p;
    }
    cfg.env.eta = sim_eta;
    cfg.env.delta = sim_delta;
    cfg.env.gamma = sim_gamma;
    cfg.detector = sim_detector == "paper-appendix" ? DetectorModel::paper_appendix()
                                                    : DetectorModel::experiment_default();
    cfg.sampling = sim_sampling == "ideal"       ? SamplingMode::kIdealPnr
                   : sim_sampling == "intervals" ? SamplingMode::kIntervalModel
                                                 : SamplingMode::kDeadTime;
    cfg.n_pulses = sim_pulses;
    cfg.repetitions = sim_reps;
    cfg.seed = sim_seed;
    const TransmissionReport rep = run_transmission(cfg);

    Table table;
    table.columns = {"row",   "qber",  "qber_stddev", "mean_clicks_per_pulse",
                     "eps00", "eps01", "eps10",       "eps11"};
    table.add_row({TableValue::text("summary"), TableValue::number(rep.qber_mean),
                   TableValue::number(rep.qber_stddev),
                   TableValue::number(rep.mean_clicks_per_pulse),
                   TableValue::number(rep.confusion.eps00),
                   TableValue::number(rep.confusion.eps01),
                   TableValue::number(rep.confusion.eps10),
                   TableValue::number(rep.confusion.eps11)});
    for (std::size_t i = 0; i < rep.per_repetition.size(); ++i) {
      table.add_row({TableValue::text("rep" + std::to_string(i)),
                     TableValue::number(rep.per_repetition[i]),
                     TableValue::text(kNotApplicable), TableValue::text(kNotApplicable),
                     TableValue::text(kNotApplicable), TableValue::text(kNotApplicable),
                     TableValue::text(kNotApplicable), TableValue::text(kNotApplicable)});
    }
    emit(sim_out.out, sim_out.format, table, manifest_for(sim_cmd, true, sim_seed));
    return 0;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError&) {
    // CLI11_PARSE handles these inside run(); anything escaping here is a
    // validation error raised after parsing.
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
