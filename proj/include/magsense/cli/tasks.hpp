#pragma once

// Task implementations behind the command-line tool. Each task turns a
// scenario into one or more named tables.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "magsense/contour.hpp"
#include "magsense/dynamics.hpp"
#include "magsense/io/config.hpp"
#include "magsense/io/envelope.hpp"
#include "magsense/model.hpp"
#include "magsense/monte_carlo.hpp"
#include "magsense/reconstruction.hpp"
#include "magsense/sensing.hpp"
#include "magsense/series.hpp"
#include "magsense/spectra.hpp"

namespace magsense::cli {

using io::Cell;
using io::Column;
using io::Table;

struct Artifact {
  std::string name;  // file stem
  Table table;
};

/// Effective RNG seed: command line beats the config block.
struct RunOptions {
  std::optional<std::uint64_t> seed;
};

inline std::uint64_t effective_seed(const io::ScenarioConfig& cfg, const RunOptions& opt) {
  if (opt.seed) return *opt.seed;
  if (cfg.monte_carlo) return cfg.monte_carlo->seed;
  return 0;
}

inline std::string psd_unit(SpectrumUnits u) { return std::string(to_string(u)); }

inline double psd_scale(const SystemParams& p, SpectrumUnits u) {
  return u == SpectrumUnits::epsilon_normalized ? p.epsilon_b * p.epsilon_b : 1.0;
}

inline void describe_system(Table& t, const SystemParams& p) {
  auto f = io::format_double;
  t.meta("omega_a", f(p.omega_a) + " rad/s");
  t.meta("omega_m", f(p.omega_m) + " rad/s");
  t.meta("kappa_a", f(p.kappa_a) + " rad/s");
  t.meta("kappa_m", f(p.kappa_m) + " rad/s");
  t.meta("g_am", f(p.g_am) + " rad/s");
  t.meta("epsilon_b", f(p.epsilon_b) + " rad/(s*T)");
  t.meta("gamma", f(p.gamma_gyro) + " rad/(s*T)");
  t.meta("temperature", f(p.temperature) + " K");
  t.meta("n_spheres", std::to_string(p.n_spheres));
  t.meta("bath_squeeze", "r=" + f(p.bath_squeeze.r) + " theta=" + f(p.bath_squeeze.theta));
  t.meta("pre_squeeze", "r=" + f(p.pre_squeeze.r) + " theta=" + f(p.pre_squeeze.theta));
  t.meta("pulse_phase", f(p.pulse_phase) + " rad");
}

inline double require_t_m(const io::ScenarioConfig& cfg) {
  if (!cfg.t_m) throw io::SchemaError("transient.t_m", 0, "required by this task");
  if (!(*cfg.t_m > 0.0)) throw io::SchemaError("transient.t_m", 0, "must be positive");
  return *cfg.t_m;
}

// ---- steady-spectrum ----------------------------------------------------

inline std::vector<Artifact> steady_spectrum_task(const io::ScenarioConfig& cfg) {
  const SystemParams& p = cfg.system;
  validate(p);
  const double k = psd_scale(p, cfg.output.units);
  const std::string u = psd_unit(cfg.output.units);
  Table t;
  describe_system(t, p);
  t.meta("signal_psd", io::format_double(cfg.signal_psd) + " T^2/Hz");
  t.columns = {{"channel", ""},        {"omega", "rad/s"},  {"omega_over_kappa_m", ""},
               {"S_total", u},         {"S_signal", u},     {"S_magnon", u},
               {"S_cavity", u},        {"S_r", ""}};
  for (Channel c : cfg.channels) {
    const SpectrumSeries s = p.n_spheres == 1 ? stationary_psd(p, cfg.grid, c, cfg.signal_psd)
                                              : nsphere_psd(p, cfg.grid, c, cfg.signal_psd);
    const auto& sig = s.component("signal");
    const auto& mag = s.component("magnon");
    const auto& cav = s.component("cavity");
    for (std::size_t i = 0; i < s.size(); ++i) {
      t.add_row({std::string(to_string(c)), s.omega[i], s.omega[i] / p.kappa_m, k * s.values[i],
                 k * sig[i], k * mag[i], k * cav[i], cav[i] / mag[i]});
    }
  }
  return {{"steady-spectrum", std::move(t)}};
}

// ---- transient-spectrum -------------------------------------------------

inline std::vector<Artifact> transient_spectrum_task(const io::ScenarioConfig& cfg,
                                                     const RunOptions& opt) {
  const SystemParams& p = cfg.system;
  validate(p);
  const double t_m = require_t_m(cfg);
  const double k = psd_scale(p, cfg.output.units);
  const std::string u = psd_unit(cfg.output.units);
  const Matrix4 sigma = prepared_state(p).sigma;
  const double gbz = longitudinal_phase(p, cfg.pulse);

  Table t;
  describe_system(t, p);
  t.meta("t_m", io::format_double(t_m) + " s");
  t.meta("kappa_m_t_m", io::format_double(p.kappa_m * t_m));
  t.meta("pulse", "b0_x=" + io::format_double(cfg.pulse.b0_x) + " b0_y=" +
                      io::format_double(cfg.pulse.b0_y) + " b0_z=" +
                      io::format_double(cfg.pulse.b0_z) + " T*s");
  t.meta("gamma_bz", io::format_double(gbz));
  t.columns = {{"channel", ""},     {"omega", "rad/s"}, {"omega_over_kappa_m", ""},
               {"S_noise", u},      {"S_transient", u}, {"S_magnon", u},
               {"S_cavity", u},     {"S_signal", u}};
  const bool mc = cfg.monte_carlo.has_value();
  MonteCarloOptions mco;
  if (mc) {
    mco = *cfg.monte_carlo;
    mco.seed = effective_seed(cfg, opt);
    t.meta("monte_carlo", "n_traj=" + std::to_string(mco.n_traj) + " step_divisor=" +
                              io::format_double(mco.step_divisor) + " window_span=" +
                              io::format_double(mco.window_span));
    for (const char* name : {"mc_noise", "mc_std_error", "mc_signal", "mc_total"}) {
      t.columns.push_back({name, u});
    }
  }
  std::optional<TrajectoryEnsemble> ensemble;
  if (mc) ensemble = TrajectoryEnsemble::simulate(p, t_m, cfg.grid, mco);
  for (Channel c : cfg.channels) {
    const SpectrumSeries s = transient_noise_psd(p, sigma, gbz, t_m, cfg.grid, c);
    const double amp = channel_amplitude(p, cfg.pulse, c);
    const double signal = amp * amp / t_m;
    std::optional<SpectrumSeries> m;
    if (ensemble) m = ensemble->spectrum(cfg.pulse, c);
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::vector<Cell> row{std::string(to_string(c)), s.omega[i], s.omega[i] / p.kappa_m,
                            k * s.values[i], k * s.component("transient")[i],
                            k * s.component("magnon")[i], k * s.component("cavity")[i],
                            k * signal};
      if (m) {
        row.push_back(k * m->component("noise")[i]);
        row.push_back(k * m->std_error[i]);
        row.push_back(k * m->component("signal")[i]);
        row.push_back(k * m->component("total")[i]);
      }
      t.add_row(std::move(row));
    }
  }
  return {{"transient-spectrum", std::move(t)}};
}

// ---- noise-ratio --------------------------------------------------------

/// Cavity-added over magnon-input noise per channel, including squeezing and
/// unequal occupations.
inline double component_noise_ratio(const SystemParams& p, double omega, Channel c) {
  return stationary_cavity_term(p, omega, c) / stationary_magnon_term(p);
}

struct RatioMap {
  std::vector<double> omega;
  std::vector<double> axis;  // rad/s
  std::vector<std::vector<double>> values_x;  // [axis][omega]
  std::vector<std::vector<double>> values_y;
};

inline RatioMap noise_ratio_map(const SystemParams& base, const std::vector<double>& omega,
                                io::MapAxis which, const std::vector<double>& axis) {
  RatioMap m;
  m.omega = omega;
  m.axis = axis;
  for (double a : axis) {
    SystemParams p = base;
    (which == io::MapAxis::g_am ? p.g_am : p.kappa_a) = a;
    validate(p);
    std::vector<double> rx(omega.size()), ry(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i) {
      rx[i] = component_noise_ratio(p, omega[i], Channel::x);
      ry[i] = component_noise_ratio(p, omega[i], Channel::y);
    }
    m.values_x.push_back(std::move(rx));
    m.values_y.push_back(std::move(ry));
  }
  return m;
}

inline Table contour_table(const std::vector<std::pair<std::string, std::vector<Polyline>>>& sets,
                           const std::string& x_name, const std::string& y_name, double level) {
  Table t;
  t.meta("level", io::format_double(level));
  t.columns = {{"channel", ""}, {"line", ""}, {"point", ""}, {x_name, ""}, {y_name, ""}};
  for (const auto& [label, lines] : sets) {
    for (std::size_t l = 0; l < lines.size(); ++l) {
      for (std::size_t k = 0; k < lines[l].size(); ++k) {
        t.add_row({label, static_cast<std::int64_t>(l), static_cast<std::int64_t>(k), lines[l][k].x,
                   lines[l][k].y});
      }
    }
  }
  return t;
}

/// Heatmap table plus its level-set contour (both channels).
inline std::vector<Artifact> ratio_map_artifacts(const std::string& stem, const SystemParams& p,
                                                 const RatioMap& m, io::MapAxis which,
                                                 double level) {
  const std::string axis_name = which == io::MapAxis::g_am ? "g_am" : "kappa_a";
  const std::string axis_norm = axis_name + "_over_kappa_m";
  Table t;
  describe_system(t, p);
  t.meta("map_axis", axis_name);
  t.columns = {{"omega_over_kappa_m", ""}, {axis_norm, ""}, {"omega", "rad/s"},
               {axis_name, "rad/s"},       {"S_r_x", ""},   {"S_r_y", ""}};
  for (std::size_t j = 0; j < m.axis.size(); ++j) {
    for (std::size_t i = 0; i < m.omega.size(); ++i) {
      t.add_row({m.omega[i] / p.kappa_m, m.axis[j] / p.kappa_m, m.omega[i], m.axis[j],
                 m.values_x[j][i], m.values_y[j][i]});
    }
  }
  std::vector<Artifact> out{{stem, std::move(t)}};
  if (m.omega.size() >= 2 && m.axis.size() >= 2) {
    std::vector<double> xs, ys;
    for (double w : m.omega) xs.push_back(w / p.kappa_m);
    for (double a : m.axis) ys.push_back(a / p.kappa_m);
    Table c = contour_table({{"x", contour_lines(xs, ys, m.values_x, level)},
                             {"y", contour_lines(xs, ys, m.values_y, level)}},
                            "omega_over_kappa_m", axis_norm, level);
    out.push_back({stem + "_contour", std::move(c)});
  }
  return out;
}

inline std::vector<Artifact> noise_ratio_task(const io::ScenarioConfig& cfg) {
  const SystemParams& p = cfg.system;
  validate(p);
  if (cfg.map) {
    const RatioMap m = noise_ratio_map(p, cfg.grid, cfg.map->axis, cfg.map->values);
    return ratio_map_artifacts("noise-ratio", p, m, cfg.map->axis, cfg.map->level);
  }
  Table t;
  describe_system(t, p);
  t.columns = {{"omega", "rad/s"}, {"omega_over_kappa_m", ""}, {"S_r", ""},
               {"S_r_x", ""},      {"S_r_y", ""}};
  for (double w : cfg.grid) {
    t.add_row({w, w / p.kappa_m, noise_ratio(p, w), component_noise_ratio(p, w, Channel::x),
               component_noise_ratio(p, w, Channel::y)});
  }
  return {{"noise-ratio", std::move(t)}};
}

// ---- snr ----------------------------------------------------------------

inline std::vector<Artifact> snr_task(const io::ScenarioConfig& cfg) {
  const SystemParams& p = cfg.system;
  validate(p);
  Table t;
  describe_system(t, p);
  t.columns = {{"channel", ""}, {"omega", "rad/s"}, {"omega_over_kappa_m", ""}, {"R", ""},
               {"S_noise", "T^2/Hz"}};
  std::optional<Matrix4> sigma;
  if (cfg.snr_kind == io::SnrKind::transient) {
    const double t_m = require_t_m(cfg);
    sigma = prepared_state(p).sigma;
    t.meta("kind", "transient");
    t.meta("t_m", io::format_double(t_m) + " s");
    t.meta("gamma_bz", io::format_double(longitudinal_phase(p, cfg.pulse)));
  } else {
    t.meta("kind", "stationary");
    t.meta("signal_psd", io::format_double(cfg.signal_psd) + " T^2/Hz");
  }
  for (Channel c : cfg.channels) {
    const SnrSeries s = sigma ? transient_snr(p, *sigma, cfg.pulse, *cfg.t_m, cfg.grid, c)
                              : stationary_snr(p, cfg.signal_psd, cfg.grid, c);
    for (std::size_t i = 0; i < s.omega.size(); ++i) {
      t.add_row({std::string(to_string(c)), s.omega[i], s.omega[i] / p.kappa_m, s.ratio[i],
                 s.noise[i]});
    }
  }
  return {{"snr", std::move(t)}};
}

// ---- nsphere ------------------------------------------------------------

inline std::vector<Artifact> nsphere_task(const io::ScenarioConfig& cfg) {
  SystemParams p = cfg.system;
  validate(p);
  std::vector<int> counts = cfg.sphere_counts;
  if (counts.empty()) counts.push_back(p.n_spheres);
  const double k = psd_scale(p, cfg.output.units);
  const std::string u = psd_unit(cfg.output.units);
  Table t;
  describe_system(t, p);
  t.meta("bandwidth_threshold", io::format_double(bandwidth_threshold(p.kappa_a, p.kappa_m)) +
                                    " rad/s");
  t.columns = {{"n_spheres", ""}, {"channel", ""},  {"omega", "rad/s"},
               {"omega_over_kappa_m", ""}, {"S_magnon", u}, {"S_cavity", u},
               {"S_total", u},   {"noise_ratio", ""}, {"noise_ratio_opt", ""},
               {"cancellation_g_am", "rad/s"}};
  for (int n : counts) {
    p.n_spheres = n;
    const double g_cancel = cancellation_coupling(p.kappa_a, p.kappa_m, n);
    for (Channel c : cfg.channels) {
      const SpectrumSeries s = nsphere_psd(p, cfg.grid, c, 0.0);
      for (std::size_t i = 0; i < s.size(); ++i) {
        t.add_row({static_cast<std::int64_t>(n), std::string(to_string(c)), s.omega[i],
                   s.omega[i] / p.kappa_m, k * s.component("magnon")[i],
                   k * s.component("cavity")[i], k * s.values[i],
                   nsphere_noise_ratio(p, s.omega[i]),
                   nsphere_noise_ratio_opt(p.kappa_a, p.kappa_m, s.omega[i]), g_cancel});
      }
    }
  }
  return {{"nsphere", std::move(t)}};
}

// ---- reconstruct --------------------------------------------------------

inline Table measurement_table(const Measurement& m, const SystemParams& p, double t_m) {
  Table t;
  t.meta("label", m.label);
  t.meta("channel", std::string(to_string(m.channel)));
  t.meta("t_m", io::format_double(t_m) + " s");
  const SpectrumSeries& s = m.spectrum;
  const bool has_noise = s.has_component("noise");
  const bool has_se = !s.std_error.empty();
  t.columns = {{"omega", "rad/s"}, {"omega_over_kappa_m", ""}, {"S_total", "T^2/Hz"}};
  if (has_noise) t.columns.push_back({"S_noise", "T^2/Hz"});
  if (has_se) t.columns.push_back({"std_error", "T^2/Hz"});
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<Cell> row{s.omega[i], s.omega[i] / p.kappa_m, s.values[i]};
    if (has_noise) row.push_back(s.component("noise")[i]);
    if (has_se) row.push_back(s.std_error[i]);
    t.add_row(std::move(row));
  }
  return t;
}

inline std::string measurement_stem(const std::string& label, Channel c) {
  return label + "_" + std::string(to_string(c));
}

/// Loads `<label>_<channel>.csv` for every plan entry from `dir`.
inline MeasurementSet load_measurements(const std::filesystem::path& dir,
                                        const CalibrationPlan& plan, double t_m) {
  MeasurementSet set;
  set.t_m = t_m;
  for (const auto& cfg : plan.configs) {
    for (Channel c : cfg.channels) {
      const auto path = dir / (measurement_stem(cfg.label, c) + ".csv");
      const io::CsvData d = io::read_csv(path);
      SpectrumSeries s;
      s.omega = d.numeric("omega");
      s.values = d.numeric("S_total");
      s.channel = c;
      if (d.has_column("S_noise")) s.components["noise"] = d.numeric("S_noise");
      if (d.has_column("std_error")) s.std_error = d.numeric("std_error");
      try {
        validate_grid(s.omega);
      } catch (const DomainError& e) {
        throw io::IoError(path.string() + ": " + e.what());
      }
      set.items.push_back({cfg.label, c, std::move(s)});
    }
  }
  return set;
}

inline std::vector<Artifact> reconstruct_task(const io::ScenarioConfig& cfg,
                                              const RunOptions& opt) {
  const SystemParams& p = cfg.system;
  validate(p);
  const double t_m = require_t_m(cfg);
  const CalibrationPlan def = default_calibration_plan(p);
  const CalibrationPlan plan =
      calibration_plan(p, cfg.reconstruct.bias.value_or(def.bias_b),
                       {cfg.reconstruct.ref_x.value_or(def.ref_x),
                        cfg.reconstruct.ref_y.value_or(def.ref_y)});
  MeasurementSet set;
  std::string source;
  switch (cfg.reconstruct.source) {
    case io::ReconstructSource::synthetic:
      source = "synthetic";
      set = synthesize_measurements(p, plan, cfg.pulse, t_m, cfg.grid);
      break;
    case io::ReconstructSource::monte_carlo: {
      source = "monte-carlo";
      MonteCarloOptions o = cfg.monte_carlo.value_or(MonteCarloOptions{});
      o.seed = effective_seed(cfg, opt);
      set = MonteCarloMeasurementBank(p, plan, t_m, cfg.grid, o).measure(cfg.pulse);
      break;
    }
    case io::ReconstructSource::files: {
      source = "files";
      std::filesystem::path dir = cfg.reconstruct.measurements;
      if (dir.is_relative() && !cfg.source_path.empty()) {
        dir = std::filesystem::path(cfg.source_path).parent_path() / dir;
      }
      set = load_measurements(dir, plan, t_m);
      break;
    }
  }
  const ReconstructionResult r = reconstruct_field(set, plan, p);
  const bool known = cfg.reconstruct.source != io::ReconstructSource::files;

  Table t;
  describe_system(t, p);
  t.meta("source", source);
  t.meta("t_m", io::format_double(t_m) + " s");
  t.meta("bias", io::format_double(plan.bias_b) + " T*s");
  t.meta("ref_x", io::format_double(plan.ref_x) + " T*s");
  t.meta("ref_y", io::format_double(plan.ref_y) + " T*s");
  t.meta("diagnostics", r.diagnostics.summary());
  t.columns = {{"b_hat_x", "T*s"}, {"b_hat_y", "T*s"}, {"b_hat_z", "T*s"},
               {"gamma_bz_hat", ""}, {"phi_hat", "rad"}, {"theta_hat", "rad"}};
  std::vector<Cell> row{r.b_hat.b0_x, r.b_hat.b0_y, r.b_hat.b0_z,
                        r.gamma_bz_hat, r.phi_hat, r.theta_hat};
  if (known) {
    const auto [phi, theta] = field_angles(cfg.pulse);
    for (auto c : std::vector<Column>{{"b_x", "T*s"}, {"b_y", "T*s"}, {"b_z", "T*s"},
                                      {"phi", "rad"}, {"theta", "rad"}}) {
      t.columns.push_back(c);
    }
    for (double v : {cfg.pulse.b0_x, cfg.pulse.b0_y, cfg.pulse.b0_z, phi, theta}) {
      row.push_back(v);
    }
  }
  t.add_row(std::move(row));
  std::vector<Artifact> out{{"reconstruct", std::move(t)}};
  if (cfg.reconstruct.write_measurements) {
    for (const auto& m : set.items) {
      out.push_back({"measurements/" + measurement_stem(m.label, m.channel),
                     measurement_table(m, p, t_m)});
    }
  }
  return out;
}

// ---- sweep --------------------------------------------------------------

inline std::string internal_unit(io::Dimension d) {
  switch (d) {
    case io::Dimension::rate: return "rad/s";
    case io::Dimension::temperature: return "K";
    case io::Dimension::angle: return "rad";
    case io::Dimension::time: return "s";
    case io::Dimension::gyromagnetic:
    case io::Dimension::field_coupling: return "rad/(s*T)";
    case io::Dimension::pulse_area: return "T*s";
    case io::Dimension::spectral: return "T^2/Hz";
    case io::Dimension::volume: return "m^3";
  }
  return "";
}

inline std::vector<Artifact> sweep_task(const io::ScenarioConfig& cfg) {
  const auto& axes = cfg.sweep.axes;
  if (axes.empty() || axes.size() > 2) {
    throw io::SchemaError("sweep.axes", 0, "needs 1 or 2 axes");
  }
  std::vector<const io::SweepField*> fields;
  for (const auto& a : axes) {
    const io::SweepField* f = io::find_sweep_field(a.field);
    if (!f) throw io::SchemaError("sweep.axes.field", 0, "'" + a.field + "' is not sweepable");
    fields.push_back(f);
  }
  const std::size_t n0 = axes[0].values.size();
  const std::size_t n1 = axes.size() > 1 ? axes[1].values.size() : 1;
  const std::size_t nc = cfg.channels.size();
  const bool transient = cfg.t_m.has_value();
  const double omega = cfg.sweep.omega;

  struct Point {
    double s_r = 0, magnon = 0, cavity = 0, total = 0, r_ssnr = 0, s_transient = 0, r_nsnr = 0;
  };
  std::vector<Point> pts(n0 * n1 * nc);
  std::vector<std::string> errors(n0 * n1);
  detail::parallel_for(n0 * n1, detail::worker_count(0), [&](std::size_t idx) {
    const std::size_t i0 = idx / n1;
    const std::size_t i1 = idx % n1;
    io::ScenarioConfig local = cfg;
    try {
      fields[0]->set(local, axes[0].values[i0]);
      if (axes.size() > 1) fields[1]->set(local, axes[1].values[i1]);
      const SystemParams& p = local.system;
      validate(p);
      std::optional<Matrix4> sigma;
      if (transient) sigma = prepared_state(p).sigma;
      for (std::size_t ic = 0; ic < nc; ++ic) {
        const Channel c = cfg.channels[ic];
        const SpectrumSeries s = nsphere_psd(p, {omega}, c, 0.0);
        Point& pt = pts[idx * nc + ic];
        pt.magnon = s.component("magnon")[0];
        pt.cavity = s.component("cavity")[0];
        pt.total = s.values[0];
        pt.s_r = pt.cavity / pt.magnon;
        pt.r_ssnr = std::sqrt(local.signal_psd / pt.total);
        if (sigma) {
          const SnrSeries t = transient_snr(p, *sigma, local.pulse, *local.t_m, {omega}, c);
          pt.s_transient = t.noise[0];
          pt.r_nsnr = t.ratio[0];
        }
      }
    } catch (const std::exception& e) {
      errors[idx] = e.what();
    }
  });
  for (std::size_t idx = 0; idx < errors.size(); ++idx) {
    if (!errors[idx].empty()) {
      throw DomainError("sweep point " + std::to_string(idx) + ": " + errors[idx]);
    }
  }

  const SystemParams& p0 = cfg.system;
  Table t;
  describe_system(t, p0);
  t.meta("omega", io::format_double(omega) + " rad/s");
  t.meta("signal_psd", io::format_double(cfg.signal_psd) + " T^2/Hz");
  for (std::size_t a = 0; a < axes.size(); ++a) {
    const auto& f = *fields[a];
    t.columns.push_back({axes[a].field, f.dim ? internal_unit(*f.dim) : ""});
  }
  for (Column c : std::vector<Column>{{"channel", ""},
                                      {"S_r", ""},
                                      {"S_magnon", "T^2/Hz"},
                                      {"S_cavity", "T^2/Hz"},
                                      {"S_total", "T^2/Hz"},
                                      {"R_SSNR", ""}}) {
    t.columns.push_back(c);
  }
  if (transient) {
    t.columns.push_back({"S_transient_noise", "T^2/Hz"});
    t.columns.push_back({"R_NSNR", ""});
  }
  for (std::size_t idx = 0; idx < n0 * n1; ++idx) {
    for (std::size_t ic = 0; ic < nc; ++ic) {
      const Point& pt = pts[idx * nc + ic];
      std::vector<Cell> row{axes[0].values[idx / n1]};
      if (axes.size() > 1) row.push_back(axes[1].values[idx % n1]);
      row.push_back(std::string(to_string(cfg.channels[ic])));
      for (double v : {pt.s_r, pt.magnon, pt.cavity, pt.total, pt.r_ssnr}) row.push_back(v);
      if (transient) {
        row.push_back(pt.s_transient);
        row.push_back(pt.r_nsnr);
      }
      t.add_row(std::move(row));
    }
  }
  std::vector<Artifact> out{{"sweep", std::move(t)}};
  if (axes.size() == 2 && n0 >= 2 && n1 >= 2) {
    // R_SSNR = 1 level set over (axis 0, axis 1).
    std::vector<std::pair<std::string, std::vector<Polyline>>> sets;
    for (std::size_t ic = 0; ic < nc; ++ic) {
      std::vector<std::vector<double>> grid(n1, std::vector<double>(n0));
      for (std::size_t i0 = 0; i0 < n0; ++i0) {
        for (std::size_t i1 = 0; i1 < n1; ++i1) grid[i1][i0] = pts[(i0 * n1 + i1) * nc + ic].r_ssnr;
      }
      sets.emplace_back(std::string(to_string(cfg.channels[ic])),
                        contour_lines(axes[0].values, axes[1].values, grid, 1.0));
    }
    out.push_back({"sweep_contour", contour_table(sets, axes[0].field, axes[1].field, 1.0)});
  }
  return out;
}

}  // namespace magsense::cli
