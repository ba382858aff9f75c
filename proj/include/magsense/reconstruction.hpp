#pragma once

// Three-axis reconstruction of a delta field pulse from transient output
// spectra.
//
// Forward model for one measurement in channel c (field-referred, T^2/Hz):
//
//   S_c(omega) = u_c^2 / t_m + S_n^c(omega; gamma B_z)
//
// where u_c is the channel amplitude of the total applied pulse and the
// transient part of S_n is quadratic in gamma B_z,
// transient = c0 + c1 gBz + c2 gBz^2 (see longitudinal_response).
//
// Stages:
//   1. longitudinal: D = S_noise(gBz + b) - S_noise(gBz - b) = 2b (c1 + 2 c2 gBz),
//      with c2 taken from the bias-only calibration and c1 from the model,
//      band-averaged over |omega| <= kappa_m / 2 with inverse-variance weights;
//   2. transverse: the frequency-independent residual
//      S(unknown) - S(zero field) - [transient(gBz) - transient(0)] gives u_c^2;
//   3. sign: a known reference pulse r adds (u + r)^2 - u^2 - r^2 = 2 u r;
//   4. angles from the reconstructed vector, with B_z = gBz / gamma.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "magsense/dynamics.hpp"
#include "magsense/errors.hpp"
#include "magsense/model.hpp"
#include "magsense/monte_carlo.hpp"
#include "magsense/sensing.hpp"
#include "magsense/series.hpp"
#include "magsense/spectra.hpp"

namespace magsense {

enum class MeasurementKind {
  unknown,
  bias_plus,
  bias_minus,
  reference_x,
  reference_y,
  zero_field,
  bias_calibration,
};

/// One measurement configuration: the unknown pulse (if included) plus a
/// known added pulse, read out in the listed channels.
struct MeasurementConfig {
  std::string label;
  MeasurementKind kind = MeasurementKind::unknown;
  std::vector<Channel> channels;
  bool includes_unknown = true;
  FieldPulse added;
};

struct CalibrationPlan {
  double bias_b = 0.0;  // longitudinal bias pulse area, T s
  double ref_x = 0.0;   // x-channel reference amplitude, T s
  double ref_y = 0.0;   // y-channel reference amplitude, T s
  std::vector<MeasurementConfig> configs;

  const MeasurementConfig& config(MeasurementKind k, Channel ch) const {
    for (const auto& c : configs) {
      if (c.kind != k) continue;
      for (Channel x : c.channels) {
        if (x == ch) return c;
      }
    }
    throw PlanError("calibration plan has no configuration of the requested kind");
  }
};

struct ReferenceAmplitudes {
  double x = 0.0;
  double y = 0.0;
};

/// Ordered measurement schedule for one reconstruction: unknown (x, y),
/// +bias, -bias, x reference, y reference, zero field (x and y), bias-only
/// calibration.
inline CalibrationPlan calibration_plan(const SystemParams& p, double bias_b,
                                        ReferenceAmplitudes refs) {
  if (!(bias_b > 0.0)) throw PlanError("calibration_plan: bias_b must be positive");
  if (!(refs.x > 0.0) || !(refs.y > 0.0)) {
    throw PlanError("calibration_plan: reference amplitudes must be positive");
  }
  const double s = std::sin(p.pulse_phase);
  const double c = std::cos(p.pulse_phase);
  CalibrationPlan plan;
  plan.bias_b = bias_b;
  plan.ref_x = refs.x;
  plan.ref_y = refs.y;
  using K = MeasurementKind;
  plan.configs = {
      {"unknown-x", K::unknown, {Channel::x}, true, {}},
      {"unknown-y", K::unknown, {Channel::y}, true, {}},
      {"bias-plus", K::bias_plus, {Channel::x}, true, {0.0, 0.0, bias_b}},
      {"bias-minus", K::bias_minus, {Channel::x}, true, {0.0, 0.0, -bias_b}},
      {"reference-x", K::reference_x, {Channel::x}, true, {refs.x * c, -refs.x * s, 0.0}},
      {"reference-y", K::reference_y, {Channel::y}, true, {refs.y * s, refs.y * c, 0.0}},
      {"zero-field", K::zero_field, {Channel::x, Channel::y}, false, {}},
      {"bias-calibration", K::bias_calibration, {Channel::x}, false, {0.0, 0.0, bias_b}},
  };
  return plan;
}

/// Defaults: gamma * bias = 5, gamma * reference = 1.
inline CalibrationPlan default_calibration_plan(const SystemParams& p) {
  return calibration_plan(p, 5.0 / p.gamma_gyro, {1.0 / p.gamma_gyro, 1.0 / p.gamma_gyro});
}

/// The unknown contributes for every configuration that includes it.
inline FieldPulse applied_pulse(const MeasurementConfig& cfg, const FieldPulse& unknown) {
  FieldPulse b = cfg.added;
  if (cfg.includes_unknown) {
    b.b0_x += unknown.b0_x;
    b.b0_y += unknown.b0_y;
    b.b0_z += unknown.b0_z;
  }
  return b;
}

/// A measured spectrum: `values` is the total PSD; an optional "noise"
/// component holds the fluctuation-only PSD (ensemble variance) and
/// std_error its standard error.
struct Measurement {
  std::string label;
  Channel channel = Channel::x;
  SpectrumSeries spectrum;
};

struct MeasurementSet {
  double t_m = 0.0;
  std::vector<Measurement> items;

  const SpectrumSeries* find(const std::string& label, Channel c) const {
    for (const auto& m : items) {
      if (m.label == label && m.channel == c) return &m.spectrum;
    }
    return nullptr;
  }

  const SpectrumSeries& at(const std::string& label, Channel c) const {
    if (const auto* s = find(label, c)) return *s;
    throw PlanError("measurement set is missing '" + label + "' in channel " +
                    std::string(to_string(c)));
  }
};

/// Noiseless spectra of every plan entry for a true pulse.
inline MeasurementSet synthesize_measurements(const SystemParams& p,
                                              const CalibrationPlan& plan,
                                              const FieldPulse& unknown, double t_m,
                                              const std::vector<double>& grid) {
  validate_grid(grid);
  const Matrix4 sigma = prepared_state(p).sigma;
  MeasurementSet set;
  set.t_m = t_m;
  for (const auto& cfg : plan.configs) {
    const FieldPulse b = applied_pulse(cfg, unknown);
    for (Channel c : cfg.channels) {
      SpectrumSeries n = transient_noise_psd(p, sigma, longitudinal_phase(p, b), t_m, grid, c);
      const double amp = channel_amplitude(p, b, c);
      SpectrumSeries s;
      s.omega = grid;
      s.channel = c;
      s.components["noise"] = n.values;
      s.components["signal"].assign(grid.size(), amp * amp / t_m);
      s.values.resize(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        s.values[i] = s.components["signal"][i] + n.values[i];
      }
      set.items.push_back({cfg.label, c, std::move(s)});
    }
  }
  return set;
}

/// Converts an ensemble spectrum (values = noise) into measurement form
/// (values = total).
inline SpectrumSeries as_measurement(SpectrumSeries mc) {
  mc.values = mc.component("total");
  mc.components.erase("total");
  return mc;
}

/// One independent trajectory ensemble per plan configuration, reusable for
/// any number of unknown pulses.
class MonteCarloMeasurementBank {
 public:
  MonteCarloMeasurementBank(const SystemParams& p, CalibrationPlan plan, double t_m,
                            const std::vector<double>& grid, MonteCarloOptions opts)
      : plan_(std::move(plan)), t_m_(t_m) {
    for (std::size_t k = 0; k < plan_.configs.size(); ++k) {
      MonteCarloOptions o = opts;
      o.seed = detail::splitmix64(opts.seed + 0x51ed27u * (k + 1));
      ensembles_.push_back(TrajectoryEnsemble::simulate(p, t_m, grid, o));
    }
  }

  MeasurementSet measure(const FieldPulse& unknown) const {
    MeasurementSet set;
    set.t_m = t_m_;
    for (std::size_t k = 0; k < plan_.configs.size(); ++k) {
      const auto& cfg = plan_.configs[k];
      const FieldPulse b = applied_pulse(cfg, unknown);
      for (Channel c : cfg.channels) {
        set.items.push_back({cfg.label, c, as_measurement(ensembles_[k].spectrum(b, c))});
      }
    }
    return set;
  }

  const CalibrationPlan& plan() const { return plan_; }

 private:
  CalibrationPlan plan_;
  double t_m_;
  std::vector<TrajectoryEnsemble> ensembles_;
};

struct ReconstructionDiagnostics {
  double gamma_bias = 0.0;           // dimensionless bias used
  double longitudinal_spread = 0.0;  // weighted std of per-frequency gBz estimates
  std::size_t longitudinal_points = 0;
  double calibration_curvature = 0.0;  // weighted mean of measured c2, T^2/Hz
  double model_curvature = 0.0;        // weighted mean of predicted c2
  double residual_power_x = 0.0;       // u_x^2 before clamping, (T s)^2
  double residual_power_y = 0.0;
  double residual_spread_x = 0.0;      // relative spread of the transverse residual
  double residual_spread_y = 0.0;
  double sign_inner_x = 0.0;           // 2 u_x r_x, (T s)^2
  double sign_inner_y = 0.0;

  std::string summary() const {
    std::ostringstream os;
    os << "gamma_bias=" << gamma_bias << " longitudinal_spread=" << longitudinal_spread
       << " longitudinal_points=" << longitudinal_points
       << " calibration_curvature=" << calibration_curvature
       << " model_curvature=" << model_curvature << " residual_power_x=" << residual_power_x
       << " residual_power_y=" << residual_power_y << " residual_spread_x=" << residual_spread_x
       << " residual_spread_y=" << residual_spread_y << " sign_inner_x=" << sign_inner_x
       << " sign_inner_y=" << sign_inner_y;
    return os.str();
  }
};

struct ReconstructionResult {
  FieldPulse b_hat;          // T s; b0_z converted from gamma_bz_hat
  double gamma_bz_hat = 0.0; // dimensionless longitudinal estimate
  double phi_hat = 0.0;      // azimuth, (-pi, pi]
  double theta_hat = 0.0;    // polar, [0, pi]
  ReconstructionDiagnostics diagnostics;
};

/// Azimuth and polar angle of a vector; phi in (-pi, pi], theta in [0, pi].
inline std::pair<double, double> field_angles(const FieldPulse& b) {
  const double perp = std::hypot(b.b0_x, b.b0_y);
  return {std::atan2(b.b0_y, b.b0_x), std::atan2(perp, b.b0_z)};
}

namespace detail {

inline const std::vector<double>& noise_of(const SpectrumSeries& s) {
  return s.has_component("noise") ? s.component("noise") : s.values;
}

inline void check_grid(const SpectrumSeries& s, const std::vector<double>& grid,
                       const char* what) {
  if (s.omega != grid) {
    throw PlanError(std::string("measurement '") + what +
                    "' is not on the common frequency grid");
  }
}

}  // namespace detail

inline ReconstructionResult reconstruct_field(const MeasurementSet& measured,
                                              const CalibrationPlan& plan,
                                              const SystemParams& p) {
  validate(p);
  const double t_m = measured.t_m;
  if (!(t_m > 0.0)) throw PlanError("measurement set has no positive t_m");
  using K = MeasurementKind;
  auto get = [&](K kind, Channel c) -> const SpectrumSeries& {
    return measured.at(plan.config(kind, c).label, c);
  };
  const SpectrumSeries& unk_x = get(K::unknown, Channel::x);
  const SpectrumSeries& unk_y = get(K::unknown, Channel::y);
  const SpectrumSeries& plus = get(K::bias_plus, Channel::x);
  const SpectrumSeries& minus = get(K::bias_minus, Channel::x);
  const SpectrumSeries& ref_x = get(K::reference_x, Channel::x);
  const SpectrumSeries& ref_y = get(K::reference_y, Channel::y);
  const SpectrumSeries& zero_x = get(K::zero_field, Channel::x);
  const SpectrumSeries& zero_y = get(K::zero_field, Channel::y);
  const SpectrumSeries& cal = get(K::bias_calibration, Channel::x);

  const std::vector<double>& grid = unk_x.omega;
  validate_grid(grid);
  for (const auto* s : {&unk_y, &plus, &minus, &ref_x, &ref_y, &zero_x, &zero_y, &cal}) {
    detail::check_grid(*s, grid, "spectrum");
  }

  const Matrix4 sigma = prepared_state(p).sigma;
  const double gb = p.gamma_gyro * plan.bias_b;
  ReconstructionResult res;
  ReconstructionDiagnostics& diag = res.diagnostics;
  diag.gamma_bias = gb;

  // Stage 1: longitudinal component from the antisymmetric bias difference.
  {
    const auto& np = detail::noise_of(plus);
    const auto& nm = detail::noise_of(minus);
    const auto& nc = detail::noise_of(cal);
    const auto& nz = detail::noise_of(zero_x);
    const bool have_se = !plus.std_error.empty() && !minus.std_error.empty();
    double sw = 0.0, swb = 0.0, swb2 = 0.0, swc = 0.0, swm = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (std::abs(grid[i]) > 0.5 * p.kappa_m) continue;
      const LongitudinalResponse r = longitudinal_response(p, sigma, grid[i], t_m, Channel::x);
      const double curv = (nc[i] - nz[i] - r.c1 * gb) / (gb * gb);
      if (!(curv > 0.0)) continue;
      const double d = np[i] - nm[i];
      const double est = (d / (2.0 * gb) - r.c1) / (2.0 * curv);
      const double var_d = have_se ? plus.std_error[i] * plus.std_error[i] +
                                         minus.std_error[i] * minus.std_error[i]
                                   : (np[i] + nm[i]) * (np[i] + nm[i]);
      const double slope = 4.0 * gb * curv;
      const double w = var_d > 0.0 ? slope * slope / var_d : 1.0;
      sw += w;
      swb += w * est;
      swb2 += w * est * est;
      swc += w * curv;
      swm += w * r.c2;
      ++used;
    }
    if (used == 0) {
      throw EstimationError(
          "longitudinal stage: no usable frequency in |omega| <= kappa_m/2 "
          "(grid misses the band or the calibration curvature is not positive)",
          diag.summary());
    }
    res.gamma_bz_hat = swb / sw;
    diag.longitudinal_points = used;
    diag.longitudinal_spread = std::sqrt(std::max(0.0, swb2 / sw - res.gamma_bz_hat * res.gamma_bz_hat));
    diag.calibration_curvature = swc / sw;
    diag.model_curvature = swm / sw;
  }

  // Stage 2: transverse magnitudes from the frequency-independent residual.
  auto transverse_power = [&](const SpectrumSeries& unk, const SpectrumSeries& zero,
                              Channel c, double& spread) {
    const std::size_t n = grid.size();
    std::vector<double> resid(n);
    double mean = 0.0, floor = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const LongitudinalResponse r = longitudinal_response(p, sigma, grid[i], t_m, c);
      resid[i] = unk.values[i] - zero.values[i] - (r(res.gamma_bz_hat) - r.c0);
      mean += resid[i];
      floor += std::abs(zero.values[i]);
    }
    mean /= static_cast<double>(n);
    floor /= static_cast<double>(n);
    double var = 0.0;
    for (double x : resid) var += (x - mean) * (x - mean);
    const double sd = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
    spread = mean != 0.0 ? sd / std::abs(mean) : 0.0;
    const double tol = 5.0 * sd / std::sqrt(static_cast<double>(n)) + 1e-9 * floor;
    if (mean < -tol) {
      throw EstimationError("transverse stage: negative residual power in channel " +
                                std::string(to_string(c)) + " (inconsistent inputs)",
                            diag.summary());
    }
    return mean * t_m;
  };
  diag.residual_power_x = transverse_power(unk_x, zero_x, Channel::x, diag.residual_spread_x);
  diag.residual_power_y = transverse_power(unk_y, zero_y, Channel::y, diag.residual_spread_y);
  const double mag_x = std::sqrt(std::max(0.0, diag.residual_power_x));
  const double mag_y = std::sqrt(std::max(0.0, diag.residual_power_y));

  // Stage 3: signs from the reference pulses.
  auto inner = [&](const SpectrumSeries& ref, const SpectrumSeries& unk, double r) {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) acc += ref.values[i] - unk.values[i];
    return acc / static_cast<double>(grid.size()) * t_m - r * r;
  };
  diag.sign_inner_x = inner(ref_x, unk_x, plan.ref_x);
  diag.sign_inner_y = inner(ref_y, unk_y, plan.ref_y);
  const double u = diag.sign_inner_x >= 0.0 ? mag_x : -mag_x;
  const double v = diag.sign_inner_y >= 0.0 ? mag_y : -mag_y;

  // Stage 4: undo the pulse-phase rotation, convert B_z, take angles.
  const double s = std::sin(p.pulse_phase);
  const double c = std::cos(p.pulse_phase);
  res.b_hat.b0_x = c * u + s * v;
  res.b_hat.b0_y = -s * u + c * v;
  res.b_hat.b0_z = res.gamma_bz_hat / p.gamma_gyro;
  std::tie(res.phi_hat, res.theta_hat) = field_angles(res.b_hat);
  return res;
}

}  // namespace magsense
