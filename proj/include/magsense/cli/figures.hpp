#pragma once

// Fixed presets for the figure datasets. One table per panel; preset
// parameters go into each table's metadata.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "magsense/cli/tasks.hpp"

namespace magsense::cli {

/// Transverse pulse area used by every transient-SNR panel, T s.
inline constexpr double kFig2PulseX = 1e-6;
/// Signal level of the stationary SNR panels, T^2/Hz.
inline constexpr double kFig5SignalPsd = kDefaultSignalPsd;

inline SystemParams fig2_params(double r0) {
  SystemParams p = reference_parameters();
  p.pre_squeeze = {r0, std::numbers::pi};
  return p;
}

inline void fig2_meta(Table& t, const SystemParams& p) {
  describe_system(t, p);
  t.meta("b0_x", io::format_double(kFig2PulseX) + " T*s");
  t.meta("channel", "x");
}

inline std::vector<Artifact> figure_fig2() {
  std::vector<Artifact> out;
  const SystemParams ref = reference_parameters();
  const std::vector<double> grid = linear_grid(-5.0 * ref.kappa_m, 5.0 * ref.kappa_m, 401);

  {  // (a) R_NSNR(omega) for several measurement times at r0 = 2.
    const SystemParams p = fig2_params(2.0);
    const Matrix4 sigma = prepared_state(p).sigma;
    Table t;
    fig2_meta(t, p);
    t.columns = {{"kappa_m_t_m", ""}, {"omega_over_kappa_m", ""}, {"R_NSNR", ""}};
    for (double kt : {3.0, 5.0, 10.0, 50.0}) {
      const SnrSeries s = transient_snr(p, sigma, {kFig2PulseX, 0.0, 0.0}, kt / p.kappa_m, grid,
                                        Channel::x);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        t.add_row({kt, grid[i] / p.kappa_m, s.ratio[i]});
      }
    }
    out.push_back({"fig2a", std::move(t)});
  }
  {  // (b) resonant R_NSNR versus measurement time for several r0.
    Table t;
    fig2_meta(t, fig2_params(2.0));
    t.meta("pre_squeeze_theta", "pi");
    t.columns = {{"r0", ""}, {"kappa_m_t_m", ""}, {"R_NSNR", ""}};
    std::vector<double> times = linear_grid(std::log(1.0), std::log(60.0), 121);
    for (double& x : times) x = std::exp(x);
    times.front() = 1.0;
    times.back() = 60.0;
    for (double r0 : {0.0, 0.5, 1.0, 1.5, 2.0}) {
      const SystemParams p = fig2_params(r0);
      const Matrix4 sigma = prepared_state(p).sigma;
      for (double kt : times) {
        const SnrSeries s =
            transient_snr(p, sigma, {kFig2PulseX, 0.0, 0.0}, kt / p.kappa_m, {0.0}, Channel::x);
        t.add_row({r0, kt, s.ratio[0]});
      }
    }
    out.push_back({"fig2b", std::move(t)});
  }
  {  // (c) robustness against a large longitudinal kick.
    const SystemParams p = fig2_params(2.0);
    const Matrix4 sigma = prepared_state(p).sigma;
    Table t;
    fig2_meta(t, p);
    t.meta("kappa_m_t_m", "3");
    t.columns = {{"gamma_bz", ""}, {"omega_over_kappa_m", ""}, {"R_NSNR", ""}};
    for (double gbz : {0.0, 1e2, 1e4, 1e6}) {
      const FieldPulse b = FieldPulse::with_longitudinal_phase(kFig2PulseX, 0.0, gbz, p.gamma_gyro);
      const SnrSeries s = transient_snr(p, sigma, b, 3.0 / p.kappa_m, grid, Channel::x);
      for (std::size_t i = 0; i < grid.size(); ++i) t.add_row({gbz, grid[i] / p.kappa_m, s.ratio[i]});
    }
    out.push_back({"fig2c", std::move(t)});
  }
  {  // (d)-(f) prepared-state moments versus r0 at theta0 = pi.
    const std::vector<double> r0s = linear_grid(0.0, 3.0, 61);
    Table d, e, f;
    for (Table* t : {&d, &e, &f}) {
      describe_system(*t, fig2_params(0.0));
      t->meta("pre_squeeze_theta", "pi");
    }
    d.columns = {{"r0", ""}, {"mp2", ""}};
    e.columns = {{"r0", ""}, {"ax2", ""}};
    f.columns = {{"r0", ""}, {"ax_mp_anticommutator", ""}};
    for (double r0 : r0s) {
      const Matrix4 s = prepared_state(fig2_params(r0)).sigma;
      d.add_row({r0, s(kMp, kMp)});
      e.add_row({r0, s(kAx, kAx)});
      f.add_row({r0, 2.0 * s(kAx, kMp)});
    }
    out.push_back({"fig2d", std::move(d)});
    out.push_back({"fig2e", std::move(e)});
    out.push_back({"fig2f", std::move(f)});
  }
  return out;
}

/// Angle recovery along two one-parameter paths: (a) azimuth at fixed polar
/// angle, (b) polar angle at fixed azimuth.
inline std::vector<Artifact> figure_fig3(std::uint64_t seed, std::size_t n_traj = 2000) {
  SystemParams p = reference_parameters();
  p.pre_squeeze = {2.0, std::numbers::pi};
  const double t_m = 3.0 / p.kappa_m;
  const std::vector<double> grid = linear_grid(-2.0 * p.kappa_m, 2.0 * p.kappa_m, 21);
  const CalibrationPlan plan = default_calibration_plan(p);
  MonteCarloOptions o;
  o.n_traj = n_traj;
  o.seed = seed;
  const MonteCarloMeasurementBank bank(p, plan, t_m, grid, o);
  const double magnitude = 5.0 / p.gamma_gyro;
  constexpr double deg = std::numbers::pi / 180.0;

  auto panel = [&](const std::vector<std::pair<double, double>>& path) {
    Table t;
    describe_system(t, p);
    t.meta("kappa_m_t_m", "3");
    t.meta("magnitude", io::format_double(magnitude) + " T*s");
    t.meta("n_traj", std::to_string(n_traj));
    t.meta("bias", io::format_double(plan.bias_b) + " T*s");
    t.columns = {{"index", ""},           {"phi_true", "rad"},       {"theta_true", "rad"},
                 {"phi_est", "rad"},      {"theta_est", "rad"},      {"phi_est_noiseless", "rad"},
                 {"theta_est_noiseless", "rad"}};
    for (std::size_t k = 0; k < path.size(); ++k) {
      const auto [phi, theta] = path[k];
      const FieldPulse b{magnitude * std::sin(theta) * std::cos(phi),
                         magnitude * std::sin(theta) * std::sin(phi), magnitude * std::cos(theta)};
      const ReconstructionResult noisy = reconstruct_field(bank.measure(b), plan, p);
      const ReconstructionResult clean =
          reconstruct_field(synthesize_measurements(p, plan, b, t_m, grid), plan, p);
      t.add_row({static_cast<std::int64_t>(k), phi, theta, noisy.phi_hat, noisy.theta_hat,
                 clean.phi_hat, clean.theta_hat});
    }
    return t;
  };
  std::vector<std::pair<double, double>> a, b;
  for (int k = -17; k <= 17; ++k) a.emplace_back(10.0 * k * deg, 60.0 * deg);
  for (int k = 1; k <= 35; ++k) b.emplace_back(30.0 * deg, 5.0 * k * deg);
  Table ta = panel(a);
  ta.meta("theta_fixed", io::format_double(60.0 * deg) + " rad");
  Table tb = panel(b);
  tb.meta("phi_fixed", io::format_double(30.0 * deg) + " rad");
  return {{"fig3a", std::move(ta)}, {"fig3b", std::move(tb)}};
}

inline std::vector<Artifact> figure_fig4() {
  std::vector<Artifact> out;
  const SystemParams ref = reference_parameters();
  const std::vector<double> omega = linear_grid(-5.0 * ref.kappa_m, 5.0 * ref.kappa_m, 201);
  std::vector<double> g_axis = linear_grid(0.01 * ref.kappa_m, 1.0 * ref.kappa_m, 100);
  std::vector<double> ka_axis = linear_grid(0.01 * ref.kappa_m, 2.0 * ref.kappa_m, 100);
  const SqueezeParams sq{1.726, std::numbers::pi};
  for (bool squeezed : {false, true}) {
    SystemParams p = ref;
    if (squeezed) p.bath_squeeze = sq;
    const RatioMap mg = noise_ratio_map(p, omega, io::MapAxis::g_am, g_axis);
    auto a = ratio_map_artifacts(squeezed ? "fig4c" : "fig4a", p, mg, io::MapAxis::g_am, 1.0);
    // kappa_a panels hold the coupling at the cancellation value of the
    // reference dissipation rates.
    SystemParams pk = p;
    pk.g_am = cancellation_coupling(ref.kappa_a, ref.kappa_m);
    const RatioMap mk = noise_ratio_map(pk, omega, io::MapAxis::kappa_a, ka_axis);
    auto b = ratio_map_artifacts(squeezed ? "fig4d" : "fig4b", pk, mk, io::MapAxis::kappa_a, 1.0);
    for (auto* v : {&a, &b}) {
      for (auto& art : *v) out.push_back(std::move(art));
    }
  }
  return out;
}

inline std::vector<Artifact> figure_fig5() {
  std::vector<Artifact> out;
  {  // (a) R_SSNR(omega) at the cancellation coupling.
    SystemParams p = reference_parameters();
    p.g_am = cancellation_coupling(p.kappa_a, p.kappa_m);
    const std::vector<double> grid = linear_grid(-5.0 * p.kappa_m, 5.0 * p.kappa_m, 401);
    Table t;
    describe_system(t, p);
    t.meta("signal_psd", io::format_double(kFig5SignalPsd) + " T^2/Hz");
    t.meta("bath_squeeze_theta", "pi");
    t.columns = {{"r", ""}, {"omega_over_kappa_m", ""}, {"R_SSNR", ""}};
    for (double r : {0.0, 0.5, 1.0, 1.5}) {
      p.bath_squeeze = {r, std::numbers::pi};
      const SnrSeries s = stationary_snr(p, kFig5SignalPsd, grid, Channel::x);
      for (std::size_t i = 0; i < grid.size(); ++i) t.add_row({r, grid[i] / p.kappa_m, s.ratio[i]});
    }
    out.push_back({"fig5a", std::move(t)});
  }
  {  // (b) resonant R_SSNR over temperature and squeezing at the reference coupling.
    SystemParams p = reference_parameters();
    std::vector<double> temps = linear_grid(std::log(1e-3), std::log(3.0), 121);
    for (double& x : temps) x = std::exp(x);
    temps.front() = 1e-3;
    temps.back() = 3.0;
    const std::vector<double> rs = linear_grid(0.0, 2.5, 101);
    Table t;
    describe_system(t, p);
    t.meta("signal_psd", io::format_double(kFig5SignalPsd) + " T^2/Hz");
    t.meta("omega", "0 rad/s");
    t.meta("bath_squeeze_theta", "pi");
    t.columns = {{"temperature", "K"}, {"r", ""}, {"R_SSNR", ""}};
    std::vector<std::vector<double>> z(rs.size(), std::vector<double>(temps.size()));
    std::vector<double> log_t;
    for (std::size_t j = 0; j < rs.size(); ++j) {
      p.bath_squeeze = {rs[j], std::numbers::pi};
      for (std::size_t i = 0; i < temps.size(); ++i) {
        p.temperature = temps[i];
        z[j][i] = stationary_snr(p, kFig5SignalPsd, {0.0}, Channel::x).ratio[0];
        t.add_row({temps[i], rs[j], z[j][i]});
      }
    }
    out.push_back({"fig5b", std::move(t)});
    Table c = contour_table({{"x", contour_lines(temps, rs, z, 1.0)}}, "temperature", "r", 1.0);
    out.push_back({"fig5b_contour", std::move(c)});
  }
  return out;
}

inline std::optional<std::vector<Artifact>> figure_data(std::string_view id, std::uint64_t seed) {
  if (id == "fig2") return figure_fig2();
  if (id == "fig3") return figure_fig3(seed);
  if (id == "fig4") return figure_fig4();
  if (id == "fig5") return figure_fig5();
  return std::nullopt;
}

}  // namespace magsense::cli
