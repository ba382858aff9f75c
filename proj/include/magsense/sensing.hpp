#pragma once

// Transient and stationary signal-to-noise ratios.

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "magsense/dynamics.hpp"
#include "magsense/model.hpp"
#include "magsense/series.hpp"
#include "magsense/spectra.hpp"

namespace magsense {

/// Weak-field signal level used for the stationary SNR, T^2/Hz.
inline constexpr double kDefaultSignalPsd = 1e-24;

struct SnrSeries {
  std::vector<double> omega;
  std::vector<double> ratio;
  Channel channel = Channel::x;
  double t_m = std::numeric_limits<double>::infinity();  // infinite for stationary
  std::map<std::string, std::vector<double>> noise_components;
  std::vector<double> noise;  // denominator PSD, T^2/Hz
};

/// Pulse amplitude seen by a readout channel; at zero pulse phase this is
/// B0_x for x and B0_y for y.
inline double channel_amplitude(const SystemParams& p, const FieldPulse& b, Channel c) {
  const double s = std::sin(p.pulse_phase);
  const double co = std::cos(p.pulse_phase);
  return c == Channel::x ? b.b0_x * co - b.b0_y * s : b.b0_x * s + b.b0_y * co;
}

/// R_NSNR(omega) = sqrt(S_i / S_n(omega)) with S_i = (B0 component)^2 and
/// S_n the transient noise PSD for the pulse's longitudinal component.
inline SnrSeries transient_snr(const SystemParams& p, const Matrix4& sigma,
                               const FieldPulse& pulse, double t_m,
                               const std::vector<double>& grid, Channel c) {
  const SpectrumSeries n =
      transient_noise_psd(p, sigma, longitudinal_phase(p, pulse), t_m, grid, c);
  const double amp = channel_amplitude(p, pulse, c);
  SnrSeries out;
  out.omega = grid;
  out.channel = c;
  out.t_m = t_m;
  out.noise = n.values;
  out.noise_components = n.components;
  out.ratio.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.ratio[i] = std::sqrt(amp * amp / n.values[i]);
  }
  return out;
}

inline SnrSeries transient_snr(const SystemParams& p, const FieldPulse& pulse,
                               double t_m, const std::vector<double>& grid,
                               Channel c) {
  return transient_snr(p, prepared_state(p).sigma, pulse, t_m, grid, c);
}

/// R_SSNR(omega) = sqrt(S_i / S^sym|_{B=0}); the denominator is the N-sphere
/// stationary noise (identical to the single-sphere spectrum at N = 1).
inline SnrSeries stationary_snr(const SystemParams& p, double signal_psd,
                                const std::vector<double>& grid, Channel c) {
  if (signal_psd < 0.0) throw DomainError("stationary_snr: signal_psd must be >= 0");
  const SpectrumSeries n = nsphere_psd(p, grid, c, 0.0);
  SnrSeries out;
  out.omega = grid;
  out.channel = c;
  out.noise = n.values;
  out.noise_components = n.components;
  out.noise_components.erase("signal");
  out.ratio.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.ratio[i] = std::sqrt(signal_psd / n.values[i]);
  }
  return out;
}

}  // namespace magsense
