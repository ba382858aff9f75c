#pragma once

// Closed-form field-referred noise spectra: the finite-time (transient)
// spectrum of the filtered cavity quadrature, its stationary limit with and
// without a squeezed cavity reservoir, and the N-sphere bright-mode results.
//
// All PSDs are returned in field-referred units (T^2/Hz); use to_units() for
// the epsilon_B-normalized form.

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "magsense/dynamics.hpp"
#include "magsense/model.hpp"
#include "magsense/series.hpp"

namespace magsense {

using Complex = std::complex<double>;
using Vector4c = Eigen::Matrix<Complex, 4, 1>;

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

/// alpha(omega) = (-i omega + 1/(2 t_m) + kappa_m/2) / g_am.
inline Complex transient_alpha(const SystemParams& p, double omega, double t_m) {
  return Complex(0.5 / t_m + 0.5 * p.kappa_m, -omega) / p.g_am;
}

/// K(omega) = |4g^2 + (1/t_m - 2i omega - kappa_a)(1/t_m - 2i omega + kappa_m)|^2
///            / (16 g^2 kappa_a).
inline double transient_kcal(const SystemParams& p, double omega, double t_m) {
  const double inv = 1.0 / t_m;
  const double g2 = p.g_am * p.g_am;
  const Complex z = 4.0 * g2 + Complex(inv - p.kappa_a, -2.0 * omega) *
                                   Complex(inv + p.kappa_m, -2.0 * omega);
  return std::norm(z) / (16.0 * g2 * p.kappa_a);
}

inline double squeeze_factor(const SqueezeParams& sq, Channel c) {
  return c == Channel::x ? squeeze_factor_x(sq) : squeeze_factor_y(sq);
}

struct TransientKernel {
  Complex alpha;
  double kcal = 0.0;
  double xi_x = 1.0;
  double xi_y = 1.0;
};

inline TransientKernel transient_kernel(const SystemParams& p, double omega,
                                        double t_m) {
  return {transient_alpha(p, omega, t_m), transient_kcal(p, omega, t_m),
          squeeze_factor_x(p.bath_squeeze), squeeze_factor_y(p.bath_squeeze)};
}

/// Coefficients c of the initial-state operator u = c . R whose symmetrized
/// second moment sets the transient term:
///   x: u = m_p - gBz m_x + alpha a_x
///   y: u = m_x + gBz m_p - alpha a_p
/// The y-channel cavity coefficient carries the sign of the a_p -> m_x
/// coupling (a_p = -a_p' maps the y block onto the x block).
inline Vector4c readout_coefficients(Complex alpha, double gamma_bz, Channel c) {
  Vector4c v = Vector4c::Zero();
  if (c == Channel::x) {
    v(kAx) = alpha;
    v(kMx) = -gamma_bz;
    v(kMp) = 1.0;
  } else {
    v(kAp) = -alpha;
    v(kMx) = 1.0;
    v(kMp) = gamma_bz;
  }
  return v;
}

/// <{u, u^dag}> = 2 c^dag Sigma c for real symmetric Sigma.
inline double anticommutator_moment(const Matrix4& sigma, const Vector4c& c) {
  const Vector4c sc = sigma.cast<Complex>() * c;
  return 2.0 * c.dot(sc).real();
}

/// Transient term <{u,u^dag}>_s / (4 eps^2 t_m) for the initial covariance
/// `sigma`.
inline double transient_term(const SystemParams& p, const Matrix4& sigma,
                             double omega, double t_m, double gamma_bz,
                             Channel c) {
  const Vector4c coeff =
      readout_coefficients(transient_alpha(p, omega, t_m), gamma_bz, c);
  return anticommutator_moment(sigma, coeff) /
         (4.0 * p.epsilon_b * p.epsilon_b * t_m);
}

/// Quadratic dependence of the transient term on the longitudinal kick:
///   transient(gBz) = c0 + c1 gBz + c2 gBz^2.
struct LongitudinalResponse {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  double operator()(double gamma_bz) const {
    return c0 + gamma_bz * (c1 + gamma_bz * c2);
  }
};

inline LongitudinalResponse longitudinal_response(const SystemParams& p,
                                                  const Matrix4& sigma,
                                                  double omega, double t_m,
                                                  Channel c) {
  const Complex alpha = transient_alpha(p, omega, t_m);
  const Vector4c u0 = readout_coefficients(alpha, 0.0, c);
  const Vector4c u1 = readout_coefficients(alpha, 1.0, c) - u0;
  const Matrix4 s = sigma;
  const double norm = 1.0 / (2.0 * p.epsilon_b * p.epsilon_b * t_m);
  const Eigen::Matrix4cd sc = s.cast<Complex>();
  return {norm * u0.dot(sc * u0).real(), norm * 2.0 * u0.dot(sc * u1).real(),
          norm * u1.dot(sc * u1).real()};
}

/// Finite-measurement-time noise PSD of the field-referred, filtered output
/// quadrature. `sigma` is the symmetrized covariance of the pre-pulse state.
/// Components: transient, magnon, cavity.
inline SpectrumSeries transient_noise_psd(const SystemParams& p,
                                          const Matrix4& sigma, double gamma_bz,
                                          double t_m,
                                          const std::vector<double>& grid,
                                          Channel c) {
  if (!(t_m > 0.0)) throw DomainError("transient_noise_psd: t_m must be positive");
  validate_grid(grid);
  const double e2 = p.epsilon_b * p.epsilon_b;
  // A single (1/2 + n_a) prefactor multiplies both stationary terms.
  const double pref = (0.5 + cavity_occupation(p)) / (2.0 * e2);
  const double xi = squeeze_factor(p.bath_squeeze, c);

  SpectrumSeries s;
  s.omega = grid;
  s.channel = c;
  s.values.resize(grid.size());
  auto& transient = s.components["transient"];
  auto& magnon = s.components["magnon"];
  auto& cavity = s.components["cavity"];
  transient.resize(grid.size());
  magnon.resize(grid.size());
  cavity.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = grid[i];
    transient[i] = transient_term(p, sigma, w, t_m, gamma_bz, c);
    magnon[i] = pref * p.kappa_m;
    cavity[i] = pref * transient_kcal(p, w, t_m) * xi;
    s.values[i] = transient[i] + magnon[i] + cavity[i];
  }
  return s;
}

/// Convenience overload: prepares the pre-squeezed stationary state from
/// `p.pre_squeeze` and takes the longitudinal pulse area b0_z in T s.
inline SpectrumSeries transient_noise_psd(const SystemParams& p, double b0_z,
                                          double t_m,
                                          const std::vector<double>& grid,
                                          Channel c) {
  const CovarianceState s0 = prepared_state(p);
  return transient_noise_psd(p, s0.sigma, p.gamma_gyro * b0_z, t_m, grid, c);
}

/// A(omega) = [(omega - i kappa_a/2)(omega + i kappa_m/2) - g^2] / (sqrt2 g).
inline Complex cavity_transfer(const SystemParams& p, double omega) {
  const Complex prod = Complex(omega, -0.5 * p.kappa_a) * Complex(omega, 0.5 * p.kappa_m);
  return (prod - p.g_am * p.g_am) / (std::numbers::sqrt2 * p.g_am);
}

/// Bright-mode transfer A'(omega) with N g^2 in place of g^2.
inline Complex cavity_transfer_nsphere(const SystemParams& p, double omega) {
  const Complex prod = Complex(omega, -0.5 * p.kappa_a) * Complex(omega, 0.5 * p.kappa_m);
  const double n = static_cast<double>(p.n_spheres);
  return (prod - n * p.g_am * p.g_am) / (std::numbers::sqrt2 * p.g_am);
}

/// S_m^s = kappa_m (n_m + 1/2) / (2 eps^2).
inline double stationary_magnon_term(const SystemParams& p) {
  return p.kappa_m * (magnon_occupation(p) + 0.5) /
         (2.0 * p.epsilon_b * p.epsilon_b);
}

/// S_cavity^s = Xi |A|^2 (n_a + 1/2) / (kappa_a eps^2); Xi = 1 without squeezing.
inline double stationary_cavity_term(const SystemParams& p, double omega,
                                     Channel c) {
  return squeeze_factor(p.bath_squeeze, c) * std::norm(cavity_transfer(p, omega)) *
         (cavity_occupation(p) + 0.5) / (p.kappa_a * p.epsilon_b * p.epsilon_b);
}

/// Stationary symmetrized spectrum S_B + S_m^s + S_cavity^s. `signal_psd`
/// (T^2/Hz) is the flat signal term; zero gives the noise-only spectrum.
/// Components: signal, magnon, cavity.
inline SpectrumSeries stationary_psd(const SystemParams& p,
                                     const std::vector<double>& grid, Channel c,
                                     double signal_psd = 0.0) {
  validate_grid(grid);
  SpectrumSeries s;
  s.omega = grid;
  s.channel = c;
  s.values.resize(grid.size());
  auto& signal = s.components["signal"];
  auto& magnon = s.components["magnon"];
  auto& cavity = s.components["cavity"];
  signal.assign(grid.size(), signal_psd);
  magnon.assign(grid.size(), stationary_magnon_term(p));
  cavity.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    cavity[i] = stationary_cavity_term(p, grid[i], c);
    s.values[i] = signal[i] + magnon[i] + cavity[i];
  }
  return s;
}

/// S_r(omega) = (omega^2 + ka^2/4)(omega^2 + km^2/4) / (g^2 ka km)
///              + (g^2 - 2 omega^2) / (ka km) - 1/2.
inline double noise_ratio(const SystemParams& p, double omega) {
  const double w2 = omega * omega;
  const double ka = p.kappa_a;
  const double km = p.kappa_m;
  const double g2 = p.g_am * p.g_am;
  return (w2 + 0.25 * ka * ka) * (w2 + 0.25 * km * km) / (g2 * ka * km) +
         (g2 - 2.0 * w2) / (ka * km) - 0.5;
}

/// S_B + S_m^s / N + |A'|^2 / (N^2 |A|^2) S_cavity^s, evaluated without the
/// removable 1/|A|^2 so the cavity term stays finite where A vanishes.
/// Components: signal, magnon, cavity.
inline SpectrumSeries nsphere_psd(const SystemParams& p,
                                  const std::vector<double>& grid, Channel c,
                                  double signal_psd = 0.0) {
  validate_grid(grid);
  if (p.n_spheres < 1) throw DomainError("nsphere_psd: N must be >= 1");
  const double n = static_cast<double>(p.n_spheres);
  const double e2 = p.epsilon_b * p.epsilon_b;
  const double cav_pref = squeeze_factor(p.bath_squeeze, c) *
                          (cavity_occupation(p) + 0.5) / (p.kappa_a * e2);
  SpectrumSeries s;
  s.omega = grid;
  s.channel = c;
  s.values.resize(grid.size());
  auto& signal = s.components["signal"];
  auto& magnon = s.components["magnon"];
  auto& cavity = s.components["cavity"];
  signal.assign(grid.size(), signal_psd);
  magnon.assign(grid.size(), stationary_magnon_term(p) / n);
  cavity.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    cavity[i] = cav_pref * std::norm(cavity_transfer_nsphere(p, grid[i])) / (n * n);
    s.values[i] = signal[i] + magnon[i] + cavity[i];
  }
  return s;
}

/// Bright-mode cavity/magnon noise ratio for equal occupations, no squeezing:
/// |P - N g^2|^2 / (N g^2 ka km) with P = (omega - i ka/2)(omega + i km/2).
inline double nsphere_noise_ratio(const SystemParams& p, double omega) {
  const double n = static_cast<double>(p.n_spheres);
  const double ng2 = n * p.g_am * p.g_am;
  const Complex prod = Complex(omega, -0.5 * p.kappa_a) * Complex(omega, 0.5 * p.kappa_m);
  return std::norm(prod - ng2) / (ng2 * p.kappa_a * p.kappa_m);
}

/// Noise ratio at N g^2 = ka km / 4: omega^2 [4 omega^2 + (ka - km)^2] / (ka^2 km^2).
inline double nsphere_noise_ratio_opt(double kappa_a, double kappa_m, double omega) {
  if (!(kappa_a > 0.0) || !(kappa_m > 0.0)) {
    throw DomainError("nsphere_noise_ratio_opt: rates must be positive");
  }
  const double d = kappa_a - kappa_m;
  return omega * omega * (4.0 * omega * omega + d * d) /
         (kappa_a * kappa_a * kappa_m * kappa_m);
}

/// Positive root of nsphere_noise_ratio_opt(omega) = 1:
/// sqrt{[-(ka-km)^2 + sqrt((ka-km)^4 + 16 ka^2 km^2)] / 8}.
inline double bandwidth_threshold(double kappa_a, double kappa_m) {
  if (!(kappa_a > 0.0) || !(kappa_m > 0.0)) {
    throw DomainError("bandwidth_threshold: rates must be positive");
  }
  const double d2 = (kappa_a - kappa_m) * (kappa_a - kappa_m);
  const double p2 = kappa_a * kappa_a * kappa_m * kappa_m;
  // -d2 + sqrt(d2^2 + 16 p2) rewritten to avoid cancellation when d2 >> p.
  const double num = 16.0 * p2 / (d2 + std::sqrt(d2 * d2 + 16.0 * p2));
  return std::sqrt(num / 8.0);
}

/// Coupling that cancels the cavity-added noise at omega = 0 for N spheres.
inline double cancellation_coupling(double kappa_a, double kappa_m, int n_spheres = 1) {
  return 0.5 * std::sqrt(kappa_a * kappa_m / static_cast<double>(n_spheres));
}

}  // namespace magsense
