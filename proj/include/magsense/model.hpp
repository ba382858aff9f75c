#pragma once

// Physical parameters of the cavity-magnon sensor and the quantities derived
// from them. All rates and frequencies are angular (rad/s).

#include <cmath>
#include <string>

#include "magsense/errors.hpp"
#include "magsense/units.hpp"

namespace magsense {

/// Squeezed-reservoir parameters: amplitude r >= 0 and phase theta (rad).
struct SqueezeParams {
  double r = 0.0;
  double theta = 0.0;
};

struct SystemParams {
  double omega_a = 0.0;     // cavity resonance
  double omega_m = 0.0;     // magnon (Kittel) resonance
  double kappa_a = 0.0;     // cavity decay
  double kappa_m = 0.0;     // magnon decay
  double g_am = 0.0;        // cavity-magnon coupling
  double epsilon_b = 0.0;   // transverse field coupling, rad/(s T)
  double gamma_gyro = units::kGyromagneticYig;
  double temperature = 0.0; // K
  int n_spheres = 1;
  SqueezeParams bath_squeeze;  // active while sensing
  SqueezeParams pre_squeeze;   // active while preparing the initial state
  double pulse_phase = 0.0;    // omega_m * t at pulse arrival
};

/// Geometry of a single sphere in the cavity, used to derive g_am.
struct SphereGeometry {
  double spin_s = 2.5;
  double n_spins = 0.0;
  double cavity_volume = 0.0;  // m^3
  double mu0 = units::kMu0;
};

/// Delta-pulse field B(t) = B0 delta(t). Components are pulse areas in T s.
struct FieldPulse {
  double b0_x = 0.0;
  double b0_y = 0.0;
  double b0_z = 0.0;

  /// Pulse whose longitudinal component has the given dimensionless phase
  /// gamma * B0_z.
  static FieldPulse with_longitudinal_phase(double b0_x, double b0_y,
                                            double gamma_bz,
                                            double gamma_gyro) {
    return {b0_x, b0_y, gamma_bz / gamma_gyro};
  }
};

/// Dimensionless longitudinal kick gamma * B0_z.
inline double longitudinal_phase(const SystemParams& p, const FieldPulse& b) {
  return p.gamma_gyro * b.b0_z;
}

/// Bose-Einstein occupation 1 / (exp(hbar omega / kB T) - 1). Exactly zero at
/// T = 0.
inline double thermal_occupation(double omega, double temperature) {
  if (!(omega > 0.0)) {
    throw DomainError("thermal_occupation: omega must be positive");
  }
  if (temperature < 0.0) {
    throw DomainError("thermal_occupation: temperature must be >= 0");
  }
  if (temperature == 0.0) return 0.0;
  const double x = units::kHbar * omega / (units::kBoltzmann * temperature);
  return 1.0 / std::expm1(x);
}

/// Input-noise correlators of a squeezed thermal reservoir:
///   <a_in a_in^dag> = (N + 1) delta,  <a_in a_in> = M delta
/// with N = sinh^2 r + n cosh 2r and M = (2n + 1) e^{i theta} sinh r cosh r.
struct BathCorrelators {
  double n_q = 0.0;
  double re_m = 0.0;
  double im_m = 0.0;
};

inline BathCorrelators bath_correlators(const SqueezeParams& sq, double n_th) {
  const double sh = std::sinh(sq.r);
  const double ch = std::cosh(sq.r);
  const double n_q = sh * sh + n_th * std::cosh(2.0 * sq.r);
  const double m_abs = (2.0 * n_th + 1.0) * sh * ch;
  return {n_q, m_abs * std::cos(sq.theta), m_abs * std::sin(sq.theta)};
}

/// Quadrature noise factor cosh 2r +/- cos(theta) sinh 2r; '+' for the x
/// channel, '-' for the y channel.
inline double squeeze_factor_x(const SqueezeParams& sq) {
  return std::cosh(2.0 * sq.r) + std::cos(sq.theta) * std::sinh(2.0 * sq.r);
}
inline double squeeze_factor_y(const SqueezeParams& sq) {
  return std::cosh(2.0 * sq.r) - std::cos(sq.theta) * std::sinh(2.0 * sq.r);
}

/// g_am = gamma B_a sqrt(2 s N_s) / 2 with the vacuum field per photon
/// B_a = sqrt(hbar omega_a mu0 / (2 V_a)).
inline double coupling_from_geometry(const SphereGeometry& geom, double omega_a,
                                     double gamma_gyro = units::kGyromagneticYig) {
  if (!(geom.spin_s > 0.0) || !(geom.n_spins > 0.0)) {
    throw DomainError("coupling_from_geometry: spin_s and n_spins must be positive");
  }
  if (!(geom.cavity_volume > 0.0)) {
    throw DomainError("coupling_from_geometry: cavity_volume must be positive");
  }
  if (!(omega_a > 0.0) || !(geom.mu0 > 0.0) || !(gamma_gyro > 0.0)) {
    throw DomainError("coupling_from_geometry: omega_a, mu0, gamma must be positive");
  }
  const double b_a =
      std::sqrt(units::kHbar * omega_a * geom.mu0 / (2.0 * geom.cavity_volume));
  return 0.5 * gamma_gyro * b_a * std::sqrt(2.0 * geom.spin_s * geom.n_spins);
}

/// Default transverse Zeeman coefficient (gamma / 2) sqrt(2 s N_s) of the
/// Holstein-Primakoff magnon. Overridable through SystemParams::epsilon_b.
inline double epsilon_b_default(double gamma_gyro, double spin_s, double n_spins) {
  if (gamma_gyro < 0.0 || spin_s < 0.0 || n_spins < 0.0) {
    throw DomainError("epsilon_b_default: inputs must be non-negative");
  }
  return 0.5 * gamma_gyro * std::sqrt(2.0 * spin_s * n_spins);
}

inline double cavity_occupation(const SystemParams& p) {
  return thermal_occupation(p.omega_a, p.temperature);
}
inline double magnon_occupation(const SystemParams& p) {
  return thermal_occupation(p.omega_m, p.temperature);
}

/// Throws DomainError naming the first offending field.
inline void validate(const SystemParams& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string(name) + " must be positive and finite");
    }
  };
  positive(p.omega_a, "omega_a");
  positive(p.omega_m, "omega_m");
  positive(p.kappa_a, "kappa_a");
  positive(p.kappa_m, "kappa_m");
  positive(p.g_am, "g_am");
  positive(p.epsilon_b, "epsilon_b");
  positive(p.gamma_gyro, "gamma_gyro");
  if (!(p.temperature >= 0.0) || !std::isfinite(p.temperature)) {
    throw DomainError("temperature must be >= 0");
  }
  if (p.n_spheres < 1) throw DomainError("n_spheres must be >= 1");
  if (!(p.bath_squeeze.r >= 0.0)) throw DomainError("bath_squeeze.r must be >= 0");
  if (!(p.pre_squeeze.r >= 0.0)) throw DomainError("pre_squeeze.r must be >= 0");
  const double na = cavity_occupation(p);
  const double nm = magnon_occupation(p);
  if (!std::isfinite(na) || !std::isfinite(nm)) {
    throw DomainError("thermal occupation is not finite");
  }
}

/// Spin content of the reference YIG sample.
inline constexpr double kReferenceSpin = 2.5;
inline constexpr double kReferenceSpinCount = 3.5e9;

/// Operating point: omega/2pi = 7.875 GHz, T = 5 mK, kappa_a/2pi = 2.09 MHz,
/// kappa_m/2pi = 6 MHz, g_am/2pi = 177 kHz, no squeezing.
inline SystemParams reference_parameters() {
  SystemParams p;
  p.omega_a = units::angular(7.875e9);
  p.omega_m = p.omega_a;
  p.kappa_a = units::angular(2.09e6);
  p.kappa_m = units::angular(6.0e6);
  p.g_am = units::angular(1.77e5);
  p.gamma_gyro = units::kGyromagneticYig;
  p.epsilon_b =
      epsilon_b_default(p.gamma_gyro, kReferenceSpin, kReferenceSpinCount);
  p.temperature = 5.0e-3;
  p.n_spheres = 1;
  return p;
}

}  // namespace magsense
