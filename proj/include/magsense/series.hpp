#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "magsense/errors.hpp"
#include "magsense/model.hpp"

namespace magsense {

/// Readout quadrature: x reads a_x (B_x and B_z), y reads a_p (B_y and B_z).
enum class Channel { x, y };

enum class SpectrumUnits {
  tesla2_per_hertz,    // field-referred PSD
  epsilon_normalized,  // PSD * epsilon_B^2
};

inline std::string_view to_string(Channel c) { return c == Channel::x ? "x" : "y"; }

inline std::string_view to_string(SpectrumUnits u) {
  return u == SpectrumUnits::tesla2_per_hertz ? "T^2/Hz" : "epsilonB-normalized";
}

/// PSD values on a strictly increasing angular-frequency grid, with an
/// optional named breakdown and an optional standard-error channel.
struct SpectrumSeries {
  std::vector<double> omega;
  std::vector<double> values;
  Channel channel = Channel::x;
  SpectrumUnits units = SpectrumUnits::tesla2_per_hertz;
  std::map<std::string, std::vector<double>> components;
  std::vector<double> std_error;

  std::size_t size() const { return omega.size(); }

  bool has_component(const std::string& name) const {
    return components.find(name) != components.end();
  }

  const std::vector<double>& component(const std::string& name) const {
    const auto it = components.find(name);
    if (it == components.end()) {
      throw std::out_of_range("spectrum has no component '" + name + "'");
    }
    return it->second;
  }
};

inline void validate_grid(const std::vector<double>& omega) {
  if (omega.empty()) throw DomainError("frequency grid is empty");
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (!std::isfinite(omega[i])) throw DomainError("frequency grid has non-finite entry");
    if (i > 0 && !(omega[i] > omega[i - 1])) {
      throw DomainError("frequency grid must be strictly increasing");
    }
  }
}

/// n evenly spaced points on [lo, hi]; endpoints exact.
inline std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n == 0) throw DomainError("grid needs at least one point");
  if (n == 1) return {lo};
  std::vector<double> g(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + step * static_cast<double>(i);
  g.back() = hi;
  return g;
}

/// omega / kappa_m in [-5, 5], 1001 points.
inline std::vector<double> default_grid(const SystemParams& p) {
  return linear_grid(-5.0 * p.kappa_m, 5.0 * p.kappa_m, 1001);
}

/// Rescales every PSD channel between field-referred and epsilon_B-normalized
/// units.
inline SpectrumSeries to_units(SpectrumSeries s, const SystemParams& p,
                               SpectrumUnits target) {
  if (s.units == target) return s;
  const double e2 = p.epsilon_b * p.epsilon_b;
  const double f = target == SpectrumUnits::epsilon_normalized ? e2 : 1.0 / e2;
  auto scale = [f](std::vector<double>& v) {
    for (double& x : v) x *= f;
  };
  scale(s.values);
  scale(s.std_error);
  for (auto& [name, v] : s.components) scale(v);
  s.units = target;
  return s;
}

}  // namespace magsense
