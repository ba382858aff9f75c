#pragma once

// Unit-tagged scalar strings such as "2.09 MHz", "5 mK", "180 deg",
// "3/kappa_m" or "1e-6 T*s", converted to internal SI/angular units.

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

#include "magsense/units.hpp"

namespace magsense::io {

enum class Dimension {
  rate,         // angular frequency, rad/s
  temperature,  // K
  angle,        // rad
  time,         // s
  gyromagnetic, // rad/(s T)
  pulse_area,   // T s
  spectral,     // T^2/Hz
  volume,       // m^3
  field_coupling, // rad/(s T), epsilon_B
};

inline std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::rate: return "frequency";
    case Dimension::temperature: return "temperature";
    case Dimension::angle: return "angle";
    case Dimension::time: return "time";
    case Dimension::gyromagnetic: return "gyromagnetic ratio";
    case Dimension::pulse_area: return "pulse area";
    case Dimension::spectral: return "spectral density";
    case Dimension::volume: return "volume";
    case Dimension::field_coupling: return "field coupling";
  }
  return "?";
}

/// Bad number or unit; the message lists the accepted units.
class UnitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rates referenced to kappa_m ("2 kappa_m", "3/kappa_m") need its value.
struct UnitContext {
  std::optional<double> kappa_m;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline const std::map<std::string, double, std::less<>>& unit_table(Dimension d) {
  using units::kTwoPi;
  static const std::map<std::string, double, std::less<>> rate{
      {"Hz", kTwoPi}, {"kHz", kTwoPi * 1e3}, {"MHz", kTwoPi * 1e6},
      {"GHz", kTwoPi * 1e9}, {"rad/s", 1.0}};
  static const std::map<std::string, double, std::less<>> temperature{
      {"K", 1.0}, {"mK", 1e-3}, {"uK", 1e-6}};
  static const std::map<std::string, double, std::less<>> angle{
      {"rad", 1.0}, {"deg", std::numbers::pi / 180.0}, {"pi", std::numbers::pi}};
  static const std::map<std::string, double, std::less<>> time{
      {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
  static const std::map<std::string, double, std::less<>> gyro{
      {"Hz/T", kTwoPi}, {"MHz/T", kTwoPi * 1e6}, {"GHz/T", kTwoPi * 1e9},
      {"rad/(s*T)", 1.0}};
  static const std::map<std::string, double, std::less<>> pulse{
      {"T*s", 1.0}, {"mT*s", 1e-3}, {"uT*s", 1e-6}, {"nT*s", 1e-9}, {"pT*s", 1e-12}};
  static const std::map<std::string, double, std::less<>> spectral{{"T^2/Hz", 1.0}};
  static const std::map<std::string, double, std::less<>> volume{
      {"m^3", 1.0}, {"cm^3", 1e-6}, {"mm^3", 1e-9}};
  switch (d) {
    case Dimension::rate: return rate;
    case Dimension::temperature: return temperature;
    case Dimension::angle: return angle;
    case Dimension::time: return time;
    case Dimension::gyromagnetic:
    case Dimension::field_coupling: return gyro;
    case Dimension::pulse_area: return pulse;
    case Dimension::spectral: return spectral;
    case Dimension::volume: return volume;
  }
  return rate;
}

inline std::string accepted_units(Dimension d) {
  std::string out;
  for (const auto& [name, f] : unit_table(d)) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  if (d == Dimension::rate) out += ", kappa_m";
  if (d == Dimension::time) out += ", <x>/kappa_m";
  return out;
}

inline double parse_number(std::string_view s, std::string_view whole) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw UnitError("cannot read a number from '" + std::string(whole) + "'");
  }
  if (!std::isfinite(v)) throw UnitError("non-finite value in '" + std::string(whole) + "'");
  return v;
}

}  // namespace detail

/// Parses "<number> <unit>" (whitespace optional before a unit that does not
/// start with a digit). Dimensionless kappa_m references resolve via ctx.
inline double parse_quantity(std::string_view text, Dimension dim, const UnitContext& ctx = {}) {
  const std::string_view s = detail::trim(text);
  // "<x>/kappa_m" for times.
  if (dim == Dimension::time) {
    constexpr std::string_view suffix = "/kappa_m";
    if (s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix) {
      if (!ctx.kappa_m) throw UnitError("'" + std::string(s) + "' needs kappa_m");
      const double x = detail::parse_number(detail::trim(s.substr(0, s.size() - suffix.size())), s);
      return x / *ctx.kappa_m;
    }
  }
  std::size_t split = 0;
  while (split < s.size() && !std::isspace(static_cast<unsigned char>(s[split]))) ++split;
  std::string_view num = s.substr(0, split);
  std::string_view unit = detail::trim(s.substr(split));
  if (unit.empty()) {
    // "5mK": split at the first letter that cannot belong to a number.
    std::size_t k = 0;
    while (k < s.size()) {
      const char c = s[k];
      const bool numeric = std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' ||
                           c == '+' ||
                           ((c == 'e' || c == 'E') && k + 1 < s.size() &&
                            (std::isdigit(static_cast<unsigned char>(s[k + 1])) ||
                             s[k + 1] == '-' || s[k + 1] == '+'));
      if (!numeric) break;
      ++k;
    }
    num = s.substr(0, k);
    unit = s.substr(k);
  }
  if (unit.empty()) {
    throw UnitError("missing unit in '" + std::string(s) + "' (" +
                    std::string(to_string(dim)) + "; accepted: " + detail::accepted_units(dim) + ")");
  }
  const double x = detail::parse_number(num, s);
  if (dim == Dimension::rate && unit == "kappa_m") {
    if (!ctx.kappa_m) throw UnitError("'" + std::string(s) + "' needs kappa_m");
    return x * *ctx.kappa_m;
  }
  const auto& table = detail::unit_table(dim);
  const auto it = table.find(unit);
  if (it == table.end()) {
    throw UnitError("unknown " + std::string(to_string(dim)) + " unit '" + std::string(unit) +
                    "' (accepted: " + detail::accepted_units(dim) + ")");
  }
  return x * it->second;
}

}  // namespace magsense::io
