#pragma once

// Scenario files (TOML). Every dimensional value is a unit-tagged string;
// unknown keys are rejected with their dotted path and line.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <toml.hpp>

#include "magsense/io/quantity.hpp"
#include "magsense/model.hpp"
#include "magsense/monte_carlo.hpp"
#include "magsense/series.hpp"

namespace magsense::io {

/// Malformed scenario: wrong type, bad unit, unknown or missing key.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& path, std::int64_t line, const std::string& what)
      : std::runtime_error(format(path, line, what)), path_(path), line_(line) {}

  const std::string& path() const { return path_; }
  std::int64_t line() const { return line_; }

 private:
  static std::string format(const std::string& path, std::int64_t line, const std::string& what) {
    std::ostringstream os;
    os << (path.empty() ? "<root>" : path);
    if (line > 0) os << " (line " << line << ")";
    os << ": " << what;
    return os.str();
  }

  std::string path_;
  std::int64_t line_;
};

enum class Task {
  steady_spectrum,
  transient_spectrum,
  noise_ratio,
  snr,
  nsphere,
  reconstruct,
  sweep,
  figure_data,
};

inline constexpr std::pair<Task, std::string_view> kTaskNames[] = {
    {Task::steady_spectrum, "steady-spectrum"},
    {Task::transient_spectrum, "transient-spectrum"},
    {Task::noise_ratio, "noise-ratio"},
    {Task::snr, "snr"},
    {Task::nsphere, "nsphere"},
    {Task::reconstruct, "reconstruct"},
    {Task::sweep, "sweep"},
    {Task::figure_data, "figure-data"},
};

inline std::string_view to_string(Task t) {
  for (const auto& [task, name] : kTaskNames) {
    if (task == t) return name;
  }
  return "?";
}

inline std::optional<Task> parse_task(std::string_view s) {
  for (const auto& [task, name] : kTaskNames) {
    if (name == s) return task;
  }
  return std::nullopt;
}

enum class OutputFormat { csv, json };

struct OutputSpec {
  OutputFormat format = OutputFormat::csv;
  SpectrumUnits units = SpectrumUnits::tesla2_per_hertz;
  std::string dir = ".";
};

enum class SnrKind { transient, stationary };
enum class ReconstructSource { synthetic, monte_carlo, files };
enum class MapAxis { g_am, kappa_a };

struct MapSpec {
  MapAxis axis = MapAxis::g_am;
  std::vector<double> values;  // rad/s
  double level = 1.0;
};

struct ReconstructSpec {
  ReconstructSource source = ReconstructSource::synthetic;
  std::optional<double> bias;   // T s
  std::optional<double> ref_x;  // T s
  std::optional<double> ref_y;  // T s
  std::string measurements;     // directory for source = files
  bool write_measurements = false;
};

struct SweepAxis {
  std::string field;
  std::vector<double> values;  // internal units
};

struct SweepSpec {
  std::vector<SweepAxis> axes;
  double omega = 0.0;  // rad/s
};

struct ScenarioConfig {
  std::optional<Task> task;
  SystemParams system;
  std::vector<double> grid;
  std::vector<Channel> channels{Channel::x, Channel::y};
  std::optional<double> t_m;
  FieldPulse pulse;
  double signal_psd = 1e-24;
  std::optional<MonteCarloOptions> monte_carlo;
  SnrKind snr_kind = SnrKind::stationary;
  std::vector<int> sphere_counts;
  std::optional<MapSpec> map;
  ReconstructSpec reconstruct;
  SweepSpec sweep;
  OutputSpec output;
  std::string source_text;
  std::string source_path;
};

// ---- sweepable fields ---------------------------------------------------

struct SweepField {
  std::string_view name;
  std::optional<Dimension> dim;  // nullopt: dimensionless
  std::function<void(ScenarioConfig&, double)> set;
};

inline const std::vector<SweepField>& sweep_fields() {
  static const std::vector<SweepField> fields{
      {"omega_a", Dimension::rate, [](ScenarioConfig& c, double v) { c.system.omega_a = v; }},
      {"omega_m", Dimension::rate, [](ScenarioConfig& c, double v) { c.system.omega_m = v; }},
      {"kappa_a", Dimension::rate, [](ScenarioConfig& c, double v) { c.system.kappa_a = v; }},
      {"kappa_m", Dimension::rate, [](ScenarioConfig& c, double v) { c.system.kappa_m = v; }},
      {"g_am", Dimension::rate, [](ScenarioConfig& c, double v) { c.system.g_am = v; }},
      {"epsilon_b", Dimension::field_coupling,
       [](ScenarioConfig& c, double v) { c.system.epsilon_b = v; }},
      {"gamma", Dimension::gyromagnetic,
       [](ScenarioConfig& c, double v) { c.system.gamma_gyro = v; }},
      {"temperature", Dimension::temperature,
       [](ScenarioConfig& c, double v) { c.system.temperature = v; }},
      {"pulse_phase", Dimension::angle,
       [](ScenarioConfig& c, double v) { c.system.pulse_phase = v; }},
      {"n_spheres", std::nullopt,
       [](ScenarioConfig& c, double v) {
         if (v != std::floor(v)) throw DomainError("n_spheres must be an integer");
         c.system.n_spheres = static_cast<int>(v);
       }},
      {"bath_squeeze.r", std::nullopt,
       [](ScenarioConfig& c, double v) { c.system.bath_squeeze.r = v; }},
      {"bath_squeeze.theta", Dimension::angle,
       [](ScenarioConfig& c, double v) { c.system.bath_squeeze.theta = v; }},
      {"pre_squeeze.r", std::nullopt,
       [](ScenarioConfig& c, double v) { c.system.pre_squeeze.r = v; }},
      {"pre_squeeze.theta", Dimension::angle,
       [](ScenarioConfig& c, double v) { c.system.pre_squeeze.theta = v; }},
      {"t_m", Dimension::time, [](ScenarioConfig& c, double v) { c.t_m = v; }},
      {"gamma_bz", std::nullopt,
       [](ScenarioConfig& c, double v) { c.pulse.b0_z = v / c.system.gamma_gyro; }},
  };
  return fields;
}

inline const SweepField* find_sweep_field(std::string_view name) {
  for (const auto& f : sweep_fields()) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

// ---- reader -------------------------------------------------------------

namespace detail {

inline std::int64_t line_of(const toml::node& n) {
  return static_cast<std::int64_t>(n.source().begin.line);
}

/// Wraps one TOML table; remembers which keys were read so leftovers can be
/// reported as unknown.
class Section {
 public:
  Section(const toml::table& t, std::string path) : t_(t), path_(std::move(path)) {}

  std::string key_path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const toml::node* get(std::string_view key) {
    seen_.insert(std::string(key));
    return t_.get(key);
  }

  bool has(std::string_view key) const { return t_.contains(key); }

  [[noreturn]] void fail(std::string_view key, const toml::node* n, const std::string& what) const {
    throw SchemaError(key_path(key), n ? line_of(*n) : line_of(t_), what);
  }

  std::optional<std::string> string(std::string_view key) {
    const toml::node* n = get(key);
    if (!n) return std::nullopt;
    if (!n->is_string()) fail(key, n, "expected a string");
    return n->as_string()->get();
  }

  std::optional<double> number(std::string_view key) {
    const toml::node* n = get(key);
    if (!n) return std::nullopt;
    if (auto v = n->value<double>(); v && (n->is_integer() || n->is_floating_point())) {
      if (!std::isfinite(*v)) fail(key, n, "value must be finite");
      return *v;
    }
    fail(key, n, "expected a number");
  }

  std::optional<std::int64_t> integer(std::string_view key) {
    const toml::node* n = get(key);
    if (!n) return std::nullopt;
    if (!n->is_integer()) fail(key, n, "expected an integer");
    return n->as_integer()->get();
  }

  std::optional<bool> boolean(std::string_view key) {
    const toml::node* n = get(key);
    if (!n) return std::nullopt;
    if (!n->is_boolean()) fail(key, n, "expected true or false");
    return n->as_boolean()->get();
  }

  double parse_node(std::string_view key, const toml::node* n, Dimension dim,
                    const UnitContext& ctx) const {
    if (!n->is_string()) {
      fail(key, n, "expected a unit-tagged string such as \"1 " +
                       first_unit(dim) + "\" (" + std::string(to_string(dim)) + ")");
    }
    try {
      return parse_quantity(n->as_string()->get(), dim, ctx);
    } catch (const UnitError& e) {
      fail(key, n, e.what());
    }
  }

  std::optional<double> quantity(std::string_view key, Dimension dim, const UnitContext& ctx = {}) {
    const toml::node* n = get(key);
    if (!n) return std::nullopt;
    return parse_node(key, n, dim, ctx);
  }

  std::optional<Section> table(std::string_view key) {
    const toml::node* n = get(key);
    if (!n) return std::nullopt;
    if (!n->is_table()) fail(key, n, "expected a table");
    return Section(*n->as_table(), key_path(key));
  }

  const toml::array* array(std::string_view key) {
    const toml::node* n = get(key);
    if (!n) return nullptr;
    if (!n->is_array()) fail(key, n, "expected an array");
    return n->as_array();
  }

  /// Rejects keys that were never read.
  void finish() const {
    for (auto&& [k, v] : t_) {
      if (!seen_.count(std::string(k.str()))) {
        throw SchemaError(key_path(k.str()), line_of(v), "unknown key");
      }
    }
  }

  const toml::table& raw() const { return t_; }
  const std::string& path() const { return path_; }

 private:
  static std::string first_unit(Dimension d) {
    const auto& t = io::detail::unit_table(d);
    return t.empty() ? std::string() : t.begin()->first;
  }

  const toml::table& t_;
  std::string path_;
  std::set<std::string> seen_;
};

inline Channel parse_channel(Section& s, std::string_view key, const toml::node& n) {
  if (!n.is_string()) s.fail(key, &n, "channel must be \"x\" or \"y\"");
  const std::string v = n.as_string()->get();
  if (v == "x") return Channel::x;
  if (v == "y") return Channel::y;
  s.fail(key, &n, "channel must be \"x\" or \"y\", got '" + v + "'");
}

inline SqueezeParams read_squeeze(Section& parent, std::string_view key) {
  SqueezeParams sq;
  if (auto t = parent.table(key)) {
    if (auto r = t->number("r")) {
      if (*r < 0.0) t->fail("r", t->get("r"), "squeezing amplitude must be >= 0");
      sq.r = *r;
    }
    if (auto th = t->quantity("theta", Dimension::angle)) sq.theta = *th;
    t->finish();
  }
  return sq;
}

inline SystemParams read_system(Section& s) {
  SystemParams p = reference_parameters();
  auto req_rate = [&](std::string_view key, double& target) {
    if (auto v = s.quantity(key, Dimension::rate)) target = *v;
  };
  req_rate("omega_a", p.omega_a);
  p.omega_m = p.omega_a;
  req_rate("omega_m", p.omega_m);
  req_rate("kappa_a", p.kappa_a);
  req_rate("kappa_m", p.kappa_m);
  const UnitContext ctx{p.kappa_m};
  if (auto g = s.quantity("g_am", Dimension::rate, ctx)) p.g_am = *g;
  bool gamma_set = false;
  if (auto g = s.quantity("gamma", Dimension::gyromagnetic)) {
    p.gamma_gyro = *g;
    gamma_set = true;
  }
  if (auto e = s.quantity("epsilon_b", Dimension::field_coupling)) {
    p.epsilon_b = *e;
  } else if (gamma_set) {
    p.epsilon_b = epsilon_b_default(p.gamma_gyro, kReferenceSpin, kReferenceSpinCount);
  }
  if (auto t = s.quantity("temperature", Dimension::temperature)) p.temperature = *t;
  if (auto n = s.integer("n_spheres")) {
    if (*n < 1) s.fail("n_spheres", s.get("n_spheres"), "must be >= 1");
    p.n_spheres = static_cast<int>(*n);
  }
  if (auto ph = s.quantity("pulse_phase", Dimension::angle)) p.pulse_phase = *ph;
  p.bath_squeeze = read_squeeze(s, "bath_squeeze");
  p.pre_squeeze = read_squeeze(s, "pre_squeeze");
  s.finish();
  return p;
}

inline std::vector<double> read_values(Section& s, std::string_view key, std::optional<Dimension> dim,
                                       const UnitContext& ctx) {
  const toml::array* arr = s.array(key);
  std::vector<double> out;
  if (!arr) return out;
  for (const auto& el : *arr) {
    if (dim) {
      out.push_back(s.parse_node(key, &el, *dim, ctx));
    } else if (auto v = el.value<double>(); v && (el.is_integer() || el.is_floating_point())) {
      out.push_back(*v);
    } else {
      s.fail(key, &el, "expected numbers");
    }
  }
  return out;
}

/// Either `values = [...]` or `from`, `to`, `points` (+ optional
/// scale = "linear" | "log").
inline std::vector<double> read_range(Section& s, std::optional<Dimension> dim,
                                      const UnitContext& ctx) {
  if (s.has("values")) {
    for (auto k : {"from", "to", "points", "scale"}) {
      if (s.has(k)) s.fail(k, s.get(k), "cannot be combined with 'values'");
    }
    auto v = read_values(s, "values", dim, ctx);
    if (v.empty()) s.fail("values", s.get("values"), "must not be empty");
    return v;
  }
  auto scalar = [&](std::string_view key) -> double {
    if (!s.has(key)) s.fail(key, nullptr, "missing (give 'values' or 'from'/'to'/'points')");
    if (dim) return *s.quantity(key, *dim, ctx);
    return *s.number(key);
  };
  const double lo = scalar("from");
  const double hi = scalar("to");
  const auto n = s.integer("points");
  if (!n) s.fail("points", nullptr, "missing");
  if (*n < 1) s.fail("points", s.get("points"), "must be >= 1");
  const std::string scale = s.string("scale").value_or("linear");
  if (scale == "linear") return linear_grid(lo, hi, static_cast<std::size_t>(*n));
  if (scale != "log") s.fail("scale", s.get("scale"), "must be \"linear\" or \"log\"");
  if (!(lo > 0.0) || !(hi > 0.0)) s.fail("from", s.get("from"), "log scale needs positive bounds");
  std::vector<double> out = linear_grid(std::log(lo), std::log(hi), static_cast<std::size_t>(*n));
  for (double& x : out) x = std::exp(x);
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace detail

/// Parses scenario text; `origin` names the file in diagnostics.
inline ScenarioConfig parse_scenario(std::string_view text, std::string origin = "<config>") {
  toml::table root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    throw SchemaError("", static_cast<std::int64_t>(e.source().begin.line),
                      std::string(e.description()));
  }
  ScenarioConfig cfg;
  cfg.source_text = std::string(text);
  cfg.source_path = origin;
  detail::Section top(root, "");

  if (auto t = top.string("task")) {
    cfg.task = parse_task(*t);
    if (!cfg.task) top.fail("task", top.get("task"), "unknown task '" + *t + "'");
  }

  if (auto s = top.table("system")) cfg.system = detail::read_system(*s);
  else cfg.system = reference_parameters();
  const UnitContext ctx{cfg.system.kappa_m};

  if (const toml::array* ch = top.array("channels")) {
    cfg.channels.clear();
    for (const auto& el : *ch) cfg.channels.push_back(detail::parse_channel(top, "channels", el));
    if (cfg.channels.empty()) top.fail("channels", top.get("channels"), "must not be empty");
  }

  if (auto g = top.table("grid")) {
    cfg.grid = detail::read_range(*g, Dimension::rate, ctx);
    g->finish();
  } else {
    cfg.grid = default_grid(cfg.system);
  }

  if (auto t = top.table("transient")) {
    if (auto tm = t->quantity("t_m", Dimension::time, ctx)) cfg.t_m = *tm;
    t->finish();
  }

  if (auto p = top.table("pulse")) {
    if (auto v = p->quantity("b0_x", Dimension::pulse_area)) cfg.pulse.b0_x = *v;
    if (auto v = p->quantity("b0_y", Dimension::pulse_area)) cfg.pulse.b0_y = *v;
    if (p->has("b0_z") && p->has("gamma_bz")) {
      p->fail("gamma_bz", p->get("gamma_bz"), "give either b0_z or gamma_bz, not both");
    }
    if (auto v = p->quantity("b0_z", Dimension::pulse_area)) cfg.pulse.b0_z = *v;
    if (auto v = p->number("gamma_bz")) cfg.pulse.b0_z = *v / cfg.system.gamma_gyro;
    p->finish();
  }

  if (auto m = top.table("monte_carlo")) {
    MonteCarloOptions o;
    if (auto n = m->integer("n_traj")) {
      if (*n < 2) m->fail("n_traj", m->get("n_traj"), "must be >= 2");
      o.n_traj = static_cast<std::size_t>(*n);
    }
    if (auto s = m->integer("seed")) o.seed = static_cast<std::uint64_t>(*s);
    if (auto d = m->number("step_divisor")) {
      if (!(*d >= 1.0)) m->fail("step_divisor", m->get("step_divisor"), "must be >= 1");
      o.step_divisor = *d;
    }
    if (auto w = m->number("window_span")) {
      if (!(*w > 0.0)) m->fail("window_span", m->get("window_span"), "must be positive");
      o.window_span = *w;
    }
    m->finish();
    cfg.monte_carlo = o;
  }

  if (auto s = top.table("snr")) {
    if (auto k = s->string("kind")) {
      if (*k == "transient") cfg.snr_kind = SnrKind::transient;
      else if (*k == "stationary") cfg.snr_kind = SnrKind::stationary;
      else s->fail("kind", s->get("kind"), "must be \"transient\" or \"stationary\"");
    }
    if (auto v = s->quantity("signal_psd", Dimension::spectral)) {
      if (*v < 0.0) s->fail("signal_psd", s->get("signal_psd"), "must be >= 0");
      cfg.signal_psd = *v;
    }
    s->finish();
  }

  if (auto n = top.table("nsphere")) {
    if (const toml::array* c = n->array("counts")) {
      for (const auto& el : *c) {
        if (!el.is_integer() || el.as_integer()->get() < 1) {
          n->fail("counts", &el, "sphere counts must be positive integers");
        }
        cfg.sphere_counts.push_back(static_cast<int>(el.as_integer()->get()));
      }
    }
    n->finish();
  }

  if (auto m = top.table("map")) {
    MapSpec spec;
    const std::string axis = m->string("axis").value_or("g_am");
    if (axis == "g_am") spec.axis = MapAxis::g_am;
    else if (axis == "kappa_a") spec.axis = MapAxis::kappa_a;
    else m->fail("axis", m->get("axis"), "must be \"g_am\" or \"kappa_a\"");
    if (auto l = m->number("level")) spec.level = *l;
    spec.values = detail::read_range(*m, Dimension::rate, ctx);
    for (double v : spec.values) {
      if (!(v > 0.0)) m->fail(axis, nullptr, "map values must be positive");
    }
    m->finish();
    cfg.map = spec;
  }

  if (auto r = top.table("reconstruct")) {
    if (auto s = r->string("source")) {
      if (*s == "synthetic") cfg.reconstruct.source = ReconstructSource::synthetic;
      else if (*s == "monte-carlo") cfg.reconstruct.source = ReconstructSource::monte_carlo;
      else if (*s == "files") cfg.reconstruct.source = ReconstructSource::files;
      else r->fail("source", r->get("source"), "must be \"synthetic\", \"monte-carlo\" or \"files\"");
    }
    cfg.reconstruct.bias = r->quantity("bias", Dimension::pulse_area);
    cfg.reconstruct.ref_x = r->quantity("ref_x", Dimension::pulse_area);
    cfg.reconstruct.ref_y = r->quantity("ref_y", Dimension::pulse_area);
    if (auto d = r->string("measurements")) cfg.reconstruct.measurements = *d;
    if (auto w = r->boolean("write_measurements")) cfg.reconstruct.write_measurements = *w;
    if (cfg.reconstruct.source == ReconstructSource::files && cfg.reconstruct.measurements.empty()) {
      r->fail("measurements", nullptr, "required when source = \"files\"");
    }
    r->finish();
  }

  if (auto s = top.table("sweep")) {
    if (auto w = s->quantity("omega", Dimension::rate, ctx)) cfg.sweep.omega = *w;
    const toml::node* axes = s->get("axes");
    if (!axes) s->fail("axes", nullptr, "missing");
    if (!axes->is_array_of_tables()) {
      if (axes->is_array() && axes->as_array()->empty()) s->fail("axes", axes, "needs 1 or 2 axes");
      s->fail("axes", axes, "expected [[sweep.axes]] tables");
    }
    const toml::array& arr = *axes->as_array();
    if (arr.empty() || arr.size() > 2) s->fail("axes", axes, "needs 1 or 2 axes");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      detail::Section a(*arr[i].as_table(), s->key_path("axes") + "[" + std::to_string(i) + "]");
      const auto field = a.string("field");
      if (!field) a.fail("field", nullptr, "missing");
      const SweepField* f = find_sweep_field(*field);
      if (!f) {
        a.fail("field", a.get("field"),
               "'" + *field + "' is not a numeric parameter that can be swept");
      }
      SweepAxis axis{*field, detail::read_range(a, f->dim, ctx)};
      a.finish();
      for (const auto& prev : cfg.sweep.axes) {
        if (prev.field == axis.field) a.fail("field", a.get("field"), "axis repeated");
      }
      cfg.sweep.axes.push_back(std::move(axis));
    }
    s->finish();
  }

  if (auto o = top.table("output")) {
    if (auto f = o->string("format")) {
      if (*f == "csv") cfg.output.format = OutputFormat::csv;
      else if (*f == "json") cfg.output.format = OutputFormat::json;
      else o->fail("format", o->get("format"), "must be \"csv\" or \"json\"");
    }
    if (auto u = o->string("units")) {
      if (*u == "T^2/Hz") cfg.output.units = SpectrumUnits::tesla2_per_hertz;
      else if (*u == "epsilonB-normalized") cfg.output.units = SpectrumUnits::epsilon_normalized;
      else o->fail("units", o->get("units"), "must be \"T^2/Hz\" or \"epsilonB-normalized\"");
    }
    if (auto d = o->string("dir")) cfg.output.dir = *d;
    o->finish();
  }

  top.finish();
  return cfg;
}

/// Reads and parses a scenario file. Throws std::ios_base::failure when the
/// file cannot be read.
inline ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

}  // namespace magsense::io
