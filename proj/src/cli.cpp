// cli.cpp — config parsing, per-subcommand schemas, engine drivers, and the
// CSV/SVG/JSON writers behind every artifact the binary produces.

#include "zeno/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "zeno/equilibrium.hpp"
#include "zeno/exact_bath.hpp"
#include "zeno/master_equation.hpp"
#include "zeno/rates.hpp"
#include "zeno/scheduler.hpp"
#include "zeno/thermo.hpp"

namespace zeno::cli {
namespace {

using Kind = ConfigValue::Kind;

// ---------------------------------------------------------------- formatting

// %.17g round-trips doubles, so identical numbers give identical bytes.
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string join_nums(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += num(v[i]);
  }
  return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ----------------------------------------------------------------------- CSV

struct Csv {
  std::string out;

  void meta(const std::string& line) { out += "# " + line + "\n"; }
  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out += ',';
      out += cols[i];
    }
    out += '\n';
  }
  void row(const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (i) out += ',';
      out += num(vals[i]);
    }
    out += '\n';
  }
};

std::string write_file(const RunOptions& opt, const std::string& name,
                       const std::string& content) {
  namespace fs = std::filesystem;
  fs::create_directories(opt.outdir);
  const fs::path path = fs::path(opt.outdir) / name;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cli: cannot open " + path.string() + " for writing");
  f << content;
  f.flush();
  if (!f) throw std::runtime_error("cli: short write to " + path.string());
  return path.string();
}

// ----------------------------------------------------------------------- SVG

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
  std::string color;
};

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Minimal polyline chart.  The CSV next to it is the authoritative artifact;
// this exists so a run can be eyeballed without any plotting stack.
std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::vector<SvgSeries>& series,
                       const std::vector<double>& event_marks = {}) {
  const double x0 = 70.0, x1 = 740.0, y0 = 30.0, y1 = 400.0;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmax > xmin)) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (!(ymax > ymin)) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0); };
  auto py = [&](double y) { return y1 - (y - ymin) / (ymax - ymin) * (y1 - y0); };

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\"460\" "
      "viewBox=\"0 0 760 460\" font-family=\"monospace\" font-size=\"12\">\n";
  svg += "<rect width=\"760\" height=\"460\" fill=\"white\"/>\n";
  svg += "<rect x=\"" + coord(x0) + "\" y=\"" + coord(y0) + "\" width=\"" +
         coord(x1 - x0) + "\" height=\"" + coord(y1 - y0) +
         "\" fill=\"none\" stroke=\"#888888\"/>\n";
  for (double m : event_marks) {
    if (!(m >= xmin && m <= xmax)) continue;
    svg += "<line x1=\"" + coord(px(m)) + "\" y1=\"" + coord(y0) + "\" x2=\"" +
           coord(px(m)) + "\" y2=\"" + coord(y1) +
           "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
  }
  if (ymin < 0.0 && ymax > 0.0)
    svg += "<line x1=\"" + coord(x0) + "\" y1=\"" + coord(py(0.0)) + "\" x2=\"" +
           coord(x1) + "\" y2=\"" + coord(py(0.0)) +
           "\" stroke=\"#dddddd\"/>\n";
  for (const auto& s : series) {
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += coord(px(s.x[i])) + "," + coord(py(s.y[i])) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + s.color +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
  }
  svg += "<text x=\"380\" y=\"18\" text-anchor=\"middle\">" + title + "</text>\n";
  svg += "<text x=\"" + coord(x0) + "\" y=\"418\">" + num6(xmin) + "</text>\n";
  svg += "<text x=\"" + coord(x1) + "\" y=\"418\" text-anchor=\"end\">" + num6(xmax) +
         "</text>\n";
  svg += "<text x=\"405\" y=\"440\" text-anchor=\"middle\">" + x_label + "</text>\n";
  svg += "<text x=\"" + coord(x0 - 6.0) + "\" y=\"" + coord(y1) +
         "\" text-anchor=\"end\">" + num6(ymin) + "</text>\n";
  svg += "<text x=\"" + coord(x0 - 6.0) + "\" y=\"" + coord(y0 + 10.0) +
         "\" text-anchor=\"end\">" + num6(ymax) + "</text>\n";
  double ly = y0 + 18.0;
  for (const auto& s : series) {
    svg += "<text x=\"" + coord(x0 + 10.0) + "\" y=\"" + coord(ly) + "\" fill=\"" +
           s.color + "\">" + s.label + "</text>\n";
    ly += 16.0;
  }
  svg += "</svg>\n";
  return svg;
}

constexpr const char* kBlue = "#1f6fb2";
constexpr const char* kBlack = "#222222";
constexpr const char* kRed = "#c0392b";

// ------------------------------------------------------------------- parsing

void trim(std::string& s) {
  const char* ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) {
    s.clear();
    return;
  }
  const auto e = s.find_last_not_of(ws);
  s = s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  for (char c : k)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') return false;
  return true;
}

bool parse_number(const std::string& tok, double* out, int lineno) {
  if (tok.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) return false;
  if (std::isnan(v))
    throw ConfigError("line " + std::to_string(lineno) + ": nan is not a usable value");
  *out = v;
  return true;
}

ConfigValue parse_value(const std::string& raw, int lineno) {
  ConfigValue v;
  v.line = lineno;
  std::string spaced = raw;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::istringstream in(spaced);
  std::vector<std::string> tokens;
  for (std::string tok; in >> tok;) tokens.push_back(tok);
  if (tokens.empty())
    throw ConfigError("line " + std::to_string(lineno) + ": empty value");
  if (tokens.size() == 1 && (tokens[0] == "true" || tokens[0] == "false")) {
    v.kind = Kind::boolean;
    v.flag = tokens[0] == "true";
    return v;
  }
  std::vector<double> nums;
  nums.reserve(tokens.size());
  bool all_numeric = true;
  for (const auto& tok : tokens) {
    double d = 0.0;
    if (!parse_number(tok, &d, lineno)) {
      all_numeric = false;
      break;
    }
    nums.push_back(d);
  }
  if (all_numeric) {
    v.list = std::move(nums);
    if (v.list.size() == 1) {
      v.kind = Kind::number;
      v.number = v.list.front();
    } else {
      v.kind = Kind::number_list;
    }
    return v;
  }
  if (tokens.size() == 1) {
    v.kind = Kind::word;
    v.text = tokens[0];
    return v;
  }
  throw ConfigError("line " + std::to_string(lineno) +
                    ": value is neither a number list nor a single word");
}

// ------------------------------------------------------------------- lookups

const ConfigValue* find(const ParsedConfig& c, const std::string& key) {
  const auto it = c.values.find(key);
  return it == c.values.end() ? nullptr : &it->second;
}

double req_num(const ParsedConfig& c, const std::string& key) {
  const ConfigValue* v = find(c, key);
  if (!v) throw ConfigError("missing required key '" + key + "'");
  return v->number;
}

double get_num(const ParsedConfig& c, const std::string& key, double def) {
  const ConfigValue* v = find(c, key);
  return v ? v->number : def;
}

double req_pos(const ParsedConfig& c, const std::string& key) {
  const double v = req_num(c, key);
  if (!(v > 0.0) || !std::isfinite(v))
    throw ConfigError("key '" + key + "' must be finite and > 0");
  return v;
}

double opt_pos(const ParsedConfig& c, const std::string& key, double def) {
  const ConfigValue* v = find(c, key);
  if (!v) return def;
  if (!(v->number > 0.0) || !std::isfinite(v->number))
    throw ConfigError("key '" + key + "' must be finite and > 0");
  return v->number;
}

std::vector<double> get_list(const ParsedConfig& c, const std::string& key) {
  const ConfigValue* v = find(c, key);
  if (!v) return {};
  return v->list.empty() && v->kind == Kind::number ? std::vector<double>{v->number}
                                                    : v->list;
}

bool get_bool(const ParsedConfig& c, const std::string& key, bool def) {
  const ConfigValue* v = find(c, key);
  return v ? v->flag : def;
}

std::string get_word(const ParsedConfig& c, const std::string& key,
                     const std::string& def) {
  const ConfigValue* v = find(c, key);
  return v ? v->text : def;
}

int get_count(const ParsedConfig& c, const std::string& key, int def, int lo, int hi) {
  const ConfigValue* v = find(c, key);
  if (!v) return def;
  if (!std::isfinite(v->number) || v->number != std::floor(v->number))
    throw ConfigError("key '" + key + "' must be an integer");
  if (v->number < lo || v->number > hi)
    throw ConfigError("key '" + key + "' must be in [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  return static_cast<int>(v->number);
}

int req_count(const ParsedConfig& c, const std::string& key, int lo, int hi) {
  if (!find(c, key)) throw ConfigError("missing required key '" + key + "'");
  return get_count(c, key, lo, lo, hi);
}

// ------------------------------------------------------------------- schemas

struct KeyRule {
  const char* key;
  Kind kind;
  bool required;
};

std::vector<KeyRule> cat(std::initializer_list<std::vector<KeyRule>> parts) {
  std::vector<KeyRule> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

const std::map<std::string, std::vector<KeyRule>>& schemas() {
  static const std::map<std::string, std::vector<KeyRule>> instance = [] {
    const std::vector<KeyRule> common = {
        {"deterministic", Kind::boolean, false},
    };
    const std::vector<KeyRule> spectrum = {
        {"spectrum.eta_max_sq_over_omega_a", Kind::number, true},
        {"spectrum.omega0_over_omega_a", Kind::number, true},
        {"spectrum.t_c_over_inv_omega_a", Kind::number, true},
    };
    const std::vector<KeyRule> schedule_keys = {
        {"schedule.event_times_over_inv_omega_a", Kind::number_list, false},
        {"schedule.duration_over_inv_omega_a", Kind::number, false},
        {"schedule.rethermalize", Kind::boolean, false},
    };
    const std::vector<KeyRule> objective_core = {
        {"objective.n_measurements_count", Kind::number, true},
        {"objective.dt_min_over_inv_omega_a", Kind::number, true},
        {"objective.dt_max_over_inv_omega_a", Kind::number, true},
        {"objective.trace_horizon_over_inv_omega_a", Kind::number, false},
    };

    std::map<std::string, std::vector<KeyRule>> m;
    m["equilibrium"] = cat({common, spectrum,
                            {
                                {"equilibrium.alpha_min_dimensionless", Kind::number, true},
                                {"equilibrium.alpha_max_dimensionless", Kind::number, true},
                                {"equilibrium.n_alpha_count", Kind::number, true},
                            }});
    m["rates"] = cat({common, spectrum,
                      {
                          {"temperature.alpha_b_dimensionless", Kind::number, true},
                          {"evolution.horizon_over_inv_omega_a", Kind::number, true},
                      }});
    m["evolve"] = cat({common, spectrum, schedule_keys,
                       {
                           {"engine", Kind::word, false},
                           {"temperature.alpha_s_dimensionless", Kind::number, true},
                           {"temperature.alpha_b_dimensionless", Kind::number, true},
                           {"evolution.horizon_over_inv_omega_a", Kind::number, true},
                           {"evolution.rtol_dimensionless", Kind::number, false},
                           {"evolution.atol_dimensionless", Kind::number, false},
                           {"evolution.n_samples_count", Kind::number, false},
                       }});
    m["entropy"] = m["evolve"];
    m["exact"] = cat({common, spectrum, schedule_keys,
                      {
                          {"engine", Kind::word, false},
                          {"evolution.horizon_over_inv_omega_a", Kind::number, true},
                          {"evolution.n_samples_count", Kind::number, false},
                          {"evolution.pre_relax_over_inv_omega_a", Kind::number, false},
                          {"bath.n_modes_count", Kind::number, true},
                          {"bath.max_quanta_count", Kind::number, false},
                          {"bath.coverage_over_gamma", Kind::number, false},
                          {"bath.detector_substeps_count", Kind::number, false},
                          {"bath.with_modes", Kind::boolean, false},
                      }});
    m["cooling-check"] =
        cat({common, spectrum,
             {
                 {"temperature.alpha_b_dimensionless", Kind::number, true},
                 {"cooling_check.t_max_over_inv_omega_a", Kind::number, false},
                 {"cooling_check.n_points_count", Kind::number, false},
             }});
    m["schedule"] = cat({common, spectrum, objective_core,
                         {
                             {"objective.direction", Kind::word, true},
                             {"engine", Kind::word, false},
                             {"temperature.alpha_s_dimensionless", Kind::number, false},
                             {"temperature.alpha_b_dimensionless", Kind::number, false},
                             {"evolution.pre_relax_over_inv_omega_a", Kind::number, false},
                             {"bath.n_modes_count", Kind::number, false},
                             {"bath.max_quanta_count", Kind::number, false},
                             {"bath.coverage_over_gamma", Kind::number, false},
                         }});
    m["sweep"] = cat({common, spectrum, objective_core,
                      {
                          {"sweep.alpha_grid_dimensionless", Kind::number_list, true},
                      }});
    m["figures"] = {};
    // schemas of the bundled-figure configs (not user-facing subcommands)
    m["fig1"] = cat({common, spectrum,
                     {
                         {"evolution.horizon_over_inv_omega_a", Kind::number, true},
                         {"evolution.n_samples_count", Kind::number, false},
                         {"schedule.event_times_over_inv_omega_a", Kind::number_list, true},
                         {"schedule.finite_duration_over_inv_omega_a", Kind::number, true},
                         {"bath.n_modes_count", Kind::number, true},
                         {"bath.max_quanta_count", Kind::number, false},
                         {"bath.detector_substeps_count", Kind::number, false},
                     }});
    m["fig2a"] = cat({common, spectrum,
                      {
                          {"temperature.alpha_b_dimensionless", Kind::number, true},
                          {"overlap.t_over_inv_omega_a", Kind::number, true},
                          {"overlap.omega_min_over_omega_a", Kind::number, false},
                          {"overlap.omega_max_over_omega_a", Kind::number, false},
                          {"overlap.n_points_count", Kind::number, false},
                      }});
    m["fig2b"] = cat({common, spectrum,
                      {
                          {"temperature.alpha_s_dimensionless", Kind::number, true},
                          {"temperature.alpha_b_dimensionless", Kind::number, true},
                          {"phase_heat.n_measurements_count", Kind::number, true},
                          {"phase_heat.dt_min_over_inv_omega_a", Kind::number, true},
                          {"phase_heat.dt_max_over_inv_omega_a", Kind::number, true},
                          {"phase_cool.n_measurements_count", Kind::number, true},
                          {"phase_cool.dt_min_over_inv_omega_a", Kind::number, true},
                          {"phase_cool.dt_max_over_inv_omega_a", Kind::number, true},
                      }});
    return m;
  }();
  return instance;
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::number: return "a number";
    case Kind::number_list: return "a number list";
    case Kind::boolean: return "a boolean";
    case Kind::word: return "a word";
  }
  return "a value";
}

void check_schema(const ParsedConfig& c, const std::string& sub) {
  const auto& rules = schemas().at(sub);
  for (const auto& [key, val] : c.values) {
    const KeyRule* rule = nullptr;
    for (const auto& r : rules)
      if (key == r.key) {
        rule = &r;
        break;
      }
    if (!rule)
      throw ConfigError("unknown key '" + key + "' (line " + std::to_string(val.line) +
                        ") for subcommand '" + sub + "'");
    const bool ok = rule->kind == val.kind ||
                    (rule->kind == Kind::number_list && val.kind == Kind::number);
    if (!ok)
      throw ConfigError("key '" + key + "' (line " + std::to_string(val.line) +
                        "): expected " + kind_name(rule->kind));
  }
  for (const auto& r : rules)
    if (r.required && !find(c, r.key))
      throw ConfigError("missing required key '" + std::string(r.key) +
                        "' for subcommand '" + sub + "'");
  if (!get_bool(c, "deterministic", true))
    throw ConfigError(
        "deterministic = false is not supported; every engine here is seedless and "
        "bit-reproducible by construction");
}

// ------------------------------------------------------------------ builders

BathSpectrumSpec spec_from(const ParsedConfig& c) {
  BathSpectrumSpec spec;
  spec.eta_max_sq = req_num(c, "spectrum.eta_max_sq_over_omega_a");
  spec.omega0 = req_num(c, "spectrum.omega0_over_omega_a");
  const double t_c = req_pos(c, "spectrum.t_c_over_inv_omega_a");
  spec.gamma = 1.0 / t_c;
  spec.omega_a = 1.0;  // all config units are expressed against the qubit gap
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("spectrum: ") + e.what());
  }
  return spec;
}

InverseTemperature alpha_from(const ParsedConfig& c, const std::string& key) {
  const double v = req_num(c, key);
  if (std::isnan(v) || v <= 0.0)
    throw ConfigError("key '" + key + "' must be > 0 (inf selects zero temperature)");
  return {v};
}

me::MeasurementSchedule schedule_from(const ParsedConfig& c, double horizon) {
  me::MeasurementSchedule sch;
  const double dur = get_num(c, "schedule.duration_over_inv_omega_a", 0.0);
  if (dur < 0.0 || !std::isfinite(dur))
    throw ConfigError("schedule.duration_over_inv_omega_a must be finite and >= 0");
  for (double t : get_list(c, "schedule.event_times_over_inv_omega_a"))
    sch.events.push_back({t, dur});
  sch.rethermalize = get_bool(c, "schedule.rethermalize", true);
  try {
    sch.validate(horizon);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
  for (const auto& ev : sch.events)
    if (ev.time + ev.duration > horizon)
      throw ConfigError("schedule: detector window extends past the horizon");
  return sch;
}

sched::ScheduleObjective objective_from(const ParsedConfig& c, sched::Engine engine,
                                        bool need_direction) {
  sched::ScheduleObjective obj;
  if (need_direction) {
    const std::string dir = get_word(c, "objective.direction", "");
    if (dir == "cool")
      obj.direction = sched::Direction::cool;
    else if (dir == "heat")
      obj.direction = sched::Direction::heat;
    else
      throw ConfigError("objective.direction must be 'cool' or 'heat'");
  }
  obj.n_measurements = req_count(c, "objective.n_measurements_count", 0, 100000);
  obj.dt_min = req_num(c, "objective.dt_min_over_inv_omega_a");
  obj.dt_max = req_num(c, "objective.dt_max_over_inv_omega_a");
  obj.trace_horizon = get_num(c, "objective.trace_horizon_over_inv_omega_a", 0.0);
  obj.engine = engine;
  try {
    obj.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("objective: ") + e.what());
  }
  if (obj.trace_horizon > 0.0 && obj.trace_horizon < obj.n_measurements * obj.dt_min)
    throw ConfigError(
        "objective.trace_horizon_over_inv_omega_a cannot fit n_measurements "
        "intervals of at least dt_min");
  return obj;
}

sched::Engine engine_from(const ParsedConfig& c, const std::string& def) {
  const std::string eng = get_word(c, "engine", def);
  if (eng == "master_equation") return sched::Engine::master_equation;
  if (eng == "exact") return sched::Engine::exact;
  throw ConfigError("engine must be 'master_equation' or 'exact'");
}

void stamp(Csv& csv, const std::string& what, const ParsedConfig& c) {
  csv.meta("zenotherm " + what);
  csv.meta("config-hash: fnv1a64 " + hash_hex(c.hash));
  csv.meta("units ride on the column names; times in 1/omega_a, hbar = 1");
}

void spectrum_meta(Csv& csv, const BathSpectrumSpec& spec) {
  csv.meta("spectrum: lorentzian, eta_max_sq = " + num(spec.eta_max_sq) +
           ", omega0 = " + num(spec.omega0) + ", gamma = " + num(spec.gamma) +
           " (units of omega_a)");
}

// Nearest sample by time, ties resolved to the later (post-event) sample.
double value_near(const std::vector<double>& ts, const std::vector<double>& vs,
                  double t) {
  const auto it = std::lower_bound(ts.begin(), ts.end(), t);
  std::size_t best = it == ts.end() ? ts.size() - 1
                                    : static_cast<std::size_t>(it - ts.begin());
  if (best > 0 && std::abs(ts[best - 1] - t) < std::abs(ts[best] - t)) --best;
  while (best + 1 < ts.size() && std::abs(ts[best + 1] - t) <= std::abs(ts[best] - t))
    ++best;
  return vs[best];
}

std::vector<double> event_instants(const me::MeasurementSchedule& sch) {
  std::vector<double> out;
  out.reserve(sch.events.size());
  for (const auto& ev : sch.events) out.push_back(ev.time);
  return out;
}

// -------------------------------------------------------- subcommand drivers

std::vector<std::string> equilibrium_impl(const ParsedConfig& c, const RunOptions& opt,
                                          const std::string& stem) {
  check_schema(c, "equilibrium");
  const BathSpectrumSpec spec = spec_from(c);
  const double amin = req_pos(c, "equilibrium.alpha_min_dimensionless");
  const double amax = req_pos(c, "equilibrium.alpha_max_dimensionless");
  const int n = req_count(c, "equilibrium.n_alpha_count", 2, 100000);
  if (!(amax > amin) || !std::isfinite(amax))
    throw ConfigError("equilibrium alpha grid needs finite alpha_max > alpha_min");

  const Spectrum s = make_spectrum(spec);
  Csv csv;
  stamp(csv, "equilibrium", c);
  spectrum_meta(csv, spec);
  csv.meta("lamb_shift_t0_over_hbar_omega_a: " + num(eq::lamb_shift_t0(s)));
  csv.header({"alpha_dimensionless", "rho_ee_bare_dimensionless",
              "rho_ee_corrected_dimensionless", "purity_bare_dimensionless",
              "purity_corrected_dimensionless", "purity_relative_change_dimensionless",
              "mean_hsb_over_hbar_omega_a"});

  std::vector<double> alphas(static_cast<std::size_t>(n));
  std::vector<double> bare(alphas.size()), corrected(alphas.size());
  for (int i = 0; i < n; ++i) {
    const double a = amin + (amax - amin) * i / (n - 1);
    const eq::EquilibriumReport rep = eq::report(s, {a});
    alphas[static_cast<std::size_t>(i)] = a;
    bare[static_cast<std::size_t>(i)] = 0.5 * (1.0 + rep.p_eq_bare);
    corrected[static_cast<std::size_t>(i)] = rep.rho_ee;
    csv.row({a, 0.5 * (1.0 + rep.p_eq_bare), rep.rho_ee, rep.p_eq_bare,
             rep.p_eq_corrected,
             (rep.p_eq_corrected - rep.p_eq_bare) / std::abs(rep.p_eq_bare),
             rep.mean_hsb});
  }

  std::vector<std::string> files;
  files.push_back(write_file(opt, stem + ".csv", csv.out));
  files.push_back(write_file(
      opt, stem + ".svg",
      line_chart("equilibrium excitation vs alpha", "alpha = beta hbar omega_a",
                 {{"rho_ee bare", alphas, bare, kBlue},
                  {"rho_ee with interaction", alphas, corrected, kBlack}})));
  return files;
}

std::vector<std::string> rates_impl(const ParsedConfig& c, const RunOptions& opt,
                                    const std::string& stem) {
  check_schema(c, "rates");
  const BathSpectrumSpec spec = spec_from(c);
  const InverseTemperature alpha_b = alpha_from(c, "temperature.alpha_b_dimensionless");
  const double horizon = req_pos(c, "evolution.horizon_over_inv_omega_a");

  const rates::RateTable table =
      rates::build_rate_table(make_spectrum(spec), alpha_b, horizon);

  Csv csv;
  stamp(csv, "rates", c);
  spectrum_meta(csv, spec);
  csv.meta("alpha_b: " + num(alpha_b.alpha));
  csv.meta("rdot0_over_omega_a_sq: " + num(table.rdot0));
  csv.meta("markov_r_e_over_omega_a: " + num(table.markov_e));
  csv.meta("markov_r_g_over_omega_a: " + num(table.markov_g));
  csv.header({"t_over_inv_omega_a", "r_e_over_omega_a", "r_g_over_omega_a",
              "j_e_dimensionless", "j_g_dimensionless"});
  for (std::size_t i = 0; i < table.times.size(); ++i)
    csv.row({table.times[i], table.r_e[i], table.r_g[i], table.j_e[i], table.j_g[i]});

  std::vector<std::string> files;
  files.push_back(write_file(opt, stem + ".csv", csv.out));
  files.push_back(write_file(opt, stem + ".svg",
                             line_chart("relaxation rates vs time since reset",
                                        "t (1/omega_a)",
                                        {{"R_e", table.times, table.r_e, kBlue},
                                         {"R_g", table.times, table.r_g, kBlack}})));
  return files;
}

std::vector<std::string> evolve_impl(const ParsedConfig& c, const RunOptions& opt,
                                     const std::string& stem, bool with_entropy) {
  check_schema(c, with_entropy ? "entropy" : "evolve");
  const BathSpectrumSpec spec = spec_from(c);
  const InverseTemperature alpha_s = alpha_from(c, "temperature.alpha_s_dimensionless");
  const InverseTemperature alpha_b = alpha_from(c, "temperature.alpha_b_dimensionless");
  if (get_word(c, "engine", "master_equation") != "master_equation")
    throw ConfigError(
        "this subcommand runs the master-equation engine; use `exact` for the "
        "discrete-bath solver");
  if (with_entropy && alpha_b.is_zero_temperature())
    throw ConfigError(
        "entropy needs a finite bath temperature; the zero-temperature reference "
        "state sits on the boundary where the relative entropy diverges");
  const double horizon = req_pos(c, "evolution.horizon_over_inv_omega_a");
  const me::MeasurementSchedule schedule = schedule_from(c, horizon);

  me::EvolveOptions eopt;
  eopt.rtol = opt_pos(c, "evolution.rtol_dimensionless", 1e-9);
  eopt.atol = opt_pos(c, "evolution.atol_dimensionless", 1e-12);
  eopt.n_samples = get_count(c, "evolution.n_samples_count", 0, 0, 200000);

  const me::SimulationTrace trace =
      me::evolve(me::initial_from_temperature(alpha_s), schedule, horizon,
                 make_spectrum(spec), alpha_b, eopt);

  Csv csv;
  stamp(csv, with_entropy ? "entropy" : "evolve", c);
  spectrum_meta(csv, spec);
  csv.meta("alpha_s: " + num(alpha_s.alpha) + ", alpha_b: " + num(alpha_b.alpha));
  csv.meta("event_times_over_inv_omega_a: " + join_nums(trace.event_times));
  if (!trace.warning.empty()) csv.meta("warning: " + trace.warning);

  std::vector<std::string> files;
  if (with_entropy) {
    const me::QubitPopulations p0 = me::initial_from_temperature(alpha_b);
    const thermo::EntropyTrace et = thermo::sigma(trace, p0);
    csv.meta("reference rho_ee (bath detailed balance): " + num(p0.rho_ee));
    csv.header({"t_over_inv_omega_a", "rho_ee_dimensionless", "rho_dot_over_omega_a",
                "entropy_nats", "sigma_nats_times_omega_a"});
    for (std::size_t i = 0; i < trace.times.size(); ++i)
      csv.row({trace.times[i], trace.rho_ee[i], trace.rho_dot[i], et.entropy[i],
               et.sigma[i]});
    files.push_back(write_file(opt, stem + ".csv", csv.out));
    files.push_back(write_file(
        opt, stem + ".svg",
        line_chart("entropy production rate", "t (1/omega_a)",
                   {{"sigma", et.times, et.sigma, kBlack}}, trace.event_times)));
  } else {
    csv.header({"t_over_inv_omega_a", "rho_ee_dimensionless", "rho_dot_over_omega_a"});
    for (std::size_t i = 0; i < trace.times.size(); ++i)
      csv.row({trace.times[i], trace.rho_ee[i], trace.rho_dot[i]});
    files.push_back(write_file(opt, stem + ".csv", csv.out));
    files.push_back(write_file(
        opt, stem + ".svg",
        line_chart("excited-state population", "t (1/omega_a)",
                   {{"rho_ee", trace.times, trace.rho_ee, kBlue}}, trace.event_times)));
  }
  return files;
}

std::vector<std::string> exact_impl(const ParsedConfig& c, const RunOptions& opt,
                                    const std::string& stem) {
  check_schema(c, "exact");
  const BathSpectrumSpec spec = spec_from(c);
  if (get_word(c, "engine", "exact") != "exact")
    throw ConfigError("the exact subcommand runs the discrete-bath solver; use "
                      "`evolve` for the master equation");
  const double horizon = req_pos(c, "evolution.horizon_over_inv_omega_a");
  const me::MeasurementSchedule schedule = schedule_from(c, horizon);
  const int n_modes = req_count(c, "bath.n_modes_count", 1, 2000);
  const int quanta = get_count(c, "bath.max_quanta_count", 2, 1, 3);
  const double coverage = opt_pos(c, "bath.coverage_over_gamma", 5.0);

  bath::ExactRunOptions ropt;
  ropt.pre_relax = get_num(c, "evolution.pre_relax_over_inv_omega_a", 0.0);
  if (ropt.pre_relax < 0.0 || !std::isfinite(ropt.pre_relax))
    throw ConfigError("evolution.pre_relax_over_inv_omega_a must be finite and >= 0");
  ropt.n_samples = get_count(c, "evolution.n_samples_count", 200, 1, 20000);
  ropt.detector_substeps = get_count(c, "bath.detector_substeps_count", 256, 2, 100000);
  ropt.with_modes = get_bool(c, "bath.with_modes", false);

  const DiscreteBathModel model = discretize(spec, n_modes, coverage);
  const bath::BathSystem sys = bath::BathSystem::build(model, quanta);
  const bath::ExactTrace trace = bath::simulate(sys, schedule, horizon, ropt);

  Csv csv;
  stamp(csv, "exact", c);
  spectrum_meta(csv, spec);
  csv.meta("modes: " + std::to_string(n_modes) + ", max quanta: " +
           std::to_string(quanta) + ", hilbert dimension: " +
           std::to_string(sys.dimension()));
  if (!model.warning.empty()) csv.meta("warning: " + model.warning);
  csv.meta("event_times_over_inv_omega_a: " + join_nums(trace.event_times));
  csv.header({"t_over_inv_omega_a", "rho_ee_dimensionless", "h_s_over_hbar_omega_a",
              "h_b_over_hbar_omega_a", "h_sb_over_hbar_omega_a",
              "h_tot_over_hbar_omega_a", "purity_dimensionless",
              "sys_coherence_abs_dimensionless"});
  std::vector<double> rho(trace.times.size());
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const bath::Observables& o = trace.obs[i];
    rho[i] = o.rho_ee;
    csv.row({trace.times[i], o.rho_ee, o.h_s, o.h_b, o.h_sb, o.h_tot, o.purity,
             o.sys_coherence_abs});
  }

  std::vector<std::string> files;
  files.push_back(write_file(opt, stem + ".csv", csv.out));
  files.push_back(write_file(
      opt, stem + ".svg",
      line_chart("exact excited-state population", "t (1/omega_a)",
                 {{"rho_ee", trace.times, rho, kBlue}}, trace.event_times)));

  if (ropt.with_modes) {
    Csv modes;
    stamp(modes, "exact (mode occupations)", c);
    modes.meta("mode_frequencies_over_omega_a: " + join_nums(model.omega));
    std::vector<std::string> cols{"t_over_inv_omega_a"};
    for (int k = 0; k < n_modes; ++k) {
      char name[64];
      std::snprintf(name, sizeof name, "mode_%02d_occupation_dimensionless", k + 1);
      cols.push_back(name);
    }
    modes.header(cols);
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
      std::vector<double> row{trace.times[i]};
      for (int k = 0; k < n_modes; ++k)
        row.push_back(trace.modes(static_cast<long>(i), k));
      modes.row(row);
    }
    files.push_back(write_file(opt, stem + "_modes.csv", modes.out));
    std::vector<double> last(static_cast<std::size_t>(n_modes));
    for (int k = 0; k < n_modes; ++k)
      last[static_cast<std::size_t>(k)] =
          trace.modes(static_cast<long>(trace.times.size()) - 1, k);
    files.push_back(write_file(
        opt, stem + "_modes.svg",
        line_chart("final mode occupations", "mode frequency (omega_a)",
                   {{"<n_k> at horizon", model.omega, last, kRed}})));
  }
  return files;
}

std::vector<std::string> cooling_check_impl(const ParsedConfig& c, const RunOptions& opt,
                                            const std::string& stem) {
  check_schema(c, "cooling-check");
  const BathSpectrumSpec spec = spec_from(c);
  const InverseTemperature alpha_b = alpha_from(c, "temperature.alpha_b_dimensionless");
  const int n_points = get_count(c, "cooling_check.n_points_count", 2000, 8, 200000);

  thermo::CoolingScan scan;
  if (find(c, "cooling_check.t_max_over_inv_omega_a")) {
    const double t_max = req_pos(c, "cooling_check.t_max_over_inv_omega_a");
    scan = thermo::scan_cooling(make_spectrum(spec), alpha_b, t_max, n_points);
  } else {
    scan = thermo::scan_cooling(spec, alpha_b, n_points);
  }

  Csv csv;
  stamp(csv, "cooling-check", c);
  spectrum_meta(csv, spec);
  csv.meta("alpha_b: " + num(alpha_b.alpha));
  if (alpha_b.is_zero_temperature())
    csv.meta("note: cooling below detailed balance is impossible at zero temperature");
  else
    csv.meta("necessary spectral window (omega_a, Omega): Omega_over_omega_a = " +
             num(thermo::high_t_bound(alpha_b.alpha, 1.0)));
  csv.meta("any_cooling: " + std::string(scan.any_cooling ? "true" : "false"));
  csv.meta("best_time_over_inv_omega_a: " + num(scan.best_time));
  csv.meta("best_margin_dimensionless: " + num(scan.best_margin));
  csv.meta("margin_onsets_over_inv_omega_a: " + join_nums(scan.onsets));
  csv.header({"t_over_inv_omega_a", "margin_dimensionless", "cooling_possible_flag"});
  for (std::size_t i = 0; i < scan.times.size(); ++i)
    csv.row({scan.times[i], scan.margins[i], scan.margins[i] > 0.0 ? 1.0 : 0.0});

  std::vector<std::string> files;
  files.push_back(write_file(opt, stem + ".csv", csv.out));
  files.push_back(write_file(opt, stem + ".svg",
                             line_chart("cooling-condition margin", "t (1/omega_a)",
                                        {{"margin", scan.times, scan.margins, kBlack}})));
  return files;
}

std::vector<std::string> schedule_impl(const ParsedConfig& c, const RunOptions& opt,
                                       const std::string& stem) {
  check_schema(c, "schedule");
  const BathSpectrumSpec spec = spec_from(c);
  const sched::Engine engine = engine_from(c, "master_equation");
  const sched::ScheduleObjective obj = objective_from(c, engine, true);

  sched::ScheduleResult res;
  if (engine == sched::Engine::master_equation) {
    for (const char* key : {"bath.n_modes_count", "bath.max_quanta_count",
                            "bath.coverage_over_gamma",
                            "evolution.pre_relax_over_inv_omega_a"})
      if (find(c, key))
        throw ConfigError(std::string("key '") + key +
                          "' applies to the exact engine only");
    if (!find(c, "temperature.alpha_s_dimensionless") ||
        !find(c, "temperature.alpha_b_dimensionless"))
      throw ConfigError(
          "schedule with the master-equation engine requires "
          "temperature.alpha_s_dimensionless and temperature.alpha_b_dimensionless");
    const InverseTemperature alpha_s =
        alpha_from(c, "temperature.alpha_s_dimensionless");
    const InverseTemperature alpha_b =
        alpha_from(c, "temperature.alpha_b_dimensionless");
    res = sched::greedy_schedule(obj, me::initial_from_temperature(alpha_s),
                                 make_spectrum(spec), alpha_b);
  } else {
    for (const char* key :
         {"temperature.alpha_s_dimensionless", "temperature.alpha_b_dimensionless"})
      if (find(c, key))
        throw ConfigError(std::string("key '") + key +
                          "' does not apply: the exact engine starts from the "
                          "zero-temperature vacuum");
    if (!find(c, "bath.n_modes_count"))
      throw ConfigError("schedule with the exact engine requires bath.n_modes_count");
    const int n_modes = req_count(c, "bath.n_modes_count", 1, 2000);
    const int quanta = get_count(c, "bath.max_quanta_count", 2, 1, 3);
    const double coverage = opt_pos(c, "bath.coverage_over_gamma", 5.0);
    const double pre_relax = get_num(c, "evolution.pre_relax_over_inv_omega_a", 0.0);
    if (pre_relax < 0.0 || !std::isfinite(pre_relax))
      throw ConfigError("evolution.pre_relax_over_inv_omega_a must be finite and >= 0");
    const bath::BathSystem sys =
        bath::BathSystem::build(discretize(spec, n_modes, coverage), quanta);
    res = sched::greedy_schedule(obj, sys, pre_relax);
  }

  nlohmann::json j;
  j["artifact"] = "zenotherm schedule";
  j["config_hash_fnv1a64"] = hash_hex(c.hash);
  j["engine"] = engine == sched::Engine::exact ? "exact" : "master_equation";
  j["direction"] = obj.direction == sched::Direction::cool ? "cool" : "heat";
  j["n_measurements"] = obj.n_measurements;
  j["dt_min_over_inv_omega_a"] = obj.dt_min;
  j["dt_max_over_inv_omega_a"] = obj.dt_max;
  j["trace_horizon_over_inv_omega_a"] = obj.trace_horizon;
  j["rethermalize"] = res.schedule.rethermalize;
  j["event_times_over_inv_omega_a"] = event_instants(res.schedule);
  j["event_rho_ee"] = res.event_rho_ee;
  j["final_rho_ee"] = res.final_rho_ee;
  j["extremal_rho_ee"] = res.extremal_rho_ee;
  j["reference_rho_ee"] = res.reference_rho_ee;

  Csv csv;
  stamp(csv, "schedule", c);
  spectrum_meta(csv, spec);
  csv.meta("event_times_over_inv_omega_a: " + join_nums(res.trace.event_times));
  csv.meta("final_rho_ee: " + num(res.final_rho_ee) + ", extremal_rho_ee: " +
           num(res.extremal_rho_ee) + ", reference_rho_ee: " +
           num(res.reference_rho_ee));
  csv.header({"t_over_inv_omega_a", "rho_ee_dimensionless"});
  for (std::size_t i = 0; i < res.trace.times.size(); ++i)
    csv.row({res.trace.times[i], res.trace.rho_ee[i]});

  std::vector<std::string> files;
  files.push_back(write_file(opt, stem + ".json", j.dump(2) + "\n"));
  files.push_back(write_file(opt, stem + "_trace.csv", csv.out));
  files.push_back(write_file(
      opt, stem + "_trace.svg",
      line_chart("greedy schedule trace", "t (1/omega_a)",
                 {{"rho_ee", res.trace.times, res.trace.rho_ee, kBlue}},
                 res.trace.event_times)));
  return files;
}

std::vector<std::string> sweep_impl(const ParsedConfig& c, const RunOptions& opt,
                                    const std::string& stem) {
  check_schema(c, "sweep");
  const BathSpectrumSpec spec = spec_from(c);
  const sched::ScheduleObjective base =
      objective_from(c, sched::Engine::master_equation, false);
  const std::vector<double> alphas = get_list(c, "sweep.alpha_grid_dimensionless");

  int threads = opt.threads;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = 1;

  sched::SweepTable table;
  try {
    table = sched::temperature_sweep(base, alphas, spec, threads);
  } catch (const std::invalid_argument& e) {
    // the sweep's own precondition checks reject config-shaped input
    throw ConfigError(std::string("sweep: ") + e.what());
  }

  Csv csv;
  stamp(csv, "sweep", c);
  spectrum_meta(csv, spec);
  csv.meta("critical_alpha_dimensionless: " + num(table.critical_alpha));
  csv.meta("maximal: " + table.maximal_definition);
  csv.header({"alpha_dimensionless", "max_heating_dimensionless",
              "max_cooling_dimensionless", "cooling_certified_flag"});
  std::vector<double> xs, heat, cool;
  for (const auto& row : table.rows) {
    xs.push_back(row.alpha);
    heat.push_back(row.max_heating);
    cool.push_back(row.max_cooling);
    csv.row({row.alpha, row.max_heating, row.max_cooling,
             row.cooling_certified ? 1.0 : 0.0});
  }

  std::vector<std::string> files;
  files.push_back(write_file(opt, stem + ".csv", csv.out));
  files.push_back(
      write_file(opt, stem + ".svg",
                 line_chart("heating/cooling extremes vs alpha",
                            "alpha = beta hbar omega_a",
                            {{"max heating", xs, heat, kBlue},
                             {"max cooling", xs, cool, kBlack}})));
  return files;
}

// ------------------------------------------------------------ bundled figures

constexpr const char* kFigPurityConfig = R"(# bundled: equilibrium excitation vs inverse temperature (weak coupling)
[spectrum]
eta_max_sq_over_omega_a = 0.01
omega0_over_omega_a = 2.0
t_c_over_inv_omega_a = 2.0

[equilibrium]
alpha_min_dimensionless = 0.2
alpha_max_dimensionless = 12.0
n_alpha_count = 60
)";

constexpr const char* kFig1Config = R"(# bundled: population trace, master equation vs exact discrete bath
[spectrum]
eta_max_sq_over_omega_a = 0.07
omega0_over_omega_a = 1.0
t_c_over_inv_omega_a = 10.0

[evolution]
horizon_over_inv_omega_a = 50.0
n_samples_count = 250

[schedule]
event_times_over_inv_omega_a = 30.0 35.0 40.0 45.0
finite_duration_over_inv_omega_a = 0.11

[bath]
n_modes_count = 40
max_quanta_count = 2
detector_substeps_count = 128
)";

constexpr const char* kFig1aConfig = R"(# bundled: relaxation rates over the first memory time
[spectrum]
eta_max_sq_over_omega_a = 0.07
omega0_over_omega_a = 1.0
t_c_over_inv_omega_a = 10.0

[temperature]
alpha_b_dimensionless = inf

[evolution]
horizon_over_inv_omega_a = 12.0
)";

constexpr const char* kFig1bConfig = R"(# bundled: entropy production around a measurement at quasi-equilibrium
[spectrum]
eta_max_sq_over_omega_a = 0.07
omega0_over_omega_a = 1.0
t_c_over_inv_omega_a = 10.0

[temperature]
alpha_s_dimensionless = 1.0
alpha_b_dimensionless = 1.0

[evolution]
horizon_over_inv_omega_a = 50.0
n_samples_count = 2000

[schedule]
event_times_over_inv_omega_a = 30.0
)";

constexpr const char* kFig2aConfig = R"(# bundled: rate integrand overlap, coupling spectrum vs sinc kernels
[spectrum]
eta_max_sq_over_omega_a = 0.07
omega0_over_omega_a = 1.0
t_c_over_inv_omega_a = 10.0

[temperature]
alpha_b_dimensionless = inf

[overlap]
t_over_inv_omega_a = 4.0
omega_min_over_omega_a = 0.02
omega_max_over_omega_a = 3.0
n_points_count = 600
)";

constexpr const char* kFig2bConfig = R"(# bundled: Zeno heating then oscillatory-Zeno cooling, greedy placement
[spectrum]
eta_max_sq_over_omega_a = 4.36
omega0_over_omega_a = 1.4285714285714286
t_c_over_inv_omega_a = 10.0

[temperature]
alpha_s_dimensionless = 1.0
alpha_b_dimensionless = 1.0

[phase_heat]
n_measurements_count = 6
dt_min_over_inv_omega_a = 0.05
dt_max_over_inv_omega_a = 0.5

[phase_cool]
n_measurements_count = 6
dt_min_over_inv_omega_a = 1.0
dt_max_over_inv_omega_a = 15.0
)";

constexpr const char* kFig2cConfig = R"(# bundled: heating/cooling extremes vs common initial temperature
[spectrum]
eta_max_sq_over_omega_a = 4.36
omega0_over_omega_a = 1.4285714285714286
t_c_over_inv_omega_a = 10.0

[objective]
n_measurements_count = 10
dt_min_over_inv_omega_a = 1.0
dt_max_over_inv_omega_a = 15.0

[sweep]
alpha_grid_dimensionless = 0.5 1.0 1.5 2.0 2.5 3.0 3.5 4.0 5.0 6.0
)";

std::vector<std::string> fig1_impl(const ParsedConfig& c, const RunOptions& opt) {
  check_schema(c, "fig1");
  const BathSpectrumSpec spec = spec_from(c);
  const double horizon = req_pos(c, "evolution.horizon_over_inv_omega_a");
  const int n_samples = get_count(c, "evolution.n_samples_count", 250, 10, 20000);
  const double dur = req_pos(c, "schedule.finite_duration_over_inv_omega_a");
  const int n_modes = req_count(c, "bath.n_modes_count", 1, 2000);
  const int quanta = get_count(c, "bath.max_quanta_count", 2, 1, 3);
  const int substeps = get_count(c, "bath.detector_substeps_count", 128, 2, 100000);

  me::MeasurementSchedule impulsive;
  for (double t : get_list(c, "schedule.event_times_over_inv_omega_a"))
    impulsive.events.push_back({t, 0.0});
  me::MeasurementSchedule finite = impulsive;
  for (auto& ev : finite.events) ev.duration = dur;
  try {
    impulsive.validate(horizon);
    finite.validate(horizon);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }

  const Spectrum s = make_spectrum(spec);
  const InverseTemperature t0 = InverseTemperature::zero_temperature();
  me::EvolveOptions eopt;
  eopt.n_samples = n_samples;
  const me::SimulationTrace me_trace =
      me::evolve({0.0, 1.0}, impulsive, horizon, s, t0, eopt);

  const bath::BathSystem sys =
      bath::BathSystem::build(discretize(spec, n_modes), quanta);
  bath::ExactRunOptions ropt;
  ropt.n_samples = n_samples;
  ropt.detector_substeps = substeps;
  ropt.with_modes = true;
  const bath::ExactTrace exact_imp = bath::simulate(sys, impulsive, horizon, ropt);
  ropt.with_modes = false;
  const bath::ExactTrace exact_fin = bath::simulate(sys, finite, horizon, ropt);

  const std::vector<double> rho_imp = bath::rho_ee_series(exact_imp);
  const std::vector<double> rho_fin = bath::rho_ee_series(exact_fin);
  const std::vector<double> marks = event_instants(impulsive);

  std::vector<std::string> files;

  Csv tracecsv;
  stamp(tracecsv, "figures (population trace)", c);
  spectrum_meta(tracecsv, spec);
  tracecsv.meta("event_times_over_inv_omega_a: " + join_nums(marks));
  tracecsv.meta("exact bath: " + std::to_string(n_modes) + " modes, max quanta " +
                std::to_string(quanta));
  tracecsv.meta("finite-readout overlay (duration " + num(dur) +
                "/omega_a): fig1_trace_finite.csv");
  tracecsv.header({"t_over_inv_omega_a", "rho_ee_master_equation_dimensionless",
                   "rho_ee_exact_dimensionless"});
  std::vector<double> grid(static_cast<std::size_t>(n_samples) + 1);
  std::vector<double> me_on_grid(grid.size()), exact_on_grid(grid.size());
  for (int i = 0; i <= n_samples; ++i) {
    const double t = horizon * i / n_samples;
    grid[static_cast<std::size_t>(i)] = t;
    me_on_grid[static_cast<std::size_t>(i)] =
        value_near(me_trace.times, me_trace.rho_ee, t);
    exact_on_grid[static_cast<std::size_t>(i)] =
        value_near(exact_imp.times, rho_imp, t);
    tracecsv.row({t, me_on_grid[static_cast<std::size_t>(i)],
                  exact_on_grid[static_cast<std::size_t>(i)]});
  }
  files.push_back(write_file(opt, "fig1_trace.csv", tracecsv.out));

  Csv fincsv;
  stamp(fincsv, "figures (finite-readout population trace)", c);
  fincsv.meta("detector window duration: " + num(dur) + "/omega_a, " +
              std::to_string(substeps) + " substeps");
  fincsv.header({"t_over_inv_omega_a", "rho_ee_dimensionless"});
  for (std::size_t i = 0; i < exact_fin.times.size(); ++i)
    fincsv.row({exact_fin.times[i], rho_fin[i]});
  files.push_back(write_file(opt, "fig1_trace_finite.csv", fincsv.out));

  files.push_back(write_file(
      opt, "fig1_trace.svg",
      line_chart("population under repeated readout", "t (1/omega_a)",
                 {{"master equation", grid, me_on_grid, kBlack},
                  {"exact, impulsive", grid, exact_on_grid, kRed},
                  {"exact, finite readout", exact_fin.times, rho_fin, kBlue}},
                 marks)));

  Csv modes;
  stamp(modes, "figures (bath mode occupations)", c);
  modes.meta("mode_frequencies_over_omega_a: " + join_nums(sys.model.omega));
  std::vector<std::string> cols{"t_over_inv_omega_a"};
  for (int k = 0; k < n_modes; ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "mode_%02d_occupation_dimensionless", k + 1);
    cols.push_back(name);
  }
  modes.header(cols);
  for (std::size_t i = 0; i < exact_imp.times.size(); ++i) {
    std::vector<double> row{exact_imp.times[i]};
    for (int k = 0; k < n_modes; ++k)
      row.push_back(exact_imp.modes(static_cast<long>(i), k));
    modes.row(row);
  }
  files.push_back(write_file(opt, "fig1c_modes.csv", modes.out));

  std::vector<double> final_occ(static_cast<std::size_t>(n_modes));
  for (int k = 0; k < n_modes; ++k)
    final_occ[static_cast<std::size_t>(k)] =
        exact_imp.modes(static_cast<long>(exact_imp.times.size()) - 1, k);
  files.push_back(write_file(
      opt, "fig1c_modes.svg",
      line_chart("bath mode occupations at the horizon", "mode frequency (omega_a)",
                 {{"<n_k>", sys.model.omega, final_occ, kRed}})));
  return files;
}

std::vector<std::string> fig2a_impl(const ParsedConfig& c, const RunOptions& opt) {
  check_schema(c, "fig2a");
  const BathSpectrumSpec spec = spec_from(c);
  const InverseTemperature alpha_b = alpha_from(c, "temperature.alpha_b_dimensionless");
  const double t = req_pos(c, "overlap.t_over_inv_omega_a");
  const double wlo = opt_pos(c, "overlap.omega_min_over_omega_a", 0.02);
  const double whi = opt_pos(c, "overlap.omega_max_over_omega_a", 3.0);
  const int n = get_count(c, "overlap.n_points_count", 600, 8, 200000);
  if (!(whi > wlo)) throw ConfigError("overlap window needs omega_max > omega_min");

  const Spectrum s = make_spectrum(spec);
  Csv csv;
  stamp(csv, "figures (rate integrand overlap)", c);
  spectrum_meta(csv, spec);
  csv.meta("kernel time t = " + num(t) + "/omega_a, alpha_b = " + num(alpha_b.alpha));
  csv.header({"omega_over_omega_a", "g_t_over_omega_a", "sinc_minus_dimensionless",
              "sinc_plus_dimensionless"});
  std::vector<double> ws(static_cast<std::size_t>(n)), gt(ws.size()), sm(ws.size()),
      sp(ws.size());
  for (int i = 0; i < n; ++i) {
    const double w = wlo + (whi - wlo) * i / (n - 1);
    ws[static_cast<std::size_t>(i)] = w;
    gt[static_cast<std::size_t>(i)] = gT(w, s, alpha_b);
    sm[static_cast<std::size_t>(i)] = rates::sinc((w - s.omega_a) * t);
    sp[static_cast<std::size_t>(i)] = rates::sinc((w + s.omega_a) * t);
    csv.row({w, gt[static_cast<std::size_t>(i)], sm[static_cast<std::size_t>(i)],
             sp[static_cast<std::size_t>(i)]});
  }

  std::vector<std::string> files;
  files.push_back(write_file(opt, "fig2a_overlap.csv", csv.out));
  files.push_back(write_file(
      opt, "fig2a_overlap.svg",
      line_chart("coupling spectrum vs sinc kernels", "omega (omega_a)",
                 {{"G_T", ws, gt, kBlue},
                  {"sinc((w-wa)t)", ws, sm, kBlack},
                  {"sinc((w+wa)t)", ws, sp, kRed}})));
  return files;
}

std::vector<std::string> fig2b_impl(const ParsedConfig& c, const RunOptions& opt) {
  check_schema(c, "fig2b");
  const BathSpectrumSpec spec = spec_from(c);
  const InverseTemperature alpha_s = alpha_from(c, "temperature.alpha_s_dimensionless");
  const InverseTemperature alpha_b = alpha_from(c, "temperature.alpha_b_dimensionless");
  const Spectrum s = make_spectrum(spec);

  auto phase_objective = [&](const std::string& section, sched::Direction dir) {
    sched::ScheduleObjective obj;
    obj.direction = dir;
    obj.n_measurements = req_count(c, section + ".n_measurements_count", 1, 100000);
    obj.dt_min = req_num(c, section + ".dt_min_over_inv_omega_a");
    obj.dt_max = req_num(c, section + ".dt_max_over_inv_omega_a");
    try {
      obj.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(section + ": " + e.what());
    }
    return obj;
  };

  const sched::ScheduleResult heat = sched::greedy_schedule(
      phase_objective("phase_heat", sched::Direction::heat),
      me::initial_from_temperature(alpha_s), s, alpha_b);
  const double handoff = heat.final_rho_ee;
  const double t_off =
      heat.schedule.events.empty() ? 0.0 : heat.schedule.events.back().time;
  const sched::ScheduleResult cool = sched::greedy_schedule(
      phase_objective("phase_cool", sched::Direction::cool),
      {handoff, 1.0 - handoff}, s, alpha_b);

  std::vector<double> ts, rho, marks;
  ts.reserve(heat.trace.times.size() + cool.trace.times.size());
  for (std::size_t i = 0; i < heat.trace.times.size(); ++i) {
    ts.push_back(heat.trace.times[i]);
    rho.push_back(heat.trace.rho_ee[i]);
  }
  for (std::size_t i = 0; i < cool.trace.times.size(); ++i) {
    if (i == 0 && !ts.empty()) continue;  // seam sample duplicates the handoff
    ts.push_back(t_off + cool.trace.times[i]);
    rho.push_back(cool.trace.rho_ee[i]);
  }
  for (double t : heat.trace.event_times) marks.push_back(t);
  for (double t : cool.trace.event_times) marks.push_back(t_off + t);

  Csv csv;
  stamp(csv, "figures (heating then cooling protocol)", c);
  spectrum_meta(csv, spec);
  csv.meta("alpha_s = alpha_b = " + num(alpha_s.alpha));
  csv.meta("reference rho_ee (detailed balance): " + num(heat.reference_rho_ee));
  csv.meta("heating event times: " + join_nums(heat.trace.event_times));
  csv.meta("cooling event times (absolute): " +
           join_nums(std::vector<double>(marks.begin() + static_cast<long>(
                                             heat.trace.event_times.size()),
                                         marks.end())));
  csv.meta("peak rho_ee: " + num(heat.extremal_rho_ee) + ", final rho_ee: " +
           num(cool.final_rho_ee));
  csv.header({"t_over_inv_omega_a", "rho_ee_dimensionless"});
  for (std::size_t i = 0; i < ts.size(); ++i) csv.row({ts[i], rho[i]});

  std::vector<std::string> files;
  files.push_back(write_file(opt, "fig2b_protocol.csv", csv.out));
  files.push_back(write_file(
      opt, "fig2b_protocol.svg",
      line_chart("Zeno heating then oscillatory-Zeno cooling", "t (1/omega_a)",
                 {{"rho_ee", ts, rho, kBlack}}, marks)));
  return files;
}

std::vector<std::string> figures_impl(const RunOptions& opt) {
  std::vector<std::string> files;
  auto add = [&files](std::vector<std::string> more) {
    files.insert(files.end(), more.begin(), more.end());
  };
  add(equilibrium_impl(parse_config(kFigPurityConfig), opt, "fig_purity"));
  add(fig1_impl(parse_config(kFig1Config), opt));
  add(rates_impl(parse_config(kFig1aConfig), opt, "fig1a_rates"));
  add(evolve_impl(parse_config(kFig1bConfig), opt, "fig1b_entropy", true));
  add(fig2a_impl(parse_config(kFig2aConfig), opt));
  add(fig2b_impl(parse_config(kFig2bConfig), opt));
  add(sweep_impl(parse_config(kFig2cConfig), opt, "fig2c_sweep"));
  return files;
}

}  // namespace

// ------------------------------------------------------------------ public

ParsedConfig parse_config(const std::string& text) {
  ParsedConfig cfg;
  cfg.text = text;
  cfg.hash = fnv1a(text);
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash_pos = line.find('#'); hash_pos != std::string::npos)
      line.erase(hash_pos);
    trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated [section]");
      section = line.substr(1, line.size() - 2);
      trim(section);
      if (!valid_key(section))
        throw ConfigError("line " + std::to_string(lineno) + ": bad section name");
      continue;
    }
    const auto eq_pos = line.find('=');
    if (eq_pos == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = line.substr(0, eq_pos);
    std::string value = line.substr(eq_pos + 1);
    trim(key);
    trim(value);
    if (!valid_key(key))
      throw ConfigError("line " + std::to_string(lineno) + ": bad key '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.values.count(full))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + full +
                        "'");
    cfg.values.emplace(full, parse_value(value, lineno));
  }
  return cfg;
}

ParsedConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {
      "equilibrium", "rates",  "evolve",   "exact",  "entropy",
      "cooling-check", "schedule", "sweep", "figures"};
  return names;
}

std::vector<std::string> run(const std::string& subcommand, const ParsedConfig& config,
                             const RunOptions& opt) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), subcommand) == names.end())
    throw ConfigError("unknown subcommand '" + subcommand + "'");
  if (subcommand == "figures") {
    if (!config.values.empty() || !config.text.empty())
      throw ConfigError("figures regenerates bundled configs; do not pass --config");
    return figures_impl(opt);
  }
  if (subcommand == "equilibrium") return equilibrium_impl(config, opt, "equilibrium");
  if (subcommand == "rates") return rates_impl(config, opt, "rates");
  if (subcommand == "evolve") return evolve_impl(config, opt, "trace", false);
  if (subcommand == "exact") return exact_impl(config, opt, "exact_trace");
  if (subcommand == "entropy") return evolve_impl(config, opt, "entropy", true);
  if (subcommand == "cooling-check")
    return cooling_check_impl(config, opt, "cooling_check");
  if (subcommand == "schedule") return schedule_impl(config, opt, "schedule");
  return sweep_impl(config, opt, "sweep");
}

}  // namespace zeno::cli
