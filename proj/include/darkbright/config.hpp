#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "darkbright/presets.hpp"
#include "darkbright/thermometry.hpp"

namespace darkbright {

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ScenarioKind {
  steady,
  probe_sweep,
  temp_curve,
  diagram,
  levels,
  fit_calibration,
  fit_local,
  infer,
};

inline const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::steady: return "steady";
    case ScenarioKind::probe_sweep: return "probe-sweep";
    case ScenarioKind::temp_curve: return "temp-curve";
    case ScenarioKind::diagram: return "diagram";
    case ScenarioKind::levels: return "levels";
    case ScenarioKind::fit_calibration: return "fit-calibration";
    case ScenarioKind::fit_local: return "fit-local";
    case ScenarioKind::infer: return "infer";
  }
  return "?";
}

inline ScenarioKind parse_scenario_kind(const std::string& s) {
  for (ScenarioKind k :
       {ScenarioKind::steady, ScenarioKind::probe_sweep, ScenarioKind::temp_curve,
        ScenarioKind::diagram, ScenarioKind::levels, ScenarioKind::fit_calibration,
        ScenarioKind::fit_local, ScenarioKind::infer})
    if (s == to_string(k)) return k;
  throw validation_error("config: unknown scenario kind '" + s + "'");
}

inline const char* to_string(Transition t) {
  switch (t) {
    case Transition::ge: return "ge";
    case Transition::ef: return "ef";
    case Transition::bright_00B: return "bright_00B";
    case Transition::dark_DDp: return "dark_DDp";
  }
  return "?";
}

inline Transition parse_transition(const std::string& s) {
  for (Transition t : {Transition::ge, Transition::ef, Transition::bright_00B,
                       Transition::dark_DDp})
    if (s == to_string(t)) return t;
  throw validation_error(
      "config: unknown transition '" + s +
      "' (expected ge, ef, bright_00B, or dark_DDp)");
}

inline SweptBath parse_swept_bath(const std::string& s) {
  if (s == "global") return SweptBath::global_bath;
  if (s == "local") return SweptBath::local_bath;
  throw validation_error("config: unknown bath '" + s +
                         "' (expected global or local)");
}

inline const char* to_string(SecularPolicy::Mode m) {
  switch (m) {
    case SecularPolicy::Mode::cutoff: return "cutoff";
    case SecularPolicy::Mode::full_secular: return "full";
    case SecularPolicy::Mode::none: return "none";
  }
  return "?";
}

inline SecularPolicy::Mode parse_secular_mode(const std::string& s) {
  if (s == "cutoff") return SecularPolicy::Mode::cutoff;
  if (s == "full") return SecularPolicy::Mode::full_secular;
  if (s == "none") return SecularPolicy::Mode::none;
  throw validation_error("config: unknown secular mode '" + s +
                         "' (expected cutoff, full, or none)");
}

/// Uniform grid description used by every sweep scenario.  `values()` is
/// strictly increasing by construction.
struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  int points = 0;
  bool log = false;

  void validate(const std::string& what) const {
    if (points < 2)
      throw validation_error("config: " + what + ".points must be >= 2");
    if (!(min < max))
      throw validation_error("config: " + what + " must have min < max");
    if (log && !(min > 0.0))
      throw validation_error("config: " + what +
                             ".min must be positive for a log grid");
  }

  std::vector<double> values() const {
    return log ? logspace(min, max, points) : linspace(min, max, points);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace((unsigned char)s[b])) ++b;
  while (e > b && std::isspace((unsigned char)s[e - 1])) --e;
  return s.substr(b, e - b);
}

}  // namespace detail

/// Flat section.key -> value store shared by the INI reader, the JSON
/// mirror, and --set overrides.  Typed getters mark keys as consumed so the
/// loader can reject typos afterwards.
class KeyValues {
 public:
  struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
  };

  void set(const std::string& section, const std::string& key,
           const std::string& value, int line = 0) {
    const std::string full = section + "." + key;
    auto it = entries_.find(full);
    if (it == entries_.end()) {
      order_.push_back(full);
      entries_[full] = Entry{value, line, false};
    } else {
      it->second.value = value;
      it->second.line = line;
    }
  }

  bool contains(const std::string& section, const std::string& key) const {
    return entries_.count(section + "." + key) > 0;
  }

  std::optional<std::string> take(const std::string& section,
                                  const std::string& key) {
    auto it = entries_.find(section + "." + key);
    if (it == entries_.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }

  std::string take_string(const std::string& section, const std::string& key,
                          const std::string& fallback) {
    auto v = take(section, key);
    return v ? *v : fallback;
  }

  double take_double(const std::string& section, const std::string& key,
                     double fallback) {
    auto v = take(section, key);
    if (!v) return fallback;
    return parse_double(section + "." + key, *v);
  }

  int take_int(const std::string& section, const std::string& key,
               int fallback) {
    auto v = take(section, key);
    if (!v) return fallback;
    try {
      size_t used = 0;
      const long n = std::stol(*v, &used);
      if (used != v->size()) throw std::invalid_argument(*v);
      return int(n);
    } catch (const std::exception&) {
      throw validation_error("config: " + section + "." + key +
                             " must be an integer (got '" + *v + "')");
    }
  }

  bool take_bool(const std::string& section, const std::string& key,
                 bool fallback) {
    auto v = take(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw validation_error("config: " + section + "." + key +
                           " must be true or false (got '" + *v + "')");
  }

  /// Comma separated list of doubles.
  std::vector<double> take_list(const std::string& section,
                                const std::string& key,
                                std::vector<double> fallback) {
    auto v = take(section, key);
    if (!v) return fallback;
    std::vector<double> out;
    std::string cell;
    std::istringstream ss(*v);
    while (std::getline(ss, cell, ','))
      out.push_back(parse_double(section + "." + key, detail::trim(cell)));
    if (out.empty())
      throw validation_error("config: " + section + "." + key +
                             " must be a comma separated list of numbers");
    return out;
  }

  /// Throws if any key was never consumed; catches misspelled settings.
  void reject_unused() const {
    for (const auto& full : order_) {
      const Entry& e = entries_.at(full);
      if (!e.used)
        throw validation_error(
            "config: unknown setting '" + full + "'" +
            (e.line > 0 ? " (line " + std::to_string(e.line) + ")" : ""));
    }
  }

  static KeyValues from_ini_text(const std::string& text,
                                 const std::string& origin) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const std::string s = detail::trim(line);
      if (s.empty() || s[0] == '#' || s[0] == ';') continue;
      if (s.front() == '[') {
        if (s.back() != ']' || s.size() < 3)
          throw parse_error(origin + ":" + std::to_string(lineno) +
                            ": malformed section header '" + s + "'");
        section = detail::trim(s.substr(1, s.size() - 2));
        continue;
      }
      const size_t eq = s.find('=');
      if (eq == std::string::npos)
        throw parse_error(origin + ":" + std::to_string(lineno) +
                          ": expected 'key = value', got '" + s + "'");
      const std::string key = detail::trim(s.substr(0, eq));
      const std::string value = detail::trim(s.substr(eq + 1));
      if (key.empty())
        throw parse_error(origin + ":" + std::to_string(lineno) +
                          ": empty key");
      if (section.empty())
        throw parse_error(origin + ":" + std::to_string(lineno) +
                          ": setting outside of any [section]");
      kv.set(section, key, value, lineno);
    }
    return kv;
  }

  /// JSON mirror of the INI layout: an object of section objects.  Scalar
  /// values and flat numeric arrays map onto the same string store.
  static KeyValues from_json_text(const std::string& text,
                                  const std::string& origin) {
    nlohmann::json root;
    try {
      root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw parse_error(origin + ": " + e.what());
    }
    if (!root.is_object())
      throw parse_error(origin + ": top level must be an object of sections");
    KeyValues kv;
    for (const auto& [section, body] : root.items()) {
      if (!body.is_object())
        throw parse_error(origin + ": section '" + section +
                          "' must be an object");
      for (const auto& [key, value] : body.items()) {
        std::string s;
        if (value.is_string()) {
          s = value.get<std::string>();
        } else if (value.is_boolean()) {
          s = value.get<bool>() ? "true" : "false";
        } else if (value.is_number()) {
          s = value.dump();
        } else if (value.is_array()) {
          std::string joined;
          for (const auto& item : value) {
            if (!item.is_number())
              throw parse_error(origin + ": " + section + "." + key +
                                " array entries must be numbers");
            if (!joined.empty()) joined += ",";
            joined += item.dump();
          }
          s = joined;
        } else {
          throw parse_error(origin + ": " + section + "." + key +
                            " has an unsupported value type");
        }
        kv.set(section, key, s);
      }
    }
    return kv;
  }

  /// Reads .json as the JSON mirror, anything else as sectioned key/value.
  static KeyValues from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string origin = path.filename().string();
    if (path.extension() == ".json")
      return from_json_text(buf.str(), origin);
    return from_ini_text(buf.str(), origin);
  }

 private:
  static double parse_double(const std::string& full, const std::string& v) {
    try {
      size_t used = 0;
      const double x = std::stod(v, &used);
      if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw validation_error("config: " + full +
                             " must be a finite number (got '" + v + "')");
    }
  }

  std::vector<std::string> order_;
  std::map<std::string, Entry> entries_;
};

/// Applies one `section.key=value` override on top of a parsed config.
inline void apply_override(KeyValues& kv, const std::string& spec) {
  const size_t eq = spec.find('=');
  const size_t dot = spec.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw validation_error("--set expects section.key=value, got '" + spec +
                           "'");
  const std::string section = detail::trim(spec.substr(0, dot));
  const std::string key = detail::trim(spec.substr(dot + 1, eq - dot - 1));
  const std::string value = detail::trim(spec.substr(eq + 1));
  if (section.empty() || key.empty())
    throw validation_error("--set expects section.key=value, got '" + spec +
                           "'");
  kv.set(section, key, value);
}

/// Everything one scenario run needs, with defaults already filled in.
/// The scenario kind comes from the CLI subcommand; a config may repeat it
/// under [scenario] kind but must then agree.
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::steady;

  DeviceConfig device = experiment_device();
  bool single_qubit = false;  // drop q2 and the shared coupling

  BathLayout layout{};
  BathTemps temps{0.095, 0.095};

  double a_in_rel = 0.02;  // probe amplitude over the angular global rate
  SecularPolicy policy{};

  std::string out_dir = "out";
  int threads = 0;  // 0 = DARKBRIGHT_THREADS or hardware default

  // probe-sweep
  GridSpec probe{7.5, 8.1, 201, false};

  // temp-curve and diagram
  GridSpec temp{0.01, 2.0, 30, true};
  SweptBath swept = SweptBath::global_bath;
  double other_k = 0.095;
  std::vector<double> family;  // diagram: one curve per fixed-bath value
  Transition transition = Transition::bright_00B;

  // steady
  double steady_probe_ghz = 0.0;  // 0 = probe the configured transition

  // fit-calibration and fit-local
  std::string data_path;
  std::string data_q1_path;
  std::string data_q2_path;
  SweptBath heated = SweptBath::global_bath;
  double t_res_k = 0.095;
  double alpha_glob_k_per_mw = 1.0;
  double gamma_loc1_guess_mhz = 0.05;
  int fit_max_iterations = 200;

  // infer
  double target_t00b = -1.0;
  double target_tddp = -1.0;
  InverterOptions inverter{};

  double probe_a_in() const {
    return a_in_rel * angular_rate(device.gamma_glob_mhz);
  }
};

namespace detail {

inline void check_positive(double v, const std::string& name) {
  if (!(v > 0.0))
    throw validation_error("config: " + name + " must satisfy " + name +
                           " > 0 (got " + std::to_string(v) + ")");
}

inline void check_non_negative(double v, const std::string& name) {
  if (!(v >= 0.0))
    throw validation_error("config: " + name + " must satisfy " + name +
                           " >= 0 (got " + std::to_string(v) + ")");
}

inline void check_input_file(const std::string& path, const std::string& name) {
  if (path.empty())
    throw validation_error("config: " + name + " is required for this scenario");
  if (!std::filesystem::exists(path))
    throw validation_error("config: " + name + " file does not exist: " + path);
}

}  // namespace detail

/// Builds and validates a ScenarioConfig from parsed key/values.  Consumes
/// every recognized key and rejects leftovers.  Relative data paths are
/// resolved against `base_dir` (the config file's directory) so presets can
/// ship next to their sample data.
inline ScenarioConfig build_scenario_config(ScenarioKind kind, KeyValues& kv,
                                            const std::string& base_dir = "") {
  ScenarioConfig c;
  c.kind = kind;

  if (auto declared = kv.take("scenario", "kind")) {
    if (parse_scenario_kind(*declared) != kind)
      throw validation_error("config: scenario.kind is '" + *declared +
                             "' but the subcommand is '" +
                             std::string(to_string(kind)) + "'");
  }
  c.out_dir = kv.take_string("scenario", "out_dir", c.out_dir);
  c.threads = kv.take_int("scenario", "threads", c.threads);
  if (c.threads < 0)
    throw validation_error("config: scenario.threads must be >= 0");

  c.device.q1.omega_ghz = kv.take_double("device", "omega1_ghz", c.device.q1.omega_ghz);
  c.device.q1.beta_ghz = kv.take_double("device", "beta1_ghz", c.device.q1.beta_ghz);
  c.device.q2.omega_ghz = kv.take_double("device", "omega2_ghz", c.device.q2.omega_ghz);
  c.device.q2.beta_ghz = kv.take_double("device", "beta2_ghz", c.device.q2.beta_ghz);
  const int levels = kv.take_int("device", "levels", c.device.q1.levels);
  c.device.q1.levels = c.device.q2.levels = levels;
  c.device.g_ghz = kv.take_double("device", "g_ghz", c.device.g_ghz);
  c.device.gamma_glob_mhz =
      kv.take_double("device", "gamma_glob_mhz", c.device.gamma_glob_mhz);
  c.device.gamma_loc1_mhz =
      kv.take_double("device", "gamma_loc1_mhz", c.device.gamma_loc1_mhz);
  c.device.k_ratio = kv.take_double("device", "k_ratio", c.device.k_ratio);
  c.single_qubit = kv.take_bool("device", "single_qubit", c.single_qubit);

  detail::check_positive(c.device.k_ratio, "device.k_ratio");
  detail::check_positive(c.device.g_ghz, "device.g_ghz");
  detail::check_positive(c.device.gamma_glob_mhz, "device.gamma_glob_mhz");
  detail::check_non_negative(c.device.gamma_loc1_mhz, "device.gamma_loc1_mhz");
  c.device.validate();

  c.temps.t_glob_k = kv.take_double("baths", "t_glob_k", c.temps.t_glob_k);
  c.temps.t_loc_k = kv.take_double("baths", "t_loc_k", c.temps.t_loc_k);
  c.layout.global_enabled = kv.take_bool("baths", "global", c.layout.global_enabled);
  c.layout.local_enabled = kv.take_bool("baths", "local", c.layout.local_enabled);
  detail::check_non_negative(c.temps.t_glob_k, "baths.t_glob_k");
  detail::check_non_negative(c.temps.t_loc_k, "baths.t_loc_k");

  c.a_in_rel = kv.take_double("probe", "a_in_rel", c.a_in_rel);
  detail::check_positive(c.a_in_rel, "probe.a_in_rel");

  c.policy.mode = parse_secular_mode(
      kv.take_string("secular", "mode", to_string(c.policy.mode)));
  c.policy.delta_ghz = kv.take_double("secular", "delta_ghz", c.policy.delta_ghz);

  c.probe.min = kv.take_double("sweep", "f_min_ghz", c.probe.min);
  c.probe.max = kv.take_double("sweep", "f_max_ghz", c.probe.max);
  c.probe.points = kv.take_int("sweep", "points", c.probe.points);
  c.probe.log = kv.take_bool("sweep", "log", c.probe.log);

  c.temp.min = kv.take_double("temps", "t_min_k", c.temp.min);
  c.temp.max = kv.take_double("temps", "t_max_k", c.temp.max);
  c.temp.points = kv.take_int("temps", "points", c.temp.points);
  c.temp.log = kv.take_bool("temps", "log", c.temp.log);
  c.swept = parse_swept_bath(
      kv.take_string("temps", "swept", to_string(c.swept)));
  c.other_k = kv.take_double("temps", "other_k", c.other_k);
  c.family = kv.take_list("temps", "family", {});
  c.transition = parse_transition(
      kv.take_string("temps", "transition", to_string(c.transition)));
  detail::check_non_negative(c.other_k, "temps.other_k");

  c.steady_probe_ghz =
      kv.take_double("steady", "probe_ghz", c.steady_probe_ghz);
  detail::check_non_negative(c.steady_probe_ghz, "steady.probe_ghz");

  c.data_path = kv.take_string("fit", "data", c.data_path);
  c.data_q1_path = kv.take_string("fit", "data_q1", c.data_q1_path);
  c.data_q2_path = kv.take_string("fit", "data_q2", c.data_q2_path);
  c.heated = parse_swept_bath(
      kv.take_string("fit", "heated", to_string(c.heated)));
  c.t_res_k = kv.take_double("fit", "t_res_k", c.t_res_k);
  c.alpha_glob_k_per_mw =
      kv.take_double("fit", "alpha_glob_k_per_mw", c.alpha_glob_k_per_mw);
  c.gamma_loc1_guess_mhz =
      kv.take_double("fit", "gamma_loc1_guess_mhz", c.gamma_loc1_guess_mhz);
  c.fit_max_iterations =
      kv.take_int("fit", "max_iterations", c.fit_max_iterations);
  if (c.fit_max_iterations < 1)
    throw validation_error("config: fit.max_iterations must be >= 1");
  detail::check_positive(c.t_res_k, "fit.t_res_k");
  detail::check_positive(c.alpha_glob_k_per_mw, "fit.alpha_glob_k_per_mw");
  detail::check_positive(c.gamma_loc1_guess_mhz, "fit.gamma_loc1_guess_mhz");

  c.target_t00b = kv.take_double("infer", "t_00b", c.target_t00b);
  c.target_tddp = kv.take_double("infer", "t_ddp", c.target_tddp);
  c.inverter.t_glob_min_k =
      kv.take_double("infer", "t_glob_min_k", c.inverter.t_glob_min_k);
  c.inverter.t_glob_max_k =
      kv.take_double("infer", "t_glob_max_k", c.inverter.t_glob_max_k);
  c.inverter.t_loc_min_k =
      kv.take_double("infer", "t_loc_min_k", c.inverter.t_loc_min_k);
  c.inverter.t_loc_max_k =
      kv.take_double("infer", "t_loc_max_k", c.inverter.t_loc_max_k);
  c.inverter.grid_points = kv.take_int("infer", "grid_points", c.inverter.grid_points);
  c.inverter.starts = kv.take_int("infer", "starts", c.inverter.starts);

  kv.reject_unused();

  if (!base_dir.empty()) {
    auto rebase = [&](std::string& p) {
      if (!p.empty() && std::filesystem::path(p).is_relative())
        p = (std::filesystem::path(base_dir) / p).string();
    };
    rebase(c.data_path);
    rebase(c.data_q1_path);
    rebase(c.data_q2_path);
  }

  // Scenario-specific requirements.
  switch (kind) {
    case ScenarioKind::probe_sweep:
      c.probe.validate("sweep");
      break;
    case ScenarioKind::temp_curve:
    case ScenarioKind::diagram:
      c.temp.validate("temps");
      if (c.family.empty()) c.family = {c.other_k};
      for (double v : c.family)
        detail::check_non_negative(v, "temps.family entries");
      break;
    case ScenarioKind::fit_calibration:
      detail::check_input_file(c.data_path, "fit.data");
      break;
    case ScenarioKind::fit_local:
      detail::check_input_file(c.data_q1_path, "fit.data_q1");
      detail::check_input_file(c.data_q2_path, "fit.data_q2");
      break;
    case ScenarioKind::infer:
      detail::check_non_negative(c.target_t00b, "infer.t_00b");
      detail::check_non_negative(c.target_tddp, "infer.t_ddp");
      c.inverter.a_in = c.probe_a_in();
      c.inverter.validate();
      break;
    case ScenarioKind::steady:
    case ScenarioKind::levels:
      break;
  }
  if (c.single_qubit &&
      (kind == ScenarioKind::diagram || kind == ScenarioKind::infer))
    throw validation_error(
        "config: device.single_qubit is incompatible with the " +
        std::string(to_string(kind)) + " scenario (needs the pair)");
  return c;
}

inline ScenarioConfig load_scenario_config(
    ScenarioKind kind, const std::string& config_path,
    const std::vector<std::string>& overrides = {}) {
  KeyValues kv;
  std::string base_dir;
  if (!config_path.empty()) {
    kv = KeyValues::from_file(config_path);
    base_dir = std::filesystem::path(config_path).parent_path().string();
  }
  for (const auto& o : overrides) apply_override(kv, o);
  return build_scenario_config(kind, kv, base_dir);
}

/// Full effective-settings echo for the run manifest.  Every default that
/// influenced the run shows up here even when absent from the input file.
inline nlohmann::json config_echo(const ScenarioConfig& c) {
  nlohmann::json j;
  j["scenario"] = {{"kind", to_string(c.kind)},
                   {"out_dir", c.out_dir},
                   {"threads", c.threads}};
  j["device"] = {{"omega1_ghz", c.device.q1.omega_ghz},
                 {"beta1_ghz", c.device.q1.beta_ghz},
                 {"omega2_ghz", c.device.q2.omega_ghz},
                 {"beta2_ghz", c.device.q2.beta_ghz},
                 {"levels", c.device.q1.levels},
                 {"g_ghz", c.device.g_ghz},
                 {"gamma_glob_mhz", c.device.gamma_glob_mhz},
                 {"gamma_loc1_mhz", c.device.gamma_loc1_mhz},
                 {"k_ratio", c.device.k_ratio},
                 {"single_qubit", c.single_qubit}};
  j["baths"] = {{"t_glob_k", c.temps.t_glob_k},
                {"t_loc_k", c.temps.t_loc_k},
                {"global", c.layout.global_enabled},
                {"local", c.layout.local_enabled}};
  j["probe"] = {{"a_in_rel", c.a_in_rel}, {"a_in", c.probe_a_in()}};
  j["secular"] = {{"mode", to_string(c.policy.mode)},
                  {"delta_ghz", c.policy.delta_ghz}};
  j["sweep"] = {{"f_min_ghz", c.probe.min},
                {"f_max_ghz", c.probe.max},
                {"points", c.probe.points},
                {"log", c.probe.log}};
  j["temps"] = {{"t_min_k", c.temp.min},
                {"t_max_k", c.temp.max},
                {"points", c.temp.points},
                {"log", c.temp.log},
                {"swept", to_string(c.swept)},
                {"other_k", c.other_k},
                {"family", c.family},
                {"transition", to_string(c.transition)}};
  j["steady"] = {{"probe_ghz", c.steady_probe_ghz}};
  j["fit"] = {{"data", c.data_path},
              {"data_q1", c.data_q1_path},
              {"data_q2", c.data_q2_path},
              {"heated", to_string(c.heated)},
              {"t_res_k", c.t_res_k},
              {"alpha_glob_k_per_mw", c.alpha_glob_k_per_mw},
              {"gamma_loc1_guess_mhz", c.gamma_loc1_guess_mhz},
              {"max_iterations", c.fit_max_iterations}};
  j["infer"] = {{"t_00b", c.target_t00b},
                {"t_ddp", c.target_tddp},
                {"t_glob_min_k", c.inverter.t_glob_min_k},
                {"t_glob_max_k", c.inverter.t_glob_max_k},
                {"t_loc_min_k", c.inverter.t_loc_min_k},
                {"t_loc_max_k", c.inverter.t_loc_max_k},
                {"grid_points", c.inverter.grid_points},
                {"starts", c.inverter.starts}};
  return j;
}

}  // namespace darkbright
