#pragma once

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qecho/errors.hpp"
#include "qecho/format.hpp"
#include "qecho/pulse.hpp"

namespace qecho {

// Flat experiment description; defaults reproduce the two-pulse echo setup
// with the refined-grid surrogate.
struct ExperimentConfig {
  std::string experiment = "photon_echo";  // photon_echo|range_sweep|m_sweep|convergence
  int ensemble_count = 800;
  double range_mev = 15.0;
  double fwhm_mev = 7.5;
  std::vector<Pulse> pulses = {{0.0, 2.5, std::numbers::pi / 2.0},
                               {40.0, 2.5, std::numbers::pi}};
  double t_start = -5.0;
  double t_end = 100.0;
  double dt = 0.01;
  std::string variant = "berg";  // be|berg
  int detuning_count = 101;      // trained detunings (BERG)
  std::vector<double> omega_grid = {0.0, 1.0};
  std::uint64_t seed = 42;
  int n_samples = 100;
  double echo_window_lo = 60.0;
  double echo_window_hi = 100.0;
  double rtol = 1e-8;
  double atol = 1e-11;
  int threads = 0;  // 0 = all hardware threads
  std::vector<double> sweep_ranges;
  std::vector<int> sweep_m_values;
};

namespace detail {

struct ConfigValue {
  bool is_array = false;
  bool is_string = false;
  std::string scalar;                  // raw number token or string contents
  std::vector<std::string> items;      // raw number tokens
};

inline std::string strip(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Flat TOML subset: `key = value` lines, `#` comments, quoted strings,
// numbers, and single-line arrays of numbers. Tables are rejected.
inline std::map<std::string, ConfigValue> parse_flat_toml(const std::string& text) {
  std::map<std::string, ConfigValue> out;
  std::istringstream stream(text);
  std::string line;
  int lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    const std::string where = "config line " + std::to_string(lineno);
    // Cut comments outside of quotes.
    bool in_quote = false;
    std::string body;
    for (const char ch : line) {
      if (ch == '"') in_quote = !in_quote;
      if (ch == '#' && !in_quote) break;
      body.push_back(ch);
    }
    body = strip(body);
    if (body.empty()) continue;
    if (body.front() == '[') {
      throw ConfigError(where + ": tables are not supported, use flat keys");
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = strip(body.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    for (const char ch : key) {
      if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') {
        throw ConfigError(where + ": invalid key '" + key + "'");
      }
    }
    if (out.count(key) != 0) throw ConfigError(where + ": duplicate key '" + key + "'");
    const std::string value = strip(body.substr(eq + 1));
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");

    ConfigValue cv;
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') {
        throw ConfigError(where + ": unterminated string for '" + key + "'");
      }
      cv.is_string = true;
      cv.scalar = value.substr(1, value.size() - 2);
      if (cv.scalar.find('"') != std::string::npos) {
        throw ConfigError(where + ": embedded quotes are not supported");
      }
    } else if (value.front() == '[') {
      if (value.back() != ']') {
        throw ConfigError(where + ": arrays must close on the same line");
      }
      cv.is_array = true;
      const std::string inner = strip(value.substr(1, value.size() - 2));
      if (!inner.empty()) {
        std::size_t pos = 0;
        while (pos <= inner.size()) {
          const std::size_t comma = inner.find(',', pos);
          const std::string item =
              strip(comma == std::string::npos ? inner.substr(pos)
                                               : inner.substr(pos, comma - pos));
          if (item.empty()) {
            throw ConfigError(where + ": empty array element for '" + key + "'");
          }
          cv.items.push_back(item);
          if (comma == std::string::npos) break;
          pos = comma + 1;
        }
      }
    } else {
      cv.scalar = value;
    }
    out.emplace(key, cv);
  }
  return out;
}

inline double token_to_double(const std::string& token, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || token.empty() || errno == ERANGE) {
    throw ConfigError("config key '" + key + "': '" + token + "' is not a number");
  }
  return v;
}

inline long long token_to_int(const std::string& token, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(token.c_str(), &end, 10);
  if (end != token.c_str() + token.size() || token.empty() || errno == ERANGE) {
    throw ConfigError("config key '" + key + "': '" + token + "' is not an integer");
  }
  return v;
}

inline std::uint64_t token_to_uint64(const std::string& token, const std::string& key) {
  if (!token.empty() && token.front() == '-') {
    throw ConfigError("config key '" + key + "': must be non-negative");
  }
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(token.c_str(), &end, 10);
  if (end != token.c_str() + token.size() || token.empty() || errno == ERANGE) {
    throw ConfigError("config key '" + key + "': '" + token + "' is not an integer");
  }
  return v;
}

}  // namespace detail

inline void validate_config(const ExperimentConfig& cfg) {
  const std::set<std::string> experiments = {"photon_echo", "range_sweep", "m_sweep",
                                             "convergence"};
  if (experiments.count(cfg.experiment) == 0) {
    throw ConfigError("config key 'experiment': unknown value '" + cfg.experiment + "'");
  }
  if (cfg.ensemble_count < 2) {
    throw ConfigError("config key 'ensemble_count': need at least 2");
  }
  if (!(cfg.range_mev > 0.0)) throw ConfigError("config key 'range_mev': must be positive");
  if (!(cfg.fwhm_mev > 0.0)) throw ConfigError("config key 'fwhm_mev': must be positive");
  for (const Pulse& p : cfg.pulses) {
    if (!(p.duration > 0.0)) {
      throw ConfigError("config key 'pulse_durations': must be positive");
    }
  }
  if (!(cfg.t_end > cfg.t_start)) {
    throw ConfigError("config key 't_end': must exceed t_start");
  }
  if (!(cfg.dt > 0.0)) throw ConfigError("config key 'dt': must be positive");
  if (cfg.variant != "be" && cfg.variant != "berg") {
    throw ConfigError("config key 'variant': must be \"be\" or \"berg\"");
  }
  if (cfg.variant == "berg" && cfg.detuning_count < 2) {
    throw ConfigError("config key 'detuning_count': need at least 2");
  }
  if (cfg.omega_grid != std::vector<double>{0.0, 1.0}) {
    throw ConfigError("config key 'omega_grid': must be [0.0, 1.0]");
  }
  if (cfg.n_samples < 5) {
    throw ConfigError("config key 'n_samples': need at least 5");
  }
  if (!(cfg.echo_window_lo < cfg.echo_window_hi)) {
    throw ConfigError("config key 'echo_window': must satisfy lo < hi");
  }
  if (cfg.echo_window_lo < cfg.t_start || cfg.echo_window_hi > cfg.t_end) {
    throw ConfigError("config key 'echo_window': must lie inside [t_start, t_end]");
  }
  if (!(cfg.rtol > 0.0)) throw ConfigError("config key 'rtol': must be positive");
  if (!(cfg.atol > 0.0)) throw ConfigError("config key 'atol': must be positive");
  if (cfg.threads < 0) throw ConfigError("config key 'threads': must be non-negative");
  if (cfg.experiment == "range_sweep" && cfg.sweep_ranges.empty()) {
    throw ConfigError("config key 'sweep_ranges': required for range_sweep");
  }
  for (const double r : cfg.sweep_ranges) {
    if (!(r > 0.0)) throw ConfigError("config key 'sweep_ranges': values must be positive");
  }
  if ((cfg.experiment == "m_sweep" || cfg.experiment == "convergence") &&
      cfg.sweep_m_values.empty()) {
    throw ConfigError("config key 'sweep_m_values': required for this experiment");
  }
  for (const int m : cfg.sweep_m_values) {
    if (m < 1) throw ConfigError("config key 'sweep_m_values': values must be >= 1");
  }
}

inline ExperimentConfig parse_config(const std::string& text) {
  auto kv = detail::parse_flat_toml(text);
  ExperimentConfig cfg;

  const std::set<std::string> known = {
      "experiment", "ensemble_count", "range_mev", "fwhm_mev", "pulse_centers",
      "pulse_durations", "pulse_areas", "t_start", "t_end", "dt", "variant",
      "detuning_count", "omega_grid", "seed", "n_samples", "echo_window", "rtol",
      "atol", "threads", "sweep_ranges", "sweep_m_values"};
  for (const auto& [key, value] : kv) {
    if (known.count(key) == 0) throw ConfigError("config key '" + key + "' is unknown");
    (void)value;
  }
  for (const char* required :
       {"experiment", "ensemble_count", "range_mev", "fwhm_mev", "t_start", "t_end",
        "dt", "variant"}) {
    if (kv.count(required) == 0) {
      throw ConfigError(std::string("config key '") + required + "' is missing");
    }
  }

  auto get_string = [&kv](const char* key, std::string& dst) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    if (!it->second.is_string) {
      throw ConfigError(std::string("config key '") + key + "': expected a quoted string");
    }
    dst = it->second.scalar;
  };
  auto get_double = [&kv](const char* key, double& dst) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    if (it->second.is_array || it->second.is_string) {
      throw ConfigError(std::string("config key '") + key + "': expected a number");
    }
    dst = detail::token_to_double(it->second.scalar, key);
  };
  auto get_int = [&kv](const char* key, int& dst) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    if (it->second.is_array || it->second.is_string) {
      throw ConfigError(std::string("config key '") + key + "': expected an integer");
    }
    const long long v = detail::token_to_int(it->second.scalar, key);
    if (v < INT32_MIN || v > INT32_MAX) {
      throw ConfigError(std::string("config key '") + key + "': out of range");
    }
    dst = static_cast<int>(v);
  };
  auto get_double_array = [&kv](const char* key, std::vector<double>& dst) {
    auto it = kv.find(key);
    if (it == kv.end()) return false;
    if (!it->second.is_array) {
      throw ConfigError(std::string("config key '") + key + "': expected an array");
    }
    dst.clear();
    for (const std::string& item : it->second.items) {
      dst.push_back(detail::token_to_double(item, key));
    }
    return true;
  };

  get_string("experiment", cfg.experiment);
  get_int("ensemble_count", cfg.ensemble_count);
  get_double("range_mev", cfg.range_mev);
  get_double("fwhm_mev", cfg.fwhm_mev);
  get_double("t_start", cfg.t_start);
  get_double("t_end", cfg.t_end);
  get_double("dt", cfg.dt);
  get_string("variant", cfg.variant);
  get_int("detuning_count", cfg.detuning_count);
  get_double_array("omega_grid", cfg.omega_grid);
  if (auto it = kv.find("seed"); it != kv.end()) {
    if (it->second.is_array || it->second.is_string) {
      throw ConfigError("config key 'seed': expected an integer");
    }
    cfg.seed = detail::token_to_uint64(it->second.scalar, "seed");
  }
  get_int("n_samples", cfg.n_samples);
  std::vector<double> window;
  if (get_double_array("echo_window", window)) {
    if (window.size() != 2) {
      throw ConfigError("config key 'echo_window': expected [lo, hi]");
    }
    cfg.echo_window_lo = window[0];
    cfg.echo_window_hi = window[1];
  }
  get_double("rtol", cfg.rtol);
  get_double("atol", cfg.atol);
  get_int("threads", cfg.threads);
  get_double_array("sweep_ranges", cfg.sweep_ranges);
  std::vector<double> m_values;
  if (get_double_array("sweep_m_values", m_values)) {
    cfg.sweep_m_values.clear();
    for (const double m : m_values) {
      if (m != std::floor(m)) {
        throw ConfigError("config key 'sweep_m_values': values must be integers");
      }
      cfg.sweep_m_values.push_back(static_cast<int>(m));
    }
  }

  std::vector<double> centers, durations, areas;
  const bool has_centers = get_double_array("pulse_centers", centers);
  const bool has_durations = get_double_array("pulse_durations", durations);
  const bool has_areas = get_double_array("pulse_areas", areas);
  if (has_centers != has_durations || has_centers != has_areas) {
    throw ConfigError("config keys 'pulse_centers/pulse_durations/pulse_areas' must appear together");
  }
  if (has_centers) {
    if (centers.size() != durations.size() || centers.size() != areas.size()) {
      throw ConfigError("config keys 'pulse_*': arrays must have equal length");
    }
    cfg.pulses.clear();
    for (std::size_t i = 0; i < centers.size(); ++i) {
      cfg.pulses.push_back({centers[i], durations[i], areas[i]});
    }
  }

  validate_config(cfg);
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  using detail::g17;
  std::ostringstream out;
  auto array = [](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i > 0) s += ", ";
      s += detail::g17(v[i]);
    }
    return s + "]";
  };
  std::vector<double> centers, durations, areas;
  for (const Pulse& p : cfg.pulses) {
    centers.push_back(p.center);
    durations.push_back(p.duration);
    areas.push_back(p.area);
  }
  std::vector<double> m_values(cfg.sweep_m_values.begin(), cfg.sweep_m_values.end());

  out << "experiment = \"" << cfg.experiment << "\"\n";
  out << "ensemble_count = " << cfg.ensemble_count << "\n";
  out << "range_mev = " << g17(cfg.range_mev) << "\n";
  out << "fwhm_mev = " << g17(cfg.fwhm_mev) << "\n";
  out << "pulse_centers = " << array(centers) << "\n";
  out << "pulse_durations = " << array(durations) << "\n";
  out << "pulse_areas = " << array(areas) << "\n";
  out << "t_start = " << g17(cfg.t_start) << "\n";
  out << "t_end = " << g17(cfg.t_end) << "\n";
  out << "dt = " << g17(cfg.dt) << "\n";
  out << "variant = \"" << cfg.variant << "\"\n";
  out << "detuning_count = " << cfg.detuning_count << "\n";
  out << "omega_grid = " << array(cfg.omega_grid) << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "n_samples = " << cfg.n_samples << "\n";
  out << "echo_window = [" << g17(cfg.echo_window_lo) << ", " << g17(cfg.echo_window_hi)
      << "]\n";
  out << "rtol = " << g17(cfg.rtol) << "\n";
  out << "atol = " << g17(cfg.atol) << "\n";
  out << "threads = " << cfg.threads << "\n";
  if (!cfg.sweep_ranges.empty()) {
    out << "sweep_ranges = " << array(cfg.sweep_ranges) << "\n";
  }
  if (!m_values.empty()) {
    out << "sweep_m_values = " << array(m_values) << "\n";
  }
  return out.str();
}

}  // namespace qecho
