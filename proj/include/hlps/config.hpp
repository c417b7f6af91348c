#pragma once

// Run configuration. The native encoding is a flat sectioned key-value
// document:
//
//   # comment
//   [scenario]
//   n_users = 10
//   seed = 42
//   [noise]
//   rho_max = 50
//
// Keys that appear before any section header belong to [scenario]. A JSON
// object with the same sections is accepted as an alternative encoding.

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hlps/error.hpp"
#include "hlps/sim.hpp"
#include "hlps/text.hpp"

namespace hlps {

enum class OutputFormat { kJson, kCsv };

inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::kJson ? "json" : "csv"; }

struct OutputSpec {
  OutputFormat format = OutputFormat::kJson;
  std::string path;  // empty: standard output

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct RunConfig {
  ScenarioParams scenario;
  OutputSpec output;
  bool emit_trace = false;
  std::vector<GridAxis> vary;  // [vary] section, used by sweeps

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Configuration failure tied to a field and, for syntax errors, a line.
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, std::string field, int line, const std::string& message)
      : Error(code, describe(field, line, message)), field_(std::move(field)), line_(line) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  static std::string describe(const std::string& field, int line, const std::string& message) {
    std::string s;
    if (line > 0) s += "line " + std::to_string(line) + ": ";
    if (!field.empty()) s += field + ": ";
    return s + message;
  }

  std::string field_;
  int line_ = 0;
};

namespace detail {

struct RawValue {
  std::string text;
  int line = 0;
};

using RawConfig = std::map<std::string, RawValue>;  // "section.key" -> value

[[noreturn]] inline void syntax_error(int line, const std::string& message) {
  throw ConfigError(ErrorCode::kConfigSyntax, "", line, message);
}

[[noreturn]] inline void invalid(const std::string& field, const std::string& message, int line = 0) {
  throw ConfigError(ErrorCode::kConfigInvalid, field, line, message);
}

inline void put(RawConfig& raw, const std::string& key, std::string value, int line) {
  if (!raw.emplace(key, RawValue{std::move(value), line}).second) {
    invalid(key, "duplicate key", line);
  }
}

inline RawConfig read_key_value(std::string_view document) {
  RawConfig raw;
  std::string section = "scenario";
  int line_no = 0;
  for (auto line : split(document, '\n')) {
    ++line_no;
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) syntax_error(line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty() || section.find_first_of(" \t[]=") != std::string::npos) {
        syntax_error(line_no, "malformed section header");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) syntax_error(line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    if (key.empty() || key.find_first_of(" \t[]") != std::string_view::npos) {
      syntax_error(line_no, "malformed key");
    }
    put(raw, section + "." + std::string(key), std::string(trim(line.substr(eq + 1))), line_no);
  }
  return raw;
}

inline int line_of_offset(std::string_view document, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < document.size(); ++i) line += document[i] == '\n';
  return line;
}

inline std::string scalar_text(const std::string& key, const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string s;
    for (const auto& item : v) {
      if (!s.empty()) s += ", ";
      s += scalar_text(key, item);
    }
    return s;
  }
  invalid(key, "unsupported JSON value");
}

inline RawConfig read_json(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    syntax_error(line_of_offset(document, e.byte == 0 ? 0 : e.byte - 1), "invalid JSON");
  }
  if (!doc.is_object()) syntax_error(1, "top-level JSON value must be an object");
  RawConfig raw;
  for (const auto& [name, value] : doc.items()) {
    if (value.is_object()) {
      for (const auto& [key, v] : value.items()) {
        put(raw, name + "." + key, scalar_text(name + "." + key, v), 0);
      }
    } else {
      put(raw, "scenario." + name, scalar_text("scenario." + name, value), 0);
    }
  }
  return raw;
}

inline bool parse_bool(std::string_view s, bool& out) {
  if (s == "true" || s == "1" || s == "yes") return out = true, true;
  if (s == "false" || s == "0" || s == "no") return out = false, true;
  return false;
}

}  // namespace detail

/// Parses and validates a configuration document, filling defaults.
inline RunConfig parse_config(std::string_view document) {
  using namespace detail;
  const std::string_view body = trim(document);
  const RawConfig raw = (!body.empty() && body.front() == '{') ? read_json(body) : read_key_value(document);

  RunConfig cfg;
  auto& sc = cfg.scenario;

  using Setter = std::function<void(const std::string&, const RawValue&)>;
  auto real = [](double& target) -> Setter {
    return [&target](const std::string& key, const RawValue& v) {
      const auto d = parse_double(v.text);
      if (!d || !std::isfinite(*d)) invalid(key, "expected a number", v.line);
      target = *d;
    };
  };
  auto millijoules = [](double& target) -> Setter {
    return [&target](const std::string& key, const RawValue& v) {
      const auto d = parse_double(v.text);
      if (!d || !std::isfinite(*d)) invalid(key, "expected a number", v.line);
      target = *d / 1000.0;
    };
  };
  auto count = [](std::uint64_t& target) -> Setter {
    return [&target](const std::string& key, const RawValue& v) {
      const auto n = parse_uint(v.text);
      if (!n) invalid(key, "expected a non-negative integer", v.line);
      target = *n;
    };
  };

  const std::map<std::string, Setter> setters = {
      {"scenario.n_users", count(sc.n_users)},
      {"scenario.n_pois", count(sc.n_pois)},
      {"scenario.seed", count(sc.seed)},
      {"scenario.rounds", count(sc.rounds)},
      {"scenario.region_width", real(sc.region.width)},
      {"scenario.region_height", real(sc.region.height)},
      {"scenario.interest_radius", real(sc.interest_radius)},
      {"scenario.service",
       [&](const std::string& key, const RawValue& v) {
         if (v.text.empty()) invalid(key, "service must be nonempty", v.line);
         sc.service = ServiceTag(v.text);
       }},
      {"scenario.poi_categories",
       [&](const std::string& key, const RawValue& v) {
         sc.poi_categories.clear();
         for (auto token : split(v.text, ',')) {
           if (token.empty()) invalid(key, "empty category", v.line);
           sc.poi_categories.emplace_back(std::string(token));
         }
       }},
      {"scenario.privacy",
       [&](const std::string& key, const RawValue& v) {
         try {
           sc.privacy = parse_privacy_distribution(v.text);
         } catch (const Error& e) {
           invalid(key, e.what(), v.line);
         }
       }},
      {"noise.rho_min", real(sc.noise.rho_min)},
      {"noise.rho_max", real(sc.noise.rho_max)},
      {"provider.serving_radius", real(sc.serving_radius)},
      {"energy.e_tx_mj", millijoules(sc.energy.e_tx)},
      {"energy.e_rx_mj", millijoules(sc.energy.e_rx)},
      {"energy.e_tx_j", real(sc.energy.e_tx)},
      {"energy.e_rx_j", real(sc.energy.e_rx)},
      {"output.format",
       [&](const std::string& key, const RawValue& v) {
         if (v.text == "json") cfg.output.format = OutputFormat::kJson;
         else if (v.text == "csv") cfg.output.format = OutputFormat::kCsv;
         else invalid(key, "expected json or csv", v.line);
       }},
      {"output.path", [&](const std::string&, const RawValue& v) { cfg.output.path = v.text; }},
      {"output.trace",
       [&](const std::string& key, const RawValue& v) {
         if (!parse_bool(v.text, cfg.emit_trace)) invalid(key, "expected true or false", v.line);
       }},
  };

  if (raw.contains("energy.e_tx_mj") && raw.contains("energy.e_tx_j")) {
    invalid("energy.e_tx", "give either e_tx_mj or e_tx_j");
  }
  if (raw.contains("energy.e_rx_mj") && raw.contains("energy.e_rx_j")) {
    invalid("energy.e_rx", "give either e_rx_mj or e_rx_j");
  }
  for (const auto& [key, value] : raw) {
    if (key.starts_with("vary.")) {
      const std::string name = key.substr(5);
      GridAxis axis;
      try {
        axis.param = parse_sweep_param(name);
      } catch (const Error&) {
        invalid(key, "not a sweepable parameter", value.line);
      }
      for (auto v : split(value.text, ',')) {
        if (v.empty()) invalid(key, "empty value", value.line);
        // Validate each value against a scratch copy.
        try {
          ScenarioParams scratch = sc;
          apply_setting(scratch, axis.param, v);
        } catch (const Error& e) {
          invalid(key, e.what(), value.line);
        }
        axis.values.emplace_back(v);
      }
      cfg.vary.push_back(std::move(axis));
      continue;
    }
    const auto it = setters.find(key);
    if (it == setters.end()) invalid(key, "unknown key", value.line);
    it->second(key, value);
  }

  if (sc.n_users < 1) invalid("scenario.n_users", "must be at least 1");
  if (!(sc.region.width > 0.0)) invalid("scenario.region_width", "must be positive");
  if (!(sc.region.height > 0.0)) invalid("scenario.region_height", "must be positive");
  if (!(sc.interest_radius > 0.0)) invalid("scenario.interest_radius", "must be positive");
  if (!(sc.serving_radius > 0.0)) invalid("provider.serving_radius", "must be positive");
  if (!(sc.noise.rho_min >= 0.0) || !(sc.noise.rho_min <= sc.noise.rho_max)) {
    invalid("noise", "need 0 <= rho_min <= rho_max");
  }
  if (!(sc.energy.e_tx >= 0.0) || !(sc.energy.e_rx >= 0.0)) invalid("energy", "must be non-negative");
  return cfg;
}

namespace detail {

// Millijoules when that text reads back to the identical value, else joules.
inline std::string energy_line(const std::string& name, double joules) {
  const std::string mj = format_shortest(joules * 1000.0);
  if (*parse_double(mj) / 1000.0 == joules) return name + "_mj = " + mj + "\n";
  return name + "_j = " + format_shortest(joules) + "\n";
}

}  // namespace detail

/// Canonical key-value text; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& cfg) {
  const auto& sc = cfg.scenario;
  std::ostringstream out;
  out << "[scenario]\n"
      << "n_users = " << sc.n_users << "\n"
      << "n_pois = " << sc.n_pois << "\n"
      << "seed = " << sc.seed << "\n"
      << "rounds = " << sc.rounds << "\n"
      << "region_width = " << format_shortest(sc.region.width) << "\n"
      << "region_height = " << format_shortest(sc.region.height) << "\n"
      << "service = " << sc.service.str() << "\n";
  if (!sc.poi_categories.empty()) {
    out << "poi_categories = ";
    for (std::size_t i = 0; i < sc.poi_categories.size(); ++i) {
      out << (i ? ", " : "") << sc.poi_categories[i].str();
    }
    out << "\n";
  }
  out << "privacy = " << format_privacy_distribution(sc.privacy) << "\n"
      << "interest_radius = " << format_shortest(sc.interest_radius) << "\n"
      << "\n[noise]\n"
      << "rho_min = " << format_shortest(sc.noise.rho_min) << "\n"
      << "rho_max = " << format_shortest(sc.noise.rho_max) << "\n"
      << "\n[provider]\n"
      << "serving_radius = " << format_shortest(sc.serving_radius) << "\n"
      << "\n[energy]\n"
      << detail::energy_line("e_tx", sc.energy.e_tx) << detail::energy_line("e_rx", sc.energy.e_rx)
      << "\n[output]\n"
      << "format = " << to_string(cfg.output.format) << "\n";
  if (!cfg.output.path.empty()) out << "path = " << cfg.output.path << "\n";
  out << "trace = " << (cfg.emit_trace ? "true" : "false") << "\n";
  if (!cfg.vary.empty()) {
    out << "\n[vary]\n";
    for (const auto& axis : cfg.vary) {
      out << to_string(axis.param) << " = ";
      for (std::size_t i = 0; i < axis.values.size(); ++i) out << (i ? ", " : "") << axis.values[i];
      out << "\n";
    }
  }
  return out.str();
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

/// HLPS_SEED, when set, replaces the configured seed.
inline void apply_seed_override(RunConfig& cfg, const char* env_value) {
  if (env_value == nullptr) return;
  const auto seed = parse_uint(env_value);
  if (!seed) throw ConfigError(ErrorCode::kConfigInvalid, "HLPS_SEED", 0, "expected an unsigned integer");
  cfg.scenario.seed = *seed;
}

}  // namespace hlps
