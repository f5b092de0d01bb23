#pragma once
// Sweep configuration: JSON document plus command-line overrides.
//
// Precedence, lowest first: built-in defaults, the --config file, CLI flags.

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixfid/fits.hpp"
#include "mixfid/proxies.hpp"
#include "mixfid/states.hpp"

namespace mixfid::harness {

/// Raised for malformed or out-of-range configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline const std::set<std::string>& known_quantities() {
  static const std::set<std::string> q{"correlators", "susceptibility", "bounds", "geometry", "proxies"};
  return q;
}

inline const std::set<std::string>& known_models() {
  static const std::set<std::string> m{"src", "swssb", "ghz", "bond_dephased"};
  return m;
}

struct SweepConfig {
  std::string model = "bond_dephased";
  int local_dim = 2;
  std::vector<int> sites{4, 6, 8};
  std::vector<double> q{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::set<std::string> quantities{"susceptibility", "bounds", "proxies"};
  int proxy_depth = kDefaultProxyDepth;
  double numeric_p = 0.0;  // 0 disables the finite-difference column
  std::uint64_t seed = 1;
  int workers = 1;
  bool per_site = false;
  Boundary boundary = Boundary::open;
  Index dimension_cap = kDefaultDimensionCap;
  std::string out_dir = ".";
  std::vector<std::string> formats{"csv"};
  bool timing = false;  // fill the seconds column; off keeps output byte-stable

  bool has(const std::string& quantity) const { return quantities.count(quantity) != 0; }
  bool is_fixed_point() const { return model != "bond_dephased"; }

  SystemSpec system(int n_sites) const {
    SystemSpec s;
    s.n_sites = n_sites;
    s.local_dim = local_dim;
    s.boundary = boundary;
    s.dimension_cap = dimension_cap;
    return s;
  }

  void validate() const {
    if (!known_models().count(model)) throw ConfigError("unknown model '" + model + "'");
    if (local_dim < 2) throw ConfigError("local_dim must be >= 2");
    if (sites.empty()) throw ConfigError("sites list is empty");
    for (int n : sites) {
      if (n < 1) throw ConfigError("site counts must be positive");
      try {
        system(n).validate();
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
    }
    if (!is_fixed_point()) {
      if (q.empty()) throw ConfigError("q list is empty");
      const double q_max = static_cast<double>(local_dim - 1) / local_dim;
      for (double v : q) {
        if (!(v >= 0.0) || v > q_max + 1e-15) {
          throw ConfigError("q = " + std::to_string(v) + " outside [0, " + std::to_string(q_max) + "]");
        }
      }
    }
    for (const auto& name : quantities) {
      if (!known_quantities().count(name)) throw ConfigError("unknown quantity '" + name + "'");
    }
    if (proxy_depth < 1 || proxy_depth > kMaxProxyDepth) {
      throw ConfigError("proxy_depth must lie in [1, " + std::to_string(kMaxProxyDepth) + "]");
    }
    if (numeric_p < 0.0 || numeric_p > 1.0) throw ConfigError("numeric_p must lie in [0, 1]");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    for (const auto& f : formats) {
      if (f != "csv" && f != "json" && f != "svg") throw ConfigError("unknown format '" + f + "'");
    }
  }
};

inline Boundary parse_boundary(const std::string& s) {
  if (s == "open") return Boundary::open;
  if (s == "periodic") return Boundary::periodic;
  throw ConfigError("boundary must be 'open' or 'periodic', got '" + s + "'");
}

/// Overlays the keys present in `j` onto `cfg`. Unknown keys are errors.
inline void apply_json(SweepConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "model") cfg.model = v.get<std::string>();
      else if (key == "local_dim") cfg.local_dim = v.get<int>();
      else if (key == "sites") cfg.sites = v.get<std::vector<int>>();
      else if (key == "q") cfg.q = v.get<std::vector<double>>();
      else if (key == "quantities") {
        const auto list = v.get<std::vector<std::string>>();
        cfg.quantities = std::set<std::string>(list.begin(), list.end());
      }
      else if (key == "proxy_depth") cfg.proxy_depth = v.get<int>();
      else if (key == "numeric_p") cfg.numeric_p = v.get<double>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "workers") cfg.workers = v.get<int>();
      else if (key == "per_site") cfg.per_site = v.get<bool>();
      else if (key == "boundary") cfg.boundary = parse_boundary(v.get<std::string>());
      else if (key == "dimension_cap") cfg.dimension_cap = v.get<Index>();
      else if (key == "out") cfg.out_dir = v.get<std::string>();
      else if (key == "format") {
        cfg.formats = v.is_array() ? v.get<std::vector<std::string>>()
                                   : std::vector<std::string>{v.get<std::string>()};
      }
      else if (key == "timing") cfg.timing = v.get<bool>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
}

inline SweepConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
  SweepConfig cfg;
  apply_json(cfg, j);
  return cfg;
}

}  // namespace mixfid::harness
