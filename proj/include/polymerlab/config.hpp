#pragma once

// Experiment configs and output plumbing for the CLI: a flat key = value
// manifest format, deterministic JSON/CSV emission, atomic writes staged
// through *.partial, and the hash guarding the cached F_GUE table.
// Determinism is a contract here: equal configs must produce
// byte-identical files, so every number is printed through the same
// shortest-round-trip path and map keys stay sorted.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "polymerlab/fredholm.hpp"
#include "polymerlab/polymer.hpp"
#include "polymerlab/stats.hpp"
#include "polymerlab/weights.hpp"

namespace polymerlab {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

inline std::string version_string() {
#ifdef POLYMERLAB_VERSION
  return POLYMERLAB_VERSION;
#else
  return "0.0.0+unversioned";
#endif
}

// Flat manifest: one `key = value` per line, # comments, later CLI flag
// overrides win. Reads are tracked so finish() can reject stray keys
// (typos in a manifest should fail loudly, not silently default).
struct ExperimentConfig {
  std::map<std::string, std::string> kv;

  static ExperimentConfig parse_text(const std::string& text) {
    ExperimentConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": expected key = value");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": empty key");
      }
      if (!c.kv.emplace(key, val).second) {
        throw ConfigError("config: duplicate key '" + key + "'");
      }
    }
    return c;
  }

  static ExperimentConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path);
    std::ostringstream body;
    body << in.rdbuf();
    return parse_text(body.str());
  }

  void set(const std::string& key, const std::string& val) {
    kv[key] = val;
  }

  bool has(const std::string& key) const { return kv.count(key) != 0; }

  std::string get_string(const std::string& key,
                         const std::string& fallback) const {
    used_.insert(key);
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  }

  std::string require_string(const std::string& key) const {
    used_.insert(key);
    const auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("config: missing key '" + key + "'");
    return it->second;
  }

  long long get_int(const std::string& key, long long fallback) const {
    return has(key) ? parse_int(key, require_string(key))
                    : (used_.insert(key), fallback);
  }

  long long require_int(const std::string& key) const {
    return parse_int(key, require_string(key));
  }

  double get_double(const std::string& key, double fallback) const {
    return has(key) ? parse_double(key, require_string(key))
                    : (used_.insert(key), fallback);
  }

  double require_double(const std::string& key) const {
    return parse_double(key, require_string(key));
  }

  uint64_t get_seed(const std::string& key, uint64_t fallback) const {
    return uint64_t(get_int(key, int64_t(fallback)));
  }

  // comma-separated doubles, e.g. t_grid = -3,-2,-1,0,1,2
  std::vector<double> get_double_list(const std::string& key,
                                      const std::string& fallback) const {
    const std::string s = get_string(key, fallback);
    std::vector<double> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
      out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("config: empty list in '" + key + "'");
    return out;
  }

  std::vector<long long> get_int_list(const std::string& key,
                                      const std::string& fallback) const {
    std::vector<long long> out;
    for (double x : get_double_list(key, fallback)) {
      out.push_back(parse_int(key, format_double(x)));
    }
    return out;
  }

  // call after a command consumed its keys; leftover keys are typos
  void finish() const {
    for (const auto& [key, val] : kv) {
      if (!used_.count(key)) {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    }
  }

  json to_json() const {
    json j = json::object();
    for (const auto& [key, val] : kv) j[key] = val;
    return j;
  }

  static std::string format_double(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
  }

 private:
  mutable std::set<std::string> used_;

  static long long parse_int(const std::string& key, const std::string& s) {
    try {
      size_t pos = 0;
      const long long v = std::stoll(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config: key '" + key + "' wants an integer, got '" +
                        s + "'");
    }
  }

  static double parse_double(const std::string& key, const std::string& s) {
    try {
      size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config: key '" + key + "' wants a number, got '" +
                        s + "'");
    }
  }
};

// stage to .partial, rename into place only once fully written
inline void write_file_atomic(const std::string& path,
                              const std::string& content) {
  const std::string partial = path + ".partial";
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + partial);
    out << content;
    if (!out.flush()) throw std::runtime_error("short write to " + partial);
  }
  std::filesystem::rename(partial, path);
}

// FNV-1a, for change detection on the cached F_GUE table
inline uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
  return buf;
}

// ---- JSON views of the library's report types ----

inline void to_json(json& j, const FredholmResult& r) {
  j = json{{"value", r.value},
           {"det", {r.det.real(), r.det.imag()}},
           {"det_half", {r.det_half.real(), r.det_half.imag()}},
           {"gap", r.gap},
           {"m", r.m},
           {"truncation", r.truncation},
           {"note", r.note}};
}

inline void to_json(json& j, const DiagnosticsEntry& e) {
  j = json{{"check", e.check},
           {"location", e.location},
           {"value", e.value},
           {"bound", e.bound},
           {"ok", e.ok}};
}

inline void to_json(json& j, const DiagnosticsReport& r) {
  j = json{{"theta", r.theta},
           {"n", r.n},
           {"delta", r.delta},
           {"entries", r.entries},
           {"all_ok", r.all_ok}};
}

inline void to_json(json& j, const MatchReport& r) {
  j = json{{"order", r.order},
           {"monte_carlo", r.monte_carlo},
           {"mc_samples", r.mc_samples},
           {"beta_grid", r.beta_grid},
           {"gaps", r.gaps},
           {"gap_ses", r.gap_ses},
           {"kth_moments", r.kth_moments},
           {"fitted_c", r.fitted_c},
           {"pass", r.pass}};
}

inline void to_json(json& j, const KsReport& r) {
  j = json{{"samples", r.samples},
           {"statistic", r.statistic},
           {"p_value", r.p_value},
           {"reference", r.reference},
           {"n", r.n}};
}

inline void to_json(json& j, const GapEstimate& g) {
  j = json{{"gap", g.gap}, {"se", g.se}, {"replicas", g.replicas}};
}

inline void to_json(json& j, const LaplaceEstimate& e) {
  j = json{{"mean", e.mean}, {"se", e.se}, {"replicas", e.replicas}};
}

inline void to_json(json& j, const DisplacementSummary& s) {
  j = json{{"mean", s.mean},
           {"median", s.median},
           {"q90", s.q90},
           {"count", s.count}};
}

// CSV of samples (one h per line, full precision) plus the JSON sidecar
// carrying provenance
inline std::string samples_csv(const EmpiricalDistribution& d) {
  std::ostringstream out;
  out.precision(17);
  for (double h : d.samples) out << h << "\n";
  return out.str();
}

inline json samples_sidecar(const EmpiricalDistribution& d) {
  return json{{"n", d.n},
              {"theta", d.theta},
              {"family", d.family},
              {"replicas", d.replicas},
              {"base_seed", d.base_seed}};
}

}  // namespace polymerlab
