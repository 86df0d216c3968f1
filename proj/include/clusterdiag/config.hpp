#pragma once

// Experiment configuration: a plain-text key/value format with [section]
// headers, '#' comments and comma-separated lists. A config plus the code
// version determines oracle outputs bit-for-bit and MC outputs statistically.
//
//   [run]
//   kind = figure3          # oracle-suite | figure3 | critical-scan |
//                           # diagnostics-scan | symmetry-table
//   seed = 12345
//   workers = 1
//   [lattice]
//   n = 20
//   boundary = periodic
//   [channel]
//   px = 0.02, 0.06, 0.10, 0.20, 0.25, 0.30
//   pz = 0.0
//   [mc]
//   thermalization = 20000
//   sweeps = 100000
//   blocks = 32
//   lambda_points = 12
//   [figure3]
//   loop_sizes = 6, 10
//   [scan]
//   replica = 2
//   sizes = 16, 24, 32
//   [output]
//   dir = out

#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "clusterdiag/lattice.hpp"
#include "clusterdiag/mc.hpp"

namespace clusterdiag {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}
}  // namespace detail

struct ExperimentConfig {
  std::string kind;
  uint64_t seed = 1;
  int workers = 1;

  int lattice_n = 4;
  Boundary boundary = Boundary::periodic;

  std::vector<double> px_values{0.0};
  double pz = 0.0;

  McSchedule schedule;

  std::vector<int> loop_sizes{6, 10};
  int replica = 2;
  std::vector<int> sizes{16, 24, 32};
  bool decoupled = false;
  int cut_row1 = -1, cut_row2 = -1;

  std::string out_dir = "out";

  std::map<std::string, std::map<std::string, std::string>> raw;

  static ExperimentConfig parse(const std::string& text) {
    ExperimentConfig cfg;
    std::string section = "run";
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
        section = detail::trim(line.substr(1, line.size() - 2));
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      cfg.raw[section][detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
    }
    cfg.load();
    cfg.validate();
    return cfg;
  }

  bool has(const std::string& sec, const std::string& key) const {
    auto s = raw.find(sec);
    return s != raw.end() && s->second.count(key);
  }
  std::string get(const std::string& sec, const std::string& key, const std::string& dflt) const {
    auto s = raw.find(sec);
    if (s == raw.end()) return dflt;
    auto k = s->second.find(key);
    return k == s->second.end() ? dflt : k->second;
  }
  static std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        out.push_back(detail::trim(cur));
        cur.clear();
      } else
        cur += c;
    }
    cur = detail::trim(cur);
    if (!cur.empty()) out.push_back(cur);
    return out;
  }

  void load() {
    kind = get("run", "kind", "oracle-suite");
    seed = std::stoull(get("run", "seed", "1"));
    workers = std::stoi(get("run", "workers", "1"));
    lattice_n = std::stoi(get("lattice", "n", "4"));
    std::string b = get("lattice", "boundary", "periodic");
    if (b == "periodic")
      boundary = Boundary::periodic;
    else if (b == "open")
      boundary = Boundary::open;
    else
      throw ConfigError("lattice.boundary must be periodic or open");
    if (has("channel", "px")) {
      px_values.clear();
      for (const auto& t : split_list(get("channel", "px", "")))
        px_values.push_back(std::stod(t));
    }
    pz = std::stod(get("channel", "pz", "0"));
    schedule.thermalization = std::stoull(get("mc", "thermalization", "20000"));
    schedule.sweeps = std::stoull(get("mc", "sweeps", "100000"));
    schedule.blocks = std::stoi(get("mc", "blocks", "32"));
    schedule.lambda_points = std::stoi(get("mc", "lambda_points", "12"));
    schedule.seed = seed;
    if (has("figure3", "loop_sizes")) {
      loop_sizes.clear();
      for (const auto& t : split_list(get("figure3", "loop_sizes", "")))
        loop_sizes.push_back(std::stoi(t));
    }
    replica = std::stoi(get("scan", "replica", "2"));
    if (has("scan", "sizes")) {
      sizes.clear();
      for (const auto& t : split_list(get("scan", "sizes", ""))) sizes.push_back(std::stoi(t));
    }
    decoupled = get("scan", "family", "ising") == "decoupled";
    cut_row1 = std::stoi(get("scan", "cut_row1", "-1"));
    cut_row2 = std::stoi(get("scan", "cut_row2", "-1"));
    out_dir = get("output", "dir", "out");
  }

  void validate() const {
    static const char* kinds[] = {"oracle-suite", "figure3", "critical-scan", "diagnostics-scan",
                                  "symmetry-table"};
    bool ok = false;
    for (const char* k : kinds) ok = ok || kind == k;
    if (!ok) throw ConfigError("run.kind '" + kind + "' is not a known experiment kind");
    if (lattice_n < 2) throw ConfigError("lattice.n must be >= 2");
    if (px_values.empty()) throw ConfigError("channel.px grid must not be empty");
    for (double p : px_values)
      if (!(p >= 0.0 && p <= 0.5)) throw ConfigError("channel.px values must lie in [0, 1/2]");
    if (!(pz >= 0.0 && pz <= 0.5)) throw ConfigError("channel.pz must lie in [0, 1/2]");
    if (workers < 1) throw ConfigError("run.workers must be >= 1");
    if (schedule.blocks < 32) throw ConfigError("mc.blocks must be >= 32 for jackknife analysis");
    if (kind == "figure3")
      for (int l : loop_sizes)
        if (l < 1 || l >= lattice_n) throw ConfigError("figure3.loop_sizes must fit in the lattice");
    if (kind == "critical-scan" && sizes.size() < 3)
      throw ConfigError("critical-scan needs at least 3 sizes");
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["kind"] = kind;
    j["seed"] = seed;
    j["workers"] = workers;
    j["lattice"] = {{"n", lattice_n},
                    {"boundary", boundary == Boundary::periodic ? "periodic" : "open"}};
    j["channel"] = {{"px", px_values}, {"pz", pz}};
    j["mc"] = {{"thermalization", schedule.thermalization},
               {"sweeps", schedule.sweeps},
               {"blocks", schedule.blocks},
               {"lambda_points", schedule.lambda_points}};
    j["figure3"] = {{"loop_sizes", loop_sizes}};
    j["scan"] = {{"replica", replica}, {"sizes", sizes}, {"family", decoupled ? "decoupled" : "ising"}};
    j["output"] = {{"dir", out_dir}};
    return j;
  }
};

}  // namespace clusterdiag
