#pragma once

// Output plumbing: fixed-format CSV tables and the run manifest. The
// manifest is written before any result file so partial runs are detectable.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "clusterdiag/version.hpp"

namespace clusterdiag {

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path.string());
    for (size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }

  void row(const std::vector<double>& values) {
    char buf[64];
    for (size_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.10f", values[i]);
      out_ << (i ? "," : "") << buf;
    }
    out_ << "\n";
    out_.flush();
  }

 private:
  std::ofstream out_;
};

inline void write_manifest(const std::filesystem::path& dir, const nlohmann::json& config_echo) {
  std::filesystem::create_directories(dir);
  nlohmann::json m;
  m["code_version"] = kVersion;
  m["config"] = config_echo;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("write_manifest: cannot open manifest in " + dir.string());
  out << m.dump(2) << "\n";
}

}  // namespace clusterdiag
