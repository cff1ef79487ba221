#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace semitorus {

inline constexpr const char* kReportSchema = "semitorus-report/1";

struct ExperimentReport {
  std::string subcommand;
  nlohmann::json config;               // fully resolved
  std::vector<std::uint64_t> seeds;
  nlohmann::json measurements = nlohmann::json::array();  // per (h, seed), sorted
  nlohmann::json fits = nlohmann::json::object();
  nlohmann::json gates = nlohmann::json::object();        // name -> {passed, ...}
  std::string timestamp;               // excluded from hashing

  void gate(const std::string& name, bool passed, nlohmann::json detail = nlohmann::json::object());
  bool passed() const;
};

// Log-log least squares with R^2 and a 1000-resample percentile bootstrap CI.
nlohmann::json fit_entry(const std::vector<double>& h, const std::vector<double>& y, std::uint64_t seed);

nlohmann::json to_json(const ExperimentReport& r, bool with_timestamp = true);
// Canonical text without the timestamp; byte-identical for identical runs.
std::string canonical_text(const ExperimentReport& r);
// Hex SHA-256 of canonical_text.
std::string report_hash(const ExperimentReport& r);

// Writes <dir>/<subcommand>.json and <dir>/<subcommand>_fits.csv; returns the JSON path.
std::filesystem::path write_report(const std::filesystem::path& dir, const ExperimentReport& r);

std::string utc_timestamp();

}  // namespace semitorus
