#include "semitorus/report.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "semitorus/errors.hpp"
#include "semitorus/fit.hpp"

namespace semitorus {

void ExperimentReport::gate(const std::string& name, bool ok, nlohmann::json detail) {
  detail["passed"] = ok;
  gates[name] = std::move(detail);
}

bool ExperimentReport::passed() const {
  for (const auto& [name, g] : gates.items())
    if (!g.value("passed", false)) return false;
  return true;
}

nlohmann::json fit_entry(const std::vector<double>& h, const std::vector<double>& y, std::uint64_t seed) {
  LineFit f = fit_loglog(h, y);
  Interval ci = bootstrap_slope(h, y, 1000, seed);
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2},
          {"ci_lo", ci.lo},   {"ci_hi", ci.hi},           {"resamples", 1000}};
}

nlohmann::json to_json(const ExperimentReport& r, bool with_timestamp) {
  nlohmann::json j = {{"schema", kReportSchema},
                      {"subcommand", r.subcommand},
                      {"config", r.config},
                      {"seeds", r.seeds},
                      {"measurements", r.measurements},
                      {"fits", r.fits},
                      {"gates", r.gates},
                      {"passed", r.passed()}};
  if (with_timestamp) j["timestamp"] = r.timestamp;
  return j;
}

std::string canonical_text(const ExperimentReport& r) { return to_json(r, false).dump(2) + "\n"; }

std::string report_hash(const ExperimentReport& r) {
  std::string text = canonical_text(r);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw StageError("report", "SHA-256 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

namespace {

// Nested fit objects become dotted row names.
void write_fit_rows(std::ostream& csv, const std::string& prefix, const nlohmann::json& fits) {
  for (const auto& [name, f] : fits.items()) {
    if (!f.is_object()) continue;
    std::string row = prefix.empty() ? name : prefix + "." + name;
    if (!f.contains("slope")) {
      write_fit_rows(csv, row, f);
      continue;
    }
    csv << row << "," << f.value("slope", 0.0) << "," << f.value("intercept", 0.0) << "," << f.value("r2", 0.0)
        << "," << f.value("ci_lo", 0.0) << "," << f.value("ci_hi", 0.0) << "\n";
  }
}

}  // namespace

std::filesystem::path write_report(const std::filesystem::path& dir, const ExperimentReport& r) {
  std::filesystem::create_directories(dir);
  auto path = dir / (r.subcommand + ".json");
  {
    std::ofstream out(path);
    if (!out) throw StageError("report", "cannot write " + path.string());
    out << to_json(r, true).dump(2) << "\n";
  }
  std::ofstream csv(dir / (r.subcommand + "_fits.csv"));
  csv << "name,slope,intercept,r2,ci_lo,ci_hi\n";
  csv << std::setprecision(17);
  write_fit_rows(csv, "", r.fits);
  return path;
}

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace semitorus
