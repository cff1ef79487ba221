// Acceptance suite: one PASS/FAIL line per criterion. Tolerances live here,
// not in the configs, so editing a config cannot loosen a criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>

#include "semitorus/bump.hpp"
#include "semitorus/config.hpp"
#include "semitorus/errors.hpp"
#include "semitorus/experiments.hpp"
#include "semitorus/exponents.hpp"
#include "semitorus/oscillatory.hpp"

using namespace semitorus;

namespace {

constexpr double kEgorovSlack = 0.2;
constexpr double kEgorovMinR2 = 0.9;
constexpr double kEgorovSeconds = 300.0;
constexpr double kUnitarityTol = 1e-10;
constexpr double kSpectrumTol = 1e-9;
constexpr double kResidualTol = 1e-8;
constexpr double kOrthogonalityTol = 1e-6;
constexpr double kDecayMin = 6.0;
constexpr double kStationaryTol = 0.05;  // relative to d/2
constexpr int kDraws = 2000;
constexpr double kSlopeTol = 0.3;

std::string config_path(const std::string& name) { return std::string(SEMITORUS_CONFIG_DIR) + "/" + name; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

int passed = 0, total = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  ++total;
  if (ok) ++passed;
  std::cout << (ok ? "PASS " : "FAIL ") << id << " " << name << ": " << detail << std::endl;
}

// Runs `body`; an exception is a failure with its message as the detail.
void criterion(int id, const std::string& name, const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(id, name, ok, detail);
}

const nlohmann::json& gate(const ExperimentReport& r, const std::string& name) { return r.gates.at(name); }

OscillatoryProblem bump_problem(int d, std::function<double(const std::array<double, 2>&)> phase) {
  auto amp = [d](const std::array<double, 2>& x) {
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) r2 += (x[i] - M_PI) * (x[i] - M_PI);
    return plateau_value(std::sqrt(r2) / 0.5);
  };
  return OscillatoryProblem{d, 2.0 * M_PI, amp, std::move(phase)};
}

}  // namespace

int main() {
  ExperimentConfig d1 = load_config(config_path("d1-small.json"));
  ExperimentConfig d2 = load_config(config_path("d2-small.json"));
  d1.draws = d2.draws = kDraws;
  d1.concentration.tolerance = d2.concentration.tolerance = kSlopeTol;

  criterion(1, "exact exponents", [](std::string& detail) {
    ExponentBudget b = gamma_prime(Rational(5, 7), Rational(2, 7), 2);
    GammaOptimum o3 = optimize_gamma_prime(3);
    detail = "d=2 Gamma'=" + to_string(b.gamma_prime) + " sup-norm exponent " + to_string(b.supnorm_exponent) +
             "; d=3 optimum " + to_string(o3.best.gamma_prime);
    return b.gamma_prime == Rational(1, 7) && b.supnorm_exponent == Rational(-5, 14) &&
           o3.best.gamma_prime == Rational(2, 9);
  });

  criterion(2, "Egorov rate", [&](std::string& detail) {
    EgorovSection e = d1.egorov;
    e.n = 256;
    e.alpha_offset = 0.1;
    e.tolerance = kEgorovSlack;
    e.min_r2 = kEgorovMinR2;
    if (e.h.size() != 4) throw StageError("egorov", "expected a 4-point dyadic ladder");
    bool ok = true;
    auto t0 = std::chrono::steady_clock::now();
    for (double beta : {0.1, 0.25, 0.4}) {
      EgorovLadder lad = egorov_ladder(e, d1.length, beta, d1.density, d1.effective_seeds().front(), d1.parallel);
      double need = 1.0 - 2.0 * beta - kEgorovSlack;
      bool b_ok = lad.fit.slope >= need && lad.fit.r2 >= kEgorovMinR2;
      ok = ok && b_ok;
      detail += "beta=" + fmt(beta) + " slope " + fmt(lad.fit.slope) + " (need " + fmt(need) + ") R2 " +
                fmt(lad.fit.r2) + (b_ok ? " ok; " : " short; ");
    }
    double secs = seconds_since(t0);
    detail += fmt(secs) + " s";
    return ok && secs < kEgorovSeconds;
  });

  criterion(3, "unitarity and conjugated spectrum", [&](std::string& detail) {
    ExperimentReport r = run_propagate(d1);
    double u = gate(r, "unitarity").at("max").get<double>();
    double s = gate(r, "spectral_invariance").at("max").get<double>();
    detail = "d=1 ladder: max |U*U - I| " + fmt(u) + ", max spectral gap " + fmt(s);
    return u <= kUnitarityTol && s <= kSpectrumTol;
  });

  ExperimentReport dec = run_decompose(d2);

  criterion(4, "d=2 band decomposition", [&](std::string& detail) {
    if (d2.d != 2 || d2.n != 64) throw StageError("decompose", "expected the d=2, N=64 config");
    double res = gate(dec, "reconstruction").at("max").get<double>();
    bool partition = gate(dec, "partition").at("passed").get<bool>();
    double c = gate(dec, "cardinality").at("C").get<double>();
    double eps = d2.decomposition.epsilon;
    bool capped = true;
    std::string kept;
    for (const auto& m : dec.measurements) {
      double h = m.at("h").get<double>();
      int k = m.at("kept_max").get<int>();
      capped = capped && k <= c * std::pow(h, -(d2.d - 1) - eps) * (1.0 + 1e-12);
      kept += " " + std::to_string(k);
    }
    detail = "residual " + fmt(res) + ", partition " + (partition ? "exhaustive" : "broken") + ", kept_max" + kept +
             " with C = " + fmt(c) + " for h^(-" + fmt(d2.d - 1 + eps) + ")";
    return res <= kResidualTol && partition && capped;
  });

  criterion(5, "near orthogonality for gamma > 1/2", [&](std::string& detail) {
    if (!(d2.decomposition.gamma > 0.5)) throw StageError("decompose", "config gamma must exceed 1/2");
    double ratio = gate(dec, "near_orthogonality").at("max_ratio").get<double>();
    detail = "gamma " + fmt(d2.decomposition.gamma) + ", max sum |g_i|^2 / |psi|^2 = " + fmt(ratio);
    return ratio <= 1.0 + kOrthogonalityTol;
  });

  criterion(6, "oscillatory decay", [](std::string& detail) {
    std::vector<double> six = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512};
    DecayFit lin = decay_fit(bump_problem(1, [](const std::array<double, 2>& x) { return x[0]; }), six);
    bool ok = lin.fit.slope >= kDecayMin;
    detail = "non-stationary slope " + fmt(lin.fit.slope);
    std::vector<double> four = {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
    for (int d : {1, 2}) {
      DecayFit st = decay_fit(bump_problem(d,
                                           [d](const std::array<double, 2>& x) {
                                             double s = 0.0;
                                             for (int i = 0; i < d; ++i) s += 0.5 * (x[i] - M_PI) * (x[i] - M_PI);
                                             return s;
                                           }),
                              four);
      ok = ok && std::abs(st.fit.slope - 0.5 * d) <= kStationaryTol * 0.5 * d;
      detail += "; stationary d=" + std::to_string(d) + " slope " + fmt(st.fit.slope);
    }
    return ok;
  });

  ExperimentReport conc1 = run_concentration(d1);
  ExperimentReport conc2 = run_concentration(d2);

  criterion(7, "independence of disjoint sheets", [&](std::string& detail) {
    bool ok = true;
    for (const ExperimentReport* r : {&conc1, &conc2}) {
      bool disjoint = gate(*r, "independence_disjoint").at("passed").get<bool>();
      double corr = gate(*r, "independence_corr").at("max").get<double>();
      double bound = 4.0 / std::sqrt(static_cast<double>(kDraws));
      ok = ok && disjoint && corr <= bound;
      detail += "d=" + std::to_string(r->config.at("domain").at("d").get<int>()) + " disjoint " +
                (disjoint ? "100%" : "<100%") + " max |corr| " + fmt(corr) + " (bound " + fmt(bound) + "); ";
    }
    return ok;
  });

  criterion(8, "concentration slope", [&](std::string& detail) {
    bool ok = true;
    for (const ExperimentReport* r : {&conc1, &conc2}) {
      const auto& g = gate(*r, "concentration_slope");
      double slope = g.at("slope").get<double>(), pred = g.at("predicted").get<double>();
      std::size_t points = 0;
      for (const auto& m : r->measurements)
        if (m.contains("concentration")) points = m.at("concentration").size();
      ok = ok && points == 4 && std::abs(slope - pred) <= kSlopeTol;
      detail += "d=" + std::to_string(r->config.at("domain").at("d").get<int>()) + " slope " + fmt(slope) +
                " predicted " + fmt(pred) + " over " + std::to_string(points) + " h; ";
    }
    return ok;
  });

  criterion(9, "determinism", [&](std::string& detail) {
    bool ok = true;
    for (const char* name : {"d1-small.json", "d2-small.json"}) {
      ExperimentConfig c = load_config(config_path(name));
      c.draws = kDraws;
      c.concentration.tolerance = kSlopeTol;
      int same = 0, runs = 0;
      for (const char* sub : {"validate", "decompose", "concentration", "exponents"}) {
        ExperimentConfig serial = c, threaded = c;
        serial.parallel = 1;
        threaded.parallel = 4;
        std::string a = report_hash(run_subcommand(sub, serial));
        std::string b = report_hash(run_subcommand(sub, threaded));
        std::string again = report_hash(run_subcommand(sub, threaded));
        ++runs;
        if (a == b && b == again) ++same;
      }
      ok = ok && same == runs;
      detail += std::string(name) + " " + std::to_string(same) + "/" + std::to_string(runs) + " identical; ";
    }
    return ok;
  });

  std::cout << "acceptance complete: " << passed << "/" << total << " passed" << std::endl;
  return passed == total ? 0 : 1;
}
