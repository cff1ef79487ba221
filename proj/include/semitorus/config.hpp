#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "semitorus/grid.hpp"
#include "semitorus/randsymbol.hpp"

namespace semitorus {

inline constexpr const char* kConfigSchema = "semitorus-config/1";

struct EgorovSection {
  int n = 256;
  std::vector<double> h;
  std::vector<double> betas{0.1, 0.25, 0.4};
  double alpha_offset = 0.1;  // delta = h^(2 beta + alpha_offset)
  double mu1 = 0.36, mu2 = 0.64;
  double t = 0.25;
  int seeds_per_h = 2;
  double symbol_xi = 0.7;       // Gaussian test symbol centre (pi, symbol_xi)
  double width_factor = 0.6;    // width = width_factor * h^beta
  double tolerance = 0.2;       // slope >= 1 - 2 beta - tolerance
  double min_r2 = 0.9;
};

struct DecompositionSection {
  double gamma = 0.6;
  double epsilon = 0.5;
  double rho = 0.75;
  double plateau = M_PI / 6.0;
  int cutoff_order = 1;
  std::string phases = "random";  // or "aligned"
};

struct ConcentrationSection {
  int sheets = 3;
  double t = 1.0;
  double xi0 = 0.7;
  double patch = 1.2;    // half width of the sheet patches
  double epsilon = 0.05;
  double tolerance = 0.3;
  std::vector<double> h;  // defaults to the main ladder
};

struct SupnormSection {
  std::string gradient_bound = "second_order";
  double tol = 1e-2;
  int max_oversampling = 16;
  std::string propagator = "auto";  // dense, chebyshev or auto
};

struct ExperimentConfig {
  // domain
  int d = 1;
  int n = 256;
  double length = 2.0 * M_PI;
  // semiclassical ladder
  std::vector<double> h;
  // model
  std::string metric = "flat";
  double warp = 0.0;
  double mu1 = 0.36, mu2 = 0.64;
  double t = 1.0;
  // perturbation
  double alpha = 0.7;
  double beta = 0.1;
  double eps0 = 0.05;
  Density density = Density::RaisedCosine;
  std::vector<std::uint64_t> seeds{1};
  // decomposition, run
  DecompositionSection decomposition;
  int draws = 2000;
  int parallel = 1;
  std::string out = "out";
  std::uint64_t seed_offset = 0;
  int quantize_n = 0;  // 0: N for d = 1, min(N, 32) for d = 2
  EgorovSection egorov;
  ConcentrationSection concentration;
  SupnormSection supnorm;

  GridSpec grid(double h_value) const { return GridSpec{d, n, length, h_value}; }
  double delta(double h_value) const;
  std::vector<std::uint64_t> effective_seeds() const;
};

// Strict parse: unknown keys and type mismatches raise ConfigError naming the
// field; JSON syntax errors report line and column. Comments are allowed.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Feasibility and resolution checks only; never allocates a grid.
void validate_config(const ExperimentConfig& c);

nlohmann::json to_json(const ExperimentConfig& c);

}  // namespace semitorus
