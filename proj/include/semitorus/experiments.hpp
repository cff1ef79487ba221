#pragma once

#include "semitorus/config.hpp"
#include "semitorus/exponents.hpp"
#include "semitorus/fit.hpp"
#include "semitorus/lagdecomp.hpp"
#include "semitorus/report.hpp"
#include "semitorus/stats.hpp"

namespace semitorus {

// Eigenfunction of -h^2 Delta built from the lattice points of one circle
// |n|^2 = R^2 inside the shell; R^2 maximises the number of admitted points.
// With plateau > 0 (d = 2) only points within `plateau` of a lattice axis are used.
struct ShellMode {
  WaveFunction psi;
  int radius_sq = 0;
  std::vector<Lattice> points;
  double energy = 0.0;  // |h sigma n|^2
};

ShellMode shell_eigenmode(const GridSpec& g, double mu1, double mu2, const std::string& phases, std::uint64_t seed,
                          double plateau = 0.0);

struct EgorovLadder {
  double beta = 0.0;
  std::vector<double> h;
  std::vector<double> residual;               // mean over seeds
  std::vector<std::vector<double>> per_seed;
  LineFit fit;
  double required_slope = 0.0;
  bool passed = false;
};

EgorovLadder egorov_ladder(const EgorovSection& e, double length, double beta, Density density, std::uint64_t seed0,
                           int workers = 1);

struct SectorResult {
  int sector = 0;
  int kept = 0;
  int band_size = 0;
  int classes = 0;
  int n_h = 0;
  double pre_residual = 0.0;
  double residual = 0.0;
  double parseval_gap = 0.0;
  double min_separation = 0.0;
  bool partition_ok = false;
};

struct DecomposeResult {
  double h = 0.0;
  int radius_sq = 0;
  std::vector<SectorResult> sectors;
  std::vector<ClassSuperposition> parts;
  OrthogonalityReport orthogonality;
  double max_residual = 0.0;  // relative to ||psi||_2
  int kept_total = 0;
  int kept_max = 0;
  double cardinality_constant = 0.0;  // kept_max * h^(d - 1 + epsilon)
  bool partition_ok = true;
};

DecomposeResult decompose_mode(const ShellMode& mode, const DecompositionSection& p);

// J sheets with directions spread on the circle |xi| = xi0 (d = 2) or +-xi0
// (d = 1), each with a plateau amplitude on a patch centred at the foot of x.
struct SheetFamily {
  Superposition g;
  Vec2 x{};
  double g_norm = 0.0;
  double min_separation = 0.0;
};

SheetFamily make_sheet_family(int d, double length, double h, int sheets, double xi0, double t, double patch,
                              const Vec2& x);

ExperimentReport run_validate(const ExperimentConfig& c);
ExperimentReport run_quantize_check(const ExperimentConfig& c);
ExperimentReport run_egorov(const ExperimentConfig& c);
ExperimentReport run_decompose(const ExperimentConfig& c);
ExperimentReport run_propagate(const ExperimentConfig& c);
ExperimentReport run_concentration(const ExperimentConfig& c);
ExperimentReport run_supnorm_sweep(const ExperimentConfig& c);
ExperimentReport run_exponents(int d, const Rational& alpha, const Rational& beta);

// Dispatch by subcommand name.
ExperimentReport run_subcommand(const std::string& name, const ExperimentConfig& c);

}  // namespace semitorus
