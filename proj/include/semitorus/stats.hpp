#pragma once

#include <Eigen/Dense>
#include <vector>

#include "semitorus/exponents.hpp"
#include "semitorus/fit.hpp"
#include "semitorus/lagdecomp.hpp"
#include "semitorus/randsymbol.hpp"

namespace semitorus {

// E[exp(i u omega)] for the built-in densities.
double characteristic_function(Density d, double u);

// Per-point data that makes a draw of Z cheap: in the zeroth mode the phase is
// affine in omega, phi_j = phi_{j,t,0} - delta sum_k omega_k I_{j,k}.
struct ZModel {
  double h = 0.1;
  double delta = 0.0;
  Vec2 x{};
  std::vector<cplx> base;                   // s_j b_{j,0}(t, x) exp(i phi_{j,t,0}(x) / h)
  std::vector<std::vector<int>> deps;       // touched covering indices per sheet
  std::vector<std::vector<double>> weights; // I_{j,k} aligned with deps
  double g_norm = 0.0;                      // ||g_h||_2 of the initial superposition
  double weight_l1 = 0.0;                   // sum |s_j|
};

// `spec` carries the covering and delta; its omega draw is ignored.
ZModel build_z_model(const Superposition& g, const HamiltonianSpec& spec, double t, const Vec2& x, double g_norm,
                     const WkbOptions& opt);

struct ZSample {
  Vec2 x{};
  std::vector<cplx> terms;  // Z_j
  cplx total{};             // Z
  std::vector<std::vector<int>> dependency_sets;
};

ZSample draw_z(const ZModel& m, std::uint64_t seed, Density density);
// Exact E[Z] from the characteristic function (independent omega_k).
cplx exact_mean(const ZModel& m, Density density);

struct IndependenceReport {
  double disjoint_fraction = 0.0;
  int pairs = 0;
  Eigen::MatrixXd corr_re;  // Pearson correlation of Re Z_j over draws
  Eigen::MatrixXd corr_im;
  double max_disjoint_corr = 0.0;  // over pairs with disjoint dependency sets
  double bound = 0.0;              // 4 / sqrt(M)
};

IndependenceReport independence_check(const std::vector<ZSample>& samples);

struct ConcentrationPoint {
  double h = 0.0;
  double mean_abs = 0.0;        // |E^[Z]|
  double exact_mean_abs = 0.0;  // |E[Z]| from characteristic functions
  double g_norm = 0.0;
  double weight_l1 = 0.0;
  double mean_bound = 0.0;      // ||g||_2 |J|^{1/2}, the Cauchy-Schwarz bound on sum |s_j|
  double q50 = 0.0, q90 = 0.0, q99 = 0.0, qmax = 0.0;
  double tail_fraction = 0.0;
  double tail_threshold = 0.0;
  double unitarity_constant = 0.0;  // max over draws of sum |Z_j|^2 / ||g||^2
  int draws = 0;
};

struct ConcentrationReport {
  std::vector<ConcentrationPoint> points;
  LineFit fit;
  LineFit exact_fit;
  Interval slope_ci;
  double predicted_slope = 0.0;  // Gamma - (d - 1)(beta - epsilon)/2
  bool slope_ok = false;
  bool tail_ok = false;
};

struct ConcentrationParams {
  int d = 1;
  double beta = 0.25;
  double epsilon = 0.05;
  double gamma = 0.0;  // Gamma from the exponent budget
  int draws = 2000;
  std::uint64_t seed = 1;
  Density density = Density::RaisedCosine;
  int workers = 1;
  double tolerance = 0.3;
};

// One model per h. Throws StageError("draws") when draws < 1000.
ConcentrationReport concentration_check(const std::vector<ZModel>& models, const ConcentrationParams& p);

}  // namespace semitorus
