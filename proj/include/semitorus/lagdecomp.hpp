#pragma once

#include <map>
#include <set>
#include <vector>

#include "semitorus/grid.hpp"
#include "semitorus/hamflow.hpp"
#include "semitorus/lagrangian.hpp"

namespace semitorus {

using Lattice = std::array<int, 2>;

// Lattice rotation by sector * 90 degrees (d = 2) or a sign flip (d = 1),
// taking the sector's radial direction to the first axis.
Lattice rotate_to_sector(int d, int sector, const Lattice& n);
Lattice rotate_from_sector(int d, int sector, const Lattice& n);
int sector_count(int d);

// Smooth angular partition of unity over the sectors. Weights are exactly 1
// within `plateau` radians of the sector axis.
double sector_weight(int d, int sector, const Lattice& n, double plateau);

struct BandWindow {
  int sector = 0;
  double mu_h = 1.0;       // target xi_1 in the rotated frame
  double epsilon = 0.1;
  double rho = 1.0;        // transverse half-width of the band, in xi units
  double plateau = M_PI / 6.0;
  Vec2 cutoff_center{};    // spatial cutoff (1 + cos(x - c))^p / 2^p per axis
  int cutoff_order = 1;
  double max_pre_residual = 1e-6;
};

struct BandDecomposition {
  GridSpec grid;
  BandWindow window;
  std::vector<Lattice> frequencies;  // kept band, original frame
  std::vector<cplx> coefficients;    // Fourier-series coefficients of the cutoff state
  WaveFunction cutoff;               // chi * Op(chi_1) psi
  int band_size = 0;                 // lattice points admitted by the band rule
  double cardinality_constant = 0.0; // band_size * h^(d - 1 + epsilon)
  double pre_residual = 0.0;         // relative out-of-band mass of the cutoff state
  double residual_norm = 0.0;        // ||cutoff - sum a_n e_n||_2
  double parseval_gap = 0.0;         // | ||a||_l2 - L^{-d/2} ||cutoff||_2 |
};

bool in_band(const GridSpec& grid, const BandWindow& w, const Lattice& n);

// Throws StageError("normal-form") when the pre-residual exceeds the window's
// bound and ResolutionError when the band is not inside the Fourier window.
BandDecomposition band_decompose(const WaveFunction& psi, const BandWindow& w);

struct ClassMap {
  int n_h = 1;
  // (n_1, m) in the rotated frame -> indices into the decomposition.
  std::map<Lattice, std::vector<int>> classes;
  std::set<int> kept_n1;
};

// floor(h^(gamma - 1 - epsilon)), robust to rounding at integer values.
int class_modulus(double h, double gamma, double epsilon);
ClassMap group_classes(const BandDecomposition& bd, double gamma, double epsilon);
// Every kept index in exactly one class and nothing else: exhaustive scan.
bool verify_partition(const BandDecomposition& bd, const ClassMap& cm);

struct ClassSuperposition {
  Lattice key{};
  Superposition superposition;
  double separation = 0.0;  // min |d phi_j - d phi_j'| over pairs, +inf for singletons
  double threshold = 0.0;   // h^gamma
  double norm_sq = 0.0;     // ||g||_2^2 by quadrature on the grid
};

// Linear-phase sheets phi = h sigma n . x with weights a_n. Throws
// StageError("separation") if a class is not h^gamma-separated.
std::vector<ClassSuperposition> classes_to_superpositions(const BandDecomposition& bd, const ClassMap& cm,
                                                          double gamma);

WaveFunction evaluate(const GridSpec& grid, const Superposition& s);

struct OrthogonalityReport {
  double ratio = 0.0;        // sum ||g_i||^2 / ||psi||^2
  double max_overlap = 0.0;  // max |<g_i, g_j>| / (||g_i|| ||g_j||), i != j
};
OrthogonalityReport near_orthogonality(const std::vector<ClassSuperposition>& parts, const WaveFunction& psi);

// Transported data at one target point x.
struct WkbPoint {
  Vec2 x{};
  Vec2 foot{};          // y with pi_x Phi^t(y, d phi(y)) = x
  double phase = 0.0;   // phi_t(x)
  Vec2 grad{};
  Mat2 hess{};
  cplx amplitude{};     // b_0
  cplx first_order{};   // b_1 alone
  double jacobian = 1.0;  // det d x_t / d y
  bool inside = true;     // foot lies on the initial patch
};

struct WkbOptions {
  int order = 0;         // 0 or 1
  double step = 0.01;    // flow step (capped by the Hamiltonian's max step)
  double tol = 1e-12;
  int max_newton = 40;
  double h = 0.0;        // weight of b_1 in propagated_sheet amplitudes
};

// Characteristics solve for phi_t and b_0 = a(y) |det dy/dx|^{1/2}.
// Throws StageError("caustic") on a Jacobian sign change along the ray and
// StageError("wrap-around") when the patch is not below L/4.
WkbPoint wkb_point(const LagrangianSheet& sheet, const HamiltonianSpec& spec, double t, const Vec2& x,
                   const WkbOptions& opt, const Vec2* guess = nullptr);
std::vector<WkbPoint> wkb_propagate(const LagrangianSheet& sheet, const HamiltonianSpec& spec, double t,
                                    const std::vector<Vec2>& xs, const WkbOptions& opt);
// Sheet over the image patch whose `at` solves characteristics on demand.
LagrangianSheet propagated_sheet(const LagrangianSheet& sheet, const HamiltonianSpec& spec, double t,
                                 const WkbOptions& opt);

enum class PhaseMode { Zeroth, Full };

struct PhaseIntegral {
  double correction = 0.0;   // -delta int_0^t q_omega(zeta(s)) ds
  double phase = 0.0;        // base phase + correction
  Vec2 grad{};               // d phi_{t, delta} for Full, d phi_{t, 0} for Zeroth
  std::vector<int> touched;  // sorted covering indices whose support the path entered
  // Per-bump integrals int_0^t q_j(zeta(s)) ds over `touched`, so that the
  // correction for another draw is -delta sum_j omega_j weight_j.
  std::vector<double> weights;
  int nodes = 0;
};

// Backward path zeta(s) = Phi^{s - t}(x, d phi_t(x)), s in [0, t], with the
// unperturbed flow (Zeroth) or the perturbed one (Full). Simpson step <= h^beta / 10.
PhaseIntegral phase_integral(const LagrangianSheet& sheet, const HamiltonianSpec& spec, double t, const Vec2& x,
                             PhaseMode mode, const WkbOptions& opt);

}  // namespace semitorus
