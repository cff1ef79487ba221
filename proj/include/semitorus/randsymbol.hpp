#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <nlohmann/json.hpp>
#include <vector>

#include "semitorus/symbol.hpp"

namespace semitorus {

// Family of bumps q_j(rho) = chi(dist(rho, rho_j) / radius) covering the
// energy shell {mu1 <= |xi|^2 <= mu2}. chi is the plateau profile, so each
// q_j is supported in the ball of radius 2 * radius.
struct CoveringSpec {
  int d = 1;
  double length = 2.0 * M_PI;
  double h = 0.1;
  double beta = 0.25;
  double mu1 = 0.81;
  double mu2 = 1.21;
  double radius = 0.0;   // bump scale, h^beta for lattice coverings
  bool lattice = true;   // false for hand-built centre lists
  int nx = 0;            // x-lattice points per axis (spacing L/nx)
  double xi_spacing = 0; // xi-lattice spacing
  int xi_half = 0;       // xi-lattice indices run over [-xi_half, xi_half]
  std::vector<PhasePoint> centers;
  int multiplicity = 0;          // max #centres within `radius` of a probe point
  int support_multiplicity = 0;  // max #bump supports containing a probe point (C_cov)

  // Calls f(j, distance) for every centre within `reach` of p.
  void for_each_near(const PhasePoint& p, double reach, const std::function<void(int, double)>& f) const;
  // Index of the lattice centre at (ix, jxi) or -1; rebuilt lazily.
  int lattice_index(const std::array<int, 2>& ix, const std::array<int, 2>& jxi) const;

  // Custom covering with explicit centres (no lattice lookup).
  static CoveringSpec custom(int d, double length, double radius, std::vector<PhasePoint> centers);

  void rebuild_index();

 private:
  std::vector<int> table_;
};

// Spacing h^beta/sqrt(d) lattice intersected with the shell thickened by h^beta.
// Coverage is verified on a 10x finer probe lattice; throws StageError("covering")
// if some probe on the shell is not within h^beta of a centre.
CoveringSpec build_covering(double mu1, double mu2, double beta, double h, const GridSpec& grid);

void to_json(nlohmann::json& j, const CoveringSpec& c);
void from_json(const nlohmann::json& j, CoveringSpec& c);

enum class Density { RaisedCosine, Uniform };

std::string density_name(Density d);
Density density_from_name(const std::string& name);
double density_variance(Density d);
// Inverse CDF of the density on [-1, 1].
double density_quantile(Density d, double u);

struct OmegaDraw {
  std::uint64_t seed = 0;
  Density density = Density::RaisedCosine;
  std::vector<double> omega;
};

// omega_j is a pure function of (seed, j).
double omega_coefficient(std::uint64_t seed, std::size_t j, Density density);
OmegaDraw draw_omega(const CoveringSpec& cov, std::uint64_t seed, Density density = Density::RaisedCosine);

void to_json(nlohmann::json& j, const OmegaDraw& w);
void from_json(const nlohmann::json& j, OmegaDraw& w);

// Value, gradient and Hessian in the phase-space coordinates (x_1..x_d, xi_1..xi_d).
struct LocalJet {
  double value = 0.0;
  std::array<double, 4> grad{};
  std::array<std::array<double, 4>, 4> hess{};
};

// q_omega = sum_j omega_j q_j with closed-form derivatives.
class RandomSymbol {
 public:
  RandomSymbol(std::shared_ptr<const CoveringSpec> cov, OmegaDraw omega);

  double value(const PhasePoint& p) const;
  LocalJet jet(const PhasePoint& p, int order) const;
  // Single-bump jet, used for dependency bookkeeping and phase integrals.
  LocalJet bump_jet(int j, const PhasePoint& p, int order) const;

  const CoveringSpec& covering() const { return *cov_; }
  std::shared_ptr<const CoveringSpec> covering_ptr() const { return cov_; }
  const OmegaDraw& omega() const { return omega_; }
  Symbol as_symbol(const GridSpec& grid) const;

 private:
  std::shared_ptr<const CoveringSpec> cov_;
  OmegaDraw omega_;
};

class HamiltonianSpec;

struct FlowAverageReport {
  double c0_hat = 0.0;  // min over samples of (1/T) int_0^T sum_j q_j(Phi^t rho) dt
  double declared_c0 = 0.0;
  bool passed = false;
  int samples = 0;
};

// Checks the flow-averaged lower bound along the unperturbed flow for
// deterministic shell samples (Simpson rule, step <= radius/10).
FlowAverageReport validate_flow_average(const CoveringSpec& cov, const HamiltonianSpec& kinetic, double horizon,
                                        int samples, double declared_c0);

}  // namespace semitorus
