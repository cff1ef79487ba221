#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <memory>
#include <optional>

#include "semitorus/lagrangian.hpp"
#include "semitorus/randsymbol.hpp"

namespace semitorus {

using PhaseState = std::array<double, 4>;  // (x_0, x_1, xi_0, xi_1)

PhaseState to_state(const PhasePoint& p);
PhasePoint to_point(const PhaseState& s);

// p_delta(x, xi) = c(x)|xi|^2/2 + delta * q_omega(x, xi).
struct HamiltonianSpec {
  int d = 1;
  double length = 2.0 * M_PI;
  double warp = 0.0;
  double delta = 0.0;
  std::shared_ptr<const RandomSymbol> perturbation;
  std::optional<double> xi_window;  // flows abort once |xi_i| exceeds it

  LocalJet jet(const PhasePoint& p, int order) const;
  double energy(const PhasePoint& p) const { return jet(p, 0).value; }
  PhaseState vector_field(const PhaseState& s) const;
  // Largest admissible RK4 step: radius/10 for a live perturbation.
  double max_step() const;
  bool perturbed() const { return perturbation && delta != 0.0; }
};

struct Trajectory {
  std::vector<double> t;
  std::vector<PhasePoint> points;
  double energy_drift = 0.0;  // max |p(rho(t)) - p(rho(0))|
};

// Fixed-step RK4. Negative t integrates backwards. Throws ResolutionError
// when step > max_step() or the trajectory leaves the xi window.
Trajectory flow(const HamiltonianSpec& spec, const PhasePoint& start, double t, double step);
PhasePoint flow_endpoint(const HamiltonianSpec& spec, const PhasePoint& start, double t, double step);

struct TangentFrame {
  Trajectory trajectory;
  std::vector<Eigen::MatrixXd> jacobians;  // dPhi^{t_k}, 2d x 2d
  Eigen::VectorXd ftle;                    // descending
  double c0 = 0.0;                         // ||J(t)|| <= C0 exp(C0 |t|) on the stored times
  double det_error = 0.0;                  // max |det J - 1|
};

TangentFrame tangent_flow(const HamiltonianSpec& spec, const PhasePoint& start, double t, double step);
// Jacobian of the endpoint map only.
Eigen::MatrixXd tangent_endpoint(const HamiltonianSpec& spec, const PhasePoint& start, double t, double step,
                                 PhasePoint* end = nullptr);

// Local splitting T_rho = E+ + E- + E0 + transverse. E- is the most contracted
// right-singular direction of dPhi^{T}, E+ that of dPhi^{-T}.
struct Splitting {
  Eigen::VectorXd unstable, stable, flow, transverse;
  double gap = 0.0;  // top forward FTLE minus the next one
  bool determinate = false;
};

Splitting local_splitting(const HamiltonianSpec& spec, const PhasePoint& p, double horizon, double step);
// |v_-| / |v| for the decomposition of v in the splitting basis.
double stable_fraction(const Splitting& s, const Eigen::VectorXd& v);

struct InstabilityReport {
  double eta_hat = 0.0;  // max stable fraction over sampled tangent vectors
  double eta = 0.0;
  bool passed = false;
  int samples = 0;
  int indeterminate = 0;
};

InstabilityReport instability_check(const LagrangianSheet& sheet, const HamiltonianSpec& spec, double eta,
                                    double horizon = 3.0, double step = 0.01, int samples = 64);

// sup over sample pairs of intrinsic (lifted straight path) over ambient distance.
double distortion(const LagrangianSheet& sheet, int samples = 200);

void write_trajectory_csv(const std::filesystem::path& path, int d, const HamiltonianSpec& spec, const Trajectory& tr);
nlohmann::json tangent_summary(const TangentFrame& frame);

}  // namespace semitorus
