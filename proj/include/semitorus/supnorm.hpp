#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "semitorus/grid.hpp"

namespace semitorus {

enum class GradientBound {
  Sobolev,      // |grad psi| <= k_max sqrt(#modes) ||c||_l2
  Spectral,     // |grad psi| <= sum |k| |c_k|
  SecondOrder,  // Taylor bound on |psi|^2 with node gradients and a Hessian bound
};

std::string gradient_bound_name(GradientBound g);
GradientBound gradient_bound_from_name(const std::string& name);

struct SupnormCertificate {
  double linf = 0.0;        // max over the evaluated nodes
  double upper = 0.0;       // certified upper bound on the continuum sup
  double correction = 0.0;  // upper - linf
  double grid_max = 0.0;    // max over the original grid
  int oversampling = 1;
  GradientBound mode = GradientBound::Spectral;
  bool inconclusive = false;  // the gradient term dominates the value
};

// Evaluates psi by zero-padded FFT at 1, 2, 4, ... times the grid density until
// correction <= tol * linf or `max_oversampling` is reached.
SupnormCertificate supnorm_measure(const WaveFunction& psi, GradientBound mode, double tol = 1e-2,
                                   int max_oversampling = 16);

// Trigonometric interpolant of psi on a grid `factor` times finer.
WaveFunction oversample(const WaveFunction& psi, int factor);

nlohmann::json to_json(const SupnormCertificate& c);

}  // namespace semitorus
