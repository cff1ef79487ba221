#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "semitorus/fit.hpp"

namespace semitorus {

// Integrand a(x) exp(i phi(x)/h) on the periodic box [0, L)^d. The amplitude
// must vanish near the box faces so the trapezoid rule is spectrally accurate.
struct OscillatoryProblem {
  int d = 1;
  double length = 2.0 * M_PI;
  std::function<double(const std::array<double, 2>&)> amplitude;
  std::function<double(const std::array<double, 2>&)> phase;
};

// Trapezoid quadrature with n points per axis. Throws ResolutionError if the
// phase frequency |grad phi|/h exceeds the Nyquist limit of the quadrature grid
// or the amplitude is not compactly supported inside the box.
std::complex<double> oscillatory_integral(const OscillatoryProblem& prob, double h, int n);

// Smallest power-of-two quadrature size with 4x Nyquist oversampling.
int oscillatory_quadrature_size(const OscillatoryProblem& prob, double h);

struct DecayFit {
  std::vector<double> h;
  std::vector<double> magnitude;
  LineFit fit;  // log|I| against log h; slope is the decay exponent
};

DecayFit decay_fit(const OscillatoryProblem& prob, const std::vector<double>& h_ladder);

}  // namespace semitorus
