#include "semitorus/oscillatory.hpp"

#include <cmath>

#include "semitorus/errors.hpp"

namespace semitorus {

namespace {

// Max |grad phi| over the points of an m^d probe grid where the amplitude is nonzero.
double max_phase_gradient(const OscillatoryProblem& prob, int m) {
  double dx = prob.length / m;
  double eps = 1e-5 * prob.length;
  double best = 0.0;
  int total = prob.d == 1 ? m : m * m;
  for (int idx = 0; idx < total; ++idx) {
    std::array<double, 2> x{(prob.d == 1 ? idx : idx / m) * dx, prob.d == 2 ? (idx % m) * dx : 0.0};
    if (prob.amplitude(x) == 0.0) continue;
    double g2 = 0.0;
    for (int i = 0; i < prob.d; ++i) {
      auto xp = x, xm = x;
      xp[i] += eps;
      xm[i] -= eps;
      double gi = (prob.phase(xp) - prob.phase(xm)) / (2.0 * eps);
      g2 += gi * gi;
    }
    best = std::max(best, std::sqrt(g2));
  }
  return best;
}

}  // namespace

std::complex<double> oscillatory_integral(const OscillatoryProblem& prob, double h, int n) {
  if (prob.d != 1 && prob.d != 2) throw ResolutionError("oscillatory integral supports d = 1, 2");
  if (n < 8) throw ResolutionError("quadrature needs at least 8 points per axis");
  double dx = prob.length / n;
  double nyquist = M_PI / dx;
  double grad = max_phase_gradient(prob, n);
  if (grad / h > nyquist)
    throw ResolutionError("phase frequency |grad phi|/h = " + std::to_string(grad / h) +
                          " exceeds the quadrature Nyquist limit " + std::to_string(nyquist));

  int total = prob.d == 1 ? n : n * n;
  double amax = 0.0, face = 0.0;
  long double re = 0.0L, im = 0.0L;
  for (int idx = 0; idx < total; ++idx) {
    int i0 = prob.d == 1 ? idx : idx / n;
    int i1 = prob.d == 2 ? idx % n : 0;
    std::array<double, 2> x{i0 * dx, i1 * dx};
    double a = prob.amplitude(x);
    amax = std::max(amax, std::abs(a));
    if (i0 == 0 || (prob.d == 2 && i1 == 0)) face = std::max(face, std::abs(a));
    if (a == 0.0) continue;
    long double arg = static_cast<long double>(prob.phase(x)) / h;
    re += a * std::cos(arg);
    im += a * std::sin(arg);
  }
  if (face > 1e-12 * amax) throw ResolutionError("amplitude is not compactly supported inside the quadrature box");
  double w = prob.d == 1 ? dx : dx * dx;
  return {static_cast<double>(re) * w, static_cast<double>(im) * w};
}

int oscillatory_quadrature_size(const OscillatoryProblem& prob, double h) {
  double grad = max_phase_gradient(prob, prob.d == 1 ? 1024 : 128);
  double need = 4.0 * grad / h * prob.length / M_PI;
  int n = 64;
  while (n < need) n *= 2;
  return n;
}

DecayFit decay_fit(const OscillatoryProblem& prob, const std::vector<double>& h_ladder) {
  DecayFit out;
  for (double h : h_ladder) {
    int n = oscillatory_quadrature_size(prob, h);
    out.h.push_back(h);
    out.magnitude.push_back(std::abs(oscillatory_integral(prob, h, n)));
  }
  out.fit = fit_loglog(out.h, out.magnitude);
  return out;
}

}  // namespace semitorus
