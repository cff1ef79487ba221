#pragma once

#include <functional>

#include "semitorus/grid.hpp"

namespace semitorus {

// Fourier integral operator on T^1 with generating function psi(x1, xi0):
//   (T u)(x1) = (2 pi h)^{-1} int int exp(i (psi(x1, xi0) - x0 xi0)/h) alpha(x1, xi0) u(x0) dx0 dxi0.
// On the torus the xi0 integral is a sum over the dual lattice; psi must satisfy
// psi(x + L, xi_n) = psi(x, xi_n) + L xi_n so the kernel is periodic.
struct FioSpec {
  std::function<double(double x1, double xi0)> generating;
  std::function<cplx(double x1, double xi0)> amplitude;
};

// Throws StageError("degenerate-generating-function") when |d^2 psi/dx dxi| < 1e-6
// somewhere on the grid window.
WaveFunction apply_fio(const WaveFunction& u, const FioSpec& spec);

}  // namespace semitorus
