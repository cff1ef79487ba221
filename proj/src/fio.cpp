#include "semitorus/fio.hpp"

#include <cmath>

#include "semitorus/errors.hpp"

namespace semitorus {

WaveFunction apply_fio(const WaveFunction& u, const FioSpec& spec) {
  const GridSpec& g = u.grid;
  if (g.d != 1) throw ResolutionError("apply_fio is implemented for d = 1");
  Eigen::VectorXcd c = fft_forward(u);  // x0 quadrature

  double fd = 1e-4;
  for (int j = 0; j < g.n; ++j) {
    double x = g.x(j)[0];
    for (int m = 0; m < g.n; ++m) {
      double xi = g.xi(m)[0];
      double mixed = (spec.generating(x + fd, xi + fd) - spec.generating(x + fd, xi - fd) -
                      spec.generating(x - fd, xi + fd) + spec.generating(x - fd, xi - fd)) /
                     (4.0 * fd * fd);
      if (std::abs(mixed) < 1e-6)
        throw StageError("degenerate-generating-function",
                         "mixed Hessian of the generating function vanishes at x=" + std::to_string(x) +
                             ", xi=" + std::to_string(xi));
    }
  }

  WaveFunction out(g);
  for (int j = 0; j < g.n; ++j) {
    double x = g.x(j)[0];
    cplx acc = 0.0;
    for (int m = 0; m < g.n; ++m) {
      if (c[m] == 0.0) continue;
      double xi = g.xi(m)[0];
      acc += std::polar(1.0, spec.generating(x, xi) / g.h) * spec.amplitude(x, xi) * c[m];
    }
    out.values[j] = acc;
  }
  return out;
}

}  // namespace semitorus
