#pragma once

#include <array>

namespace semitorus {

// Conformal factor of the warped metric family: the kinetic symbol is
// c(x)|xi|^2/2 with c = 1 + warp * w(x). warp = 0 is the flat torus.
struct WarpFactor {
  double c = 1.0;
  std::array<double, 2> grad{};
  std::array<std::array<double, 2>, 2> hess{};
};

WarpFactor warp_factor(int d, double length, double warp, const std::array<double, 2>& x);

}  // namespace semitorus
