#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace semitorus {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

// Phase data of a Lagrangian state b(x) exp(i phi(x)/h) at one base point.
struct SheetPoint {
  double phase = 0.0;
  Vec2 grad{};  // d phi, the xi coordinate of the graph
  Mat2 hess{};
  std::complex<double> amplitude = 0.0;
};

// Graph {(x, d phi(x))} over the patch |x_i - center_i| < half_width (periodic).
struct LagrangianSheet {
  int d = 1;
  double length = 2.0 * M_PI;
  Vec2 center{};
  double half_width = 1.0;
  std::function<SheetPoint(const Vec2&)> at;

  bool contains(const Vec2& x) const;
  // Deterministic quasi-uniform samples of the patch (Kronecker sequence).
  std::vector<Vec2> sample_points(int count) const;
};

// Linear phase xi . x with constant amplitude profile `amp` on the patch.
LagrangianSheet linear_sheet(int d, double length, Vec2 center, double half_width, Vec2 xi,
                             std::function<std::complex<double>(const Vec2&)> amp);

// Superposition sum_j s_j a_j exp(i phi_j/h) on a common patch.
struct Superposition {
  double h = 0.1;
  std::vector<LagrangianSheet> sheets;
  std::vector<std::complex<double>> weights;
};

}  // namespace semitorus
