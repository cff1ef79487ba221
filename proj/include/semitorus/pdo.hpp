#pragma once

#include <functional>

#include "semitorus/symbol.hpp"

namespace semitorus {

// Dense operator in the orthonormal Fourier basis of the grid.
struct PseudoOp {
  GridSpec grid;
  Eigen::MatrixXcd matrix;
  bool hermitian = false;
};

// Symmetrised Kohn-Nirenberg quantisation (Op_KN(a) + Op_KN(conj a)^*)/2.
// Hermitian for real symbols.
PseudoOp quantize(const Symbol& a);

// Plain left (Kohn-Nirenberg) quantisation.
Eigen::MatrixXcd quantize_kn(const Symbol& a);

// Inverse of quantize_kn: the unique sampled symbol whose KN quantisation is `op`.
Eigen::MatrixXcd kn_symbol(const GridSpec& grid, const Eigen::MatrixXcd& op);

// Diagonal operator f(xi_n).
PseudoOp fourier_multiplier(const GridSpec& grid, const std::function<double(const std::array<double, 2>&)>& f);
// -h^2 Delta.
PseudoOp semiclassical_laplacian(const GridSpec& grid);

WaveFunction apply(const PseudoOp& op, const WaveFunction& psi);

// Spectral norm via power iteration on A^* A.
double operator_norm(const Eigen::MatrixXcd& a, int max_iter = 50, double tol = 1e-8);

// sup over the grid of <xi>^{|beta|-order} |d_x^alpha d_xi^beta a|.
// x-derivatives are spectral, xi-derivatives use fourth-order centred
// differences; xi nodes whose stencil leaves the window are skipped.
double seminorm_probe(const Symbol& a, std::array<int, 2> alpha, std::array<int, 2> beta);

// Evaluates a sampled symbol off the grid: trigonometric interpolation in x
// and five-point Lagrange interpolation in xi.
class SymbolInterpolator {
 public:
  SymbolInterpolator(const GridSpec& grid, const Eigen::MatrixXcd& samples);
  cplx operator()(const PhasePoint& p) const;
  const GridSpec& grid() const { return grid_; }

 private:
  GridSpec grid_;
  Eigen::MatrixXcd coeffs_;  // x-Fourier coefficients per xi column
};

}  // namespace semitorus
