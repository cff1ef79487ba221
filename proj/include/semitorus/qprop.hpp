#pragma once

#include "semitorus/hamflow.hpp"
#include "semitorus/pdo.hpp"

namespace semitorus {

// Quantisation of p_delta: exact Fourier multiplier for the flat kinetic part,
// symmetrised KN for the warped kinetic part and for delta * q_omega.
PseudoOp build_hamiltonian(const GridSpec& grid, const HamiltonianSpec& spec);

// U(t) = exp(-i t P / h) from a dense Hermitian eigendecomposition.
class Propagator {
 public:
  // Throws StageError("eigensolve") if V diag(E) V^* misses P by more than 1e-10 relative.
  explicit Propagator(const PseudoOp& hamiltonian);

  const GridSpec& grid() const { return grid_; }
  const Eigen::MatrixXcd& hamiltonian() const { return hamiltonian_; }
  const Eigen::VectorXd& eigenvalues() const { return values_; }
  const Eigen::MatrixXcd& eigenvectors() const { return vectors_; }
  double reconstruction_error() const { return reconstruction_error_; }

  Eigen::MatrixXcd unitary(double t) const;
  Eigen::VectorXcd apply(double t, const Eigen::VectorXcd& coords) const;
  WaveFunction apply(double t, const WaveFunction& psi) const;
  // U(s) A U(-s) for an operator A in the Fourier basis.
  Eigen::MatrixXcd conjugate(const Eigen::MatrixXcd& a, double s) const;

 private:
  GridSpec grid_;
  Eigen::MatrixXcd hamiltonian_;
  Eigen::VectorXd values_;
  Eigen::MatrixXcd vectors_;
  double reconstruction_error_ = 0.0;
};

// Matrix-free exp(-i t P/h) by a Chebyshev expansion; used when a dense
// eigendecomposition of an N^2 x N^2 operator is too costly.
class ChebyshevPropagator {
 public:
  explicit ChebyshevPropagator(const PseudoOp& hamiltonian);
  Eigen::VectorXcd apply(double t, const Eigen::VectorXcd& coords) const;
  WaveFunction apply(double t, const WaveFunction& psi) const;
  int last_terms() const { return last_terms_; }

 private:
  GridSpec grid_;
  Eigen::MatrixXcd hamiltonian_;
  double lo_ = 0.0, hi_ = 0.0;
  mutable int last_terms_ = 0;
};

// P~ = U(t) (-h^2 Delta) U(-t). If psi is an eigenfunction of -h^2 Delta then
// U(t) psi is an eigenfunction of P~ with the same eigenvalue.
struct ConjugatedOperator {
  double t = 0.0;
  Eigen::MatrixXcd matrix;
};

ConjugatedOperator conjugate_laplacian(const Propagator& prop, double t);

// ||(1 - h^2 Delta)^{m/2} psi||_2.
double sobolev_norm(const WaveFunction& psi, double m);

struct EgorovResult {
  double h = 0.0;
  double t = 0.0;
  double residual = 0.0;  // || U(-t) Op(a) U(t) - Op(a o Phi^t) ||
};

// a must have a closed form. The classical flow of `spec` moves each grid node
// forward by t; a(Phi^t(rho)) is quantised and compared with the Heisenberg
// evolution of Op(a). Throws ResolutionError if a or a o Phi^t reaches the
// edge of the frequency window.
EgorovResult egorov_residual(const Propagator& prop, const Symbol& a, double t, const HamiltonianSpec& spec,
                             double step);

struct EgorovRecursion {
  Eigen::MatrixXcd b0;      // samples of a o Phi^t
  Eigen::MatrixXcd c1;      // samples of the first correction
  double c1_sup = 0.0;
  double residual0 = 0.0;   // || W - Op(b0) ||
  double residual1 = 0.0;   // || W - (Op(b0) - Op(c1)) ||
};

// First recursion term c1(t) = (i/h) int_0^t e0(s) o Phi^{t-s} ds where e0(s)
// is the KN symbol of hD_s B0(s) - [P, B0(s)]. Simpson rule on `nodes` (even)
// intervals; e0 is pulled back by interpolation of its samples.
EgorovRecursion egorov_recursion_terms(const Propagator& prop, const Symbol& a, double t, const HamiltonianSpec& spec,
                                       double step, int nodes = 8);

}  // namespace semitorus
