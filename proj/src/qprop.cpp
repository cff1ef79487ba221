#include "semitorus/qprop.hpp"

#include <cmath>

#include "semitorus/errors.hpp"

namespace semitorus {

PseudoOp build_hamiltonian(const GridSpec& grid, const HamiltonianSpec& spec) {
  if (spec.d != grid.d) throw ResolutionError("Hamiltonian and grid dimensions differ");
  PseudoOp op;
  if (spec.warp == 0.0) {
    op = fourier_multiplier(grid, [](const std::array<double, 2>& xi) { return 0.5 * (xi[0] * xi[0] + xi[1] * xi[1]); });
  } else {
    op = quantize(Symbol::from_descriptor(grid, {{"type", "metric-kinetic"}, {"warp", spec.warp}}));
  }
  if (spec.perturbed()) {
    PseudoOp q = quantize(spec.perturbation->as_symbol(grid));
    op.matrix += spec.delta * q.matrix;
  }
  op.hermitian = true;
  return op;
}

Propagator::Propagator(const PseudoOp& hamiltonian) : grid_(hamiltonian.grid), hamiltonian_(hamiltonian.matrix) {
  if (!hamiltonian.hermitian) throw StageError("eigensolve", "propagator needs a Hermitian operator");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian_);
  if (es.info() != Eigen::Success) throw StageError("eigensolve", "Hermitian eigensolver did not converge");
  values_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
  Eigen::MatrixXcd rebuilt = vectors_ * values_.cast<cplx>().asDiagonal() * vectors_.adjoint();
  double scale = std::max(hamiltonian_.norm(), 1e-300);
  reconstruction_error_ = (rebuilt - hamiltonian_).norm() / scale;
  if (reconstruction_error_ > 1e-10)
    throw StageError("eigensolve", "reconstruction error " + std::to_string(reconstruction_error_) + " exceeds 1e-10");
}

namespace {

Eigen::VectorXcd phases(const Eigen::VectorXd& values, double t, double h) {
  Eigen::VectorXcd out(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) out[i] = std::polar(1.0, -t * values[i] / h);
  return out;
}

}  // namespace

Eigen::MatrixXcd Propagator::unitary(double t) const {
  return vectors_ * phases(values_, t, grid_.h).asDiagonal() * vectors_.adjoint();
}

Eigen::VectorXcd Propagator::apply(double t, const Eigen::VectorXcd& coords) const {
  Eigen::VectorXcd w = vectors_.adjoint() * coords;
  w = w.cwiseProduct(phases(values_, t, grid_.h));
  return vectors_ * w;
}

WaveFunction Propagator::apply(double t, const WaveFunction& psi) const {
  return from_basis(grid_, apply(t, to_basis(psi)));
}

Eigen::MatrixXcd Propagator::conjugate(const Eigen::MatrixXcd& a, double s) const {
  Eigen::MatrixXcd b = vectors_.adjoint() * a * vectors_;
  Eigen::VectorXcd ph = phases(values_, s, grid_.h);
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    for (Eigen::Index i = 0; i < b.rows(); ++i) b(i, j) *= ph[i] * std::conj(ph[j]);
  return vectors_ * b * vectors_.adjoint();
}

ChebyshevPropagator::ChebyshevPropagator(const PseudoOp& hamiltonian)
    : grid_(hamiltonian.grid), hamiltonian_(hamiltonian.matrix) {
  if (!hamiltonian.hermitian) throw StageError("chebyshev", "propagator needs a Hermitian operator");
  // Gershgorin discs give a rigorous spectral enclosure.
  lo_ = std::numeric_limits<double>::infinity();
  hi_ = -lo_;
  for (Eigen::Index i = 0; i < hamiltonian_.rows(); ++i) {
    double radius = hamiltonian_.row(i).cwiseAbs().sum() - std::abs(hamiltonian_(i, i));
    lo_ = std::min(lo_, hamiltonian_(i, i).real() - radius);
    hi_ = std::max(hi_, hamiltonian_(i, i).real() + radius);
  }
  if (hi_ - lo_ < 1e-12) hi_ = lo_ + 1e-12;
}

Eigen::VectorXcd ChebyshevPropagator::apply(double t, const Eigen::VectorXcd& v) const {
  double tau = t / grid_.h;
  double c = 0.5 * (hi_ + lo_), r = 0.5 * (hi_ - lo_);
  double z = tau * r;
  auto scaled = [&](const Eigen::VectorXcd& u) -> Eigen::VectorXcd { return (hamiltonian_ * u - c * u) / r; };
  Eigen::VectorXcd t0 = v, t1 = scaled(v);
  Eigen::VectorXcd acc = std::cyl_bessel_j(0.0, std::abs(z)) * t0;
  cplx mi(0.0, -1.0);
  double sgn = z < 0 ? -1.0 : 1.0;  // J_k(-z) = (-1)^k J_k(z)
  int k = 1;
  cplx coef_phase = mi;
  for (;; ++k) {
    double jk = std::cyl_bessel_j(static_cast<double>(k), std::abs(z)) * (k % 2 && sgn < 0 ? -1.0 : 1.0);
    acc += 2.0 * coef_phase * jk * t1;
    if (k > std::abs(z) + 10 && std::abs(jk) < 1e-17) break;
    Eigen::VectorXcd t2 = 2.0 * scaled(t1) - t0;
    t0 = std::move(t1);
    t1 = std::move(t2);
    coef_phase *= mi;
  }
  last_terms_ = k + 1;
  return std::polar(1.0, -tau * c) * acc;
}

WaveFunction ChebyshevPropagator::apply(double t, const WaveFunction& psi) const {
  return from_basis(grid_, apply(t, to_basis(psi)));
}

ConjugatedOperator conjugate_laplacian(const Propagator& prop, double t) {
  ConjugatedOperator out;
  out.t = t;
  out.matrix = prop.conjugate(semiclassical_laplacian(prop.grid()).matrix, t);
  return out;
}

double sobolev_norm(const WaveFunction& psi, double m) {
  Eigen::VectorXcd c = fft_forward(psi);
  double s = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    auto xi = psi.grid.xi(static_cast<int>(k));
    s += std::pow(1.0 + xi[0] * xi[0] + xi[1] * xi[1], m) * std::norm(c[k]);
  }
  return std::sqrt(psi.grid.volume() * s);
}

}  // namespace semitorus
