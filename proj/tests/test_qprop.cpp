#include <doctest.h>

#include <algorithm>

#include "semitorus/errors.hpp"
#include "semitorus/hamflow.hpp"
#include "semitorus/pdo.hpp"
#include "semitorus/qprop.hpp"
#include "semitorus/randsymbol.hpp"
#include "semitorus/rng.hpp"

using namespace semitorus;

namespace {

HamiltonianSpec perturbed(const GridSpec& g, double beta, double delta, std::uint64_t seed) {
  auto cov = std::make_shared<CoveringSpec>(build_covering(0.36, 0.64, beta, g.h, g));
  HamiltonianSpec s;
  s.d = g.d;
  s.length = g.length;
  s.delta = delta;
  s.perturbation = std::make_shared<RandomSymbol>(cov, draw_omega(*cov, seed));
  return s;
}

HamiltonianSpec free_spec(const GridSpec& g) {
  HamiltonianSpec s;
  s.d = g.d;
  s.length = g.length;
  return s;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("free propagator multiplies plane waves by exp(-i t |xi|^2 / 2h)") {
  GridSpec g{2, 16, 2.0 * M_PI, 0.125};
  Propagator prop(build_hamiltonian(g, free_spec(g)));
  const double t = 0.9;
  for (std::array<int, 2> n : {std::array<int, 2>{1, 0}, {-3, 2}, {5, 7}}) {
    WaveFunction e = plane_wave(g, n);
    auto xi = g.xi(g.join(g.slot(n[0]), g.slot(n[1])));
    cplx phase = std::polar(1.0, -t * 0.5 * (xi[0] * xi[0] + xi[1] * xi[1]) / g.h);
    CHECK((prop.apply(t, e).values - phase * e.values).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("perturbed propagator is unitary and a one-parameter group") {
  GridSpec g{1, 64, 2.0 * M_PI, 1.0 / 16.0};
  Propagator prop(build_hamiltonian(g, perturbed(g, 0.25, 0.05, 3)));
  CHECK(prop.reconstruction_error() < 1e-10);
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(g.size(), g.size());
  for (double t : {0.1, 1.0, 5.0}) {
    Eigen::MatrixXcd u = prop.unitary(t);
    CHECK(max_abs(u.adjoint() * u - id) < 1e-10);
  }
  CHECK(max_abs(prop.unitary(0.3) * prop.unitary(0.4) - prop.unitary(0.7)) < 1e-10);
  CHECK(max_abs(prop.unitary(0.5) * prop.unitary(-0.5) - id) < 1e-10);
}

TEST_CASE("Chebyshev propagator agrees with the dense one") {
  GridSpec g{1, 64, 2.0 * M_PI, 1.0 / 16.0};
  PseudoOp ham = build_hamiltonian(g, perturbed(g, 0.25, 0.05, 4));
  Propagator dense(ham);
  ChebyshevPropagator cheb(ham);
  Eigen::VectorXcd v(g.size());
  for (int k = 0; k < g.size(); ++k) v[k] = cplx(counter_uniform(1, k, 0) - 0.5, counter_uniform(1, k, 1) - 0.5);
  CHECK((cheb.apply(1.3, v) - dense.apply(1.3, v)).norm() < 1e-9 * v.norm());
  CHECK(cheb.last_terms() > 0);
}

TEST_CASE("conjugated Laplacian: exact without perturbation, isospectral with it") {
  GridSpec g{1, 64, 2.0 * M_PI, 1.0 / 16.0};
  Eigen::MatrixXcd lap = semiclassical_laplacian(g).matrix;
  Propagator free(build_hamiltonian(g, free_spec(g)));
  CHECK(max_abs(conjugate_laplacian(free, 2.0).matrix - lap) < 1e-12);

  const double delta = 0.05, t = 1.0;
  HamiltonianSpec spec = perturbed(g, 0.25, delta, 5);
  Propagator prop(build_hamiltonian(g, spec));
  Eigen::MatrixXcd conj = conjugate_laplacian(prop, t).matrix;
  Eigen::MatrixXcd herm = 0.5 * (conj + conj.adjoint());
  Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(herm).eigenvalues();
  std::vector<double> ref;
  for (int k = 0; k < g.size(); ++k) ref.push_back(lap(k, k).real());
  std::sort(ref.begin(), ref.end());
  for (int k = 0; k < g.size(); ++k) CHECK(std::abs(ev[k] - ref[k]) < 1e-9);

  // Duhamel: d/ds U(s) L U(-s) = -(i/h) delta U(s) [Q, L] U(-s).
  Eigen::MatrixXcd q = quantize(spec.perturbation->as_symbol(g)).matrix;
  double bound = t / g.h * delta * operator_norm(q * lap - lap * q);
  double gap = operator_norm(conj - lap);
  CHECK(gap > 0.0);
  CHECK(gap <= bound * (1.0 + 1e-6));
}

TEST_CASE("Sobolev norm of a plane wave") {
  GridSpec g{1, 32, 2.0 * M_PI, 0.1};
  WaveFunction e = plane_wave(g, {3, 0});
  double xi = 0.3;
  CHECK(sobolev_norm(e, 0.0) == doctest::Approx(l2_norm(e)));
  CHECK(sobolev_norm(e, 2.0) == doctest::Approx((1.0 + xi * xi) * std::sqrt(2.0 * M_PI)));
}

TEST_CASE("Egorov residual vanishes for Fourier multipliers under the free flow") {
  GridSpec g{1, 64, 2.0 * M_PI, 1.0 / 16.0};
  Propagator free(build_hamiltonian(g, free_spec(g)));
  Symbol mult = Symbol::analytic(g, [](const PhasePoint& p) { return cplx(std::exp(-16.0 * p.xi[0] * p.xi[0]), 0.0); }, true);
  CHECK(egorov_residual(free, mult, 0.5, free_spec(g), 0.01).residual < 1e-10);
  Symbol flat = Symbol::analytic(g, [](const PhasePoint&) { return cplx(1.0, 0.0); }, true);
  CHECK_THROWS_AS(egorov_residual(free, flat, 0.5, free_spec(g), 0.01), ResolutionError);
}

TEST_CASE("first recursion term improves on the transported symbol") {
  GridSpec g{1, 64, 2.0 * M_PI, 1.0 / 8.0};
  HamiltonianSpec spec;
  spec.d = 1;
  spec.warp = 0.3;
  Propagator prop(build_hamiltonian(g, spec));
  Symbol a = Symbol::from_descriptor(g, {{"type", "gaussian"}, {"center", {{"x", {M_PI}}, {"xi", {0.7}}}}, {"width", 0.6}});
  EgorovRecursion rec = egorov_recursion_terms(prop, a, 0.25, spec, 0.01);
  CHECK(rec.residual0 > 0.0);
  CHECK(rec.residual1 < rec.residual0);
  CHECK(rec.c1_sup > 0.0);
}
