#include <doctest.h>

#include "semitorus/errors.hpp"
#include "semitorus/hamflow.hpp"
#include "semitorus/lagrangian.hpp"

using namespace semitorus;

namespace {

HamiltonianSpec warped(int d, double warp) {
  HamiltonianSpec s;
  s.d = d;
  s.warp = warp;
  return s;
}

PhasePoint point(double x0, double x1, double xi0, double xi1) {
  PhasePoint p;
  p.x = {x0, x1};
  p.xi = {xi0, xi1};
  return p;
}

}  // namespace

TEST_CASE("free flow is a straight line") {
  HamiltonianSpec free = warped(2, 0.0);
  PhasePoint start = point(1.0, 2.0, 0.6, -0.8);
  const double t = 2.5;
  PhasePoint end = flow_endpoint(free, start, t, 0.05);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(torus_delta(end.x[i] - (start.x[i] + t * start.xi[i]), free.length)) < 1e-10);
    CHECK(end.xi[i] == doctest::Approx(start.xi[i]).epsilon(1e-14));
  }
}

TEST_CASE("warped flow is reversible and conserves energy to fourth order") {
  HamiltonianSpec s = warped(2, 0.3);
  PhasePoint start = point(0.4, 1.3, 0.7, 0.5);
  PhasePoint there = flow_endpoint(s, start, 1.5, 0.01);
  PhasePoint back = flow_endpoint(s, there, -1.5, 0.01);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(torus_delta(back.x[i] - start.x[i], s.length)) < 1e-9);
    CHECK(std::abs(back.xi[i] - start.xi[i]) < 1e-9);
  }
  double coarse = flow(s, start, 2.0, 0.1).energy_drift;
  double fine = flow(s, start, 2.0, 0.05).energy_drift;
  double order = std::log2(coarse / fine);
  CHECK(order > 3.5);
  CHECK(order < 4.6);
}

TEST_CASE("tangent map of the free flow is the shear") {
  HamiltonianSpec free = warped(2, 0.0);
  const double t = 1.7;
  Eigen::MatrixXd j = tangent_endpoint(free, point(0.1, 0.2, 0.3, 0.4), t, 0.05);
  Eigen::MatrixXd expect = Eigen::MatrixXd::Identity(4, 4);
  expect(0, 2) = t;
  expect(1, 3) = t;
  CHECK((j - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("tangent flow on a warped metric is symplectic and bounded by C0") {
  HamiltonianSpec s = warped(2, 0.4);
  TangentFrame fr = tangent_flow(s, point(0.5, 2.5, 0.8, -0.3), 2.0, 0.01);
  CHECK(fr.det_error < 1e-6);
  CHECK(fr.c0 >= 1.0);
  for (std::size_t k = 0; k < fr.jacobians.size(); ++k) {
    double norm = fr.jacobians[k].operatorNorm();
    CHECK(norm <= fr.c0 * std::exp(fr.c0 * std::abs(fr.trajectory.t[k])) * (1.0 + 1e-9));
  }
  for (Eigen::Index i = 1; i < fr.ftle.size(); ++i) CHECK(fr.ftle[i] <= fr.ftle[i - 1]);
}

TEST_CASE("trajectories leaving the xi window are refused") {
  HamiltonianSpec s = warped(1, 0.0);
  s.xi_window = 1.0;
  CHECK_THROWS_AS(flow(s, point(0.0, 0.0, 2.0, 0.0), 1.0, 0.1), ResolutionError);
}

TEST_CASE("stable fraction in a given splitting") {
  Splitting s;
  s.unstable = Eigen::VectorXd::Unit(4, 0);
  s.stable = Eigen::VectorXd::Unit(4, 1);
  s.flow = Eigen::VectorXd::Unit(4, 2);
  s.transverse = Eigen::VectorXd::Unit(4, 3);
  CHECK(stable_fraction(s, s.stable) == doctest::Approx(1.0));
  CHECK(stable_fraction(s, s.unstable) == doctest::Approx(0.0));
  Eigen::VectorXd mix = s.stable + s.unstable;
  CHECK(stable_fraction(s, mix) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(stable_fraction(s, Eigen::VectorXd::Ones(2)), StageError);
}

TEST_CASE("distortion of flat and curved sheets") {
  LagrangianSheet flat = linear_sheet(2, 2.0 * M_PI, {3.0, 3.0}, 1.0, {0.5, 0.2}, [](const Vec2&) { return 1.0; });
  CHECK(distortion(flat, 40) == doctest::Approx(1.0).epsilon(1e-12));

  // phi = k sin(x): the graph's slope is bounded by k, so 1 <= distortion <= sqrt(1 + k^2).
  const double k = 0.8;
  LagrangianSheet curved;
  curved.d = 1;
  curved.center = {3.0, 0.0};
  curved.half_width = 1.2;
  curved.at = [k](const Vec2& x) {
    SheetPoint p;
    p.phase = k * std::sin(x[0]);
    p.grad = {k * std::cos(x[0]), 0.0};
    p.hess = {{{-k * std::sin(x[0]), 0.0}, {0.0, 0.0}}};
    p.amplitude = 1.0;
    return p;
  };
  double dist = distortion(curved, 40);
  CHECK(dist > 1.0 + 1e-6);
  CHECK(dist <= std::sqrt(1.0 + k * k));
}
