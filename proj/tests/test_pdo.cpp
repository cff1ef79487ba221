#include <doctest.h>

#include "semitorus/bump.hpp"
#include "semitorus/errors.hpp"
#include "semitorus/fio.hpp"
#include "semitorus/oscillatory.hpp"
#include "semitorus/pdo.hpp"
#include "semitorus/rng.hpp"

using namespace semitorus;

namespace {

WaveFunction random_state(const GridSpec& g, std::uint64_t seed) {
  WaveFunction psi(g);
  for (int k = 0; k < g.size(); ++k)
    psi.values[k] = cplx(counter_uniform(seed, k, 1) - 0.5, counter_uniform(seed, k, 2) - 0.5);
  return psi;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("constant symbol quantises to the identity") {
  for (int d : {1, 2}) {
    GridSpec g{d, 16, 2.0 * M_PI, 0.1};
    Symbol one = Symbol::analytic(g, [](const PhasePoint&) { return cplx(1.0, 0.0); }, true);
    PseudoOp op = quantize(one);
    CHECK(op.hermitian);
    CHECK(max_abs(op.matrix - Eigen::MatrixXcd::Identity(g.size(), g.size())) < 1e-13);
  }
}

TEST_CASE("xi_1 acts on plane waves by its lattice value") {
  GridSpec g{2, 16, 2.0 * M_PI, 0.125};
  Symbol lin = Symbol::from_descriptor(g, {{"type", "linear"}, {"v", {1.0, 0.0}}});
  PseudoOp op = quantize(lin);
  for (std::array<int, 2> n : {std::array<int, 2>{3, 0}, {-2, 5}, {7, -1}}) {
    WaveFunction e = plane_wave(g, n);
    WaveFunction out = apply(op, e);
    double lambda = g.h * n[0] * g.dual_step();
    CHECK((out.values - lambda * e.values).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("potential V(x) quantises to pointwise multiplication") {
  GridSpec g{1, 64, 2.0 * M_PI, 0.05};
  auto v = [](double x) { return std::exp(std::sin(x)) - 0.3 * std::cos(3.0 * x); };
  Symbol pot = Symbol::analytic(g, [&](const PhasePoint& p) { return cplx(v(p.x[0]), 0.0); }, true);
  WaveFunction u = random_state(g, 5);
  WaveFunction out = apply(quantize(pot), u);
  for (int k = 0; k < g.size(); ++k) CHECK(std::abs(out.values[k] - v(g.x(k)[0]) * u.values[k]) < 1e-12);
}

TEST_CASE("real symbols give Hermitian operators and KN is invertible") {
  GridSpec g{1, 32, 2.0 * M_PI, 0.1};
  Symbol a = Symbol::from_descriptor(g, {{"type", "gaussian"}, {"center", {{"x", {2.0}}, {"xi", {0.4}}}}, {"width", 0.8}});
  PseudoOp op = quantize(a);
  CHECK(max_abs(op.matrix - op.matrix.adjoint()) < 1e-14);
  Eigen::MatrixXcd kn = quantize_kn(a);
  CHECK(max_abs(kn_symbol(g, kn) - a.samples()) < 1e-12);
}

TEST_CASE("unresolved energy window is rejected") {
  GridSpec g{1, 16, 2.0 * M_PI, 0.1};  // xi_max = 0.8
  Symbol a = Symbol::from_descriptor(g, {{"type", "linear"}, {"v", {1.0}}});
  a.shell_mu2 = 1.0;
  CHECK_THROWS_AS(quantize(a), ResolutionError);
}

TEST_CASE("operator norm by power iteration") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
  m(0, 0) = 2.0;
  m(1, 2) = cplx(0.0, -5.0);
  m(2, 1) = 1.0;
  CHECK(operator_norm(m) == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("seminorm probe: constants and trigonometric symbols") {
  GridSpec g{1, 64, 2.0 * M_PI, 0.05};
  Symbol one = Symbol::analytic(g, [](const PhasePoint&) { return cplx(1.0, 0.0); }, true);
  CHECK(seminorm_probe(one, {0, 0}, {0, 0}) == doctest::Approx(1.0));
  CHECK(seminorm_probe(one, {1, 0}, {0, 0}) < 1e-12);
  CHECK(seminorm_probe(one, {0, 0}, {1, 0}) < 1e-10);
  Symbol s = Symbol::analytic(g, [](const PhasePoint& p) { return cplx(std::sin(p.x[0]), 0.0); }, true);
  CHECK(seminorm_probe(s, {1, 0}, {0, 0}) == doctest::Approx(1.0).epsilon(1e-3).scale(0.0));
  CHECK(seminorm_probe(s, {2, 0}, {0, 0}) == doctest::Approx(1.0).epsilon(1e-3).scale(0.0));
}

TEST_CASE("seminorm probe of a shrinking bump scales like 1/radius") {
  // Oracle: sup |plateau'| sampled finely on its transition interval.
  double sup_d1 = 0.0;
  for (int i = 0; i <= 100000; ++i) sup_d1 = std::max(sup_d1, std::abs(plateau(1.0 + i / 100000.0).d1));
  GridSpec g{1, 512, 2.0 * M_PI, 1.0 / 64.0};
  std::vector<double> log_r, log_s;
  for (double r : {0.8, 0.4, 0.2}) {
    Symbol b = Symbol::from_descriptor(g, {{"type", "bump"}, {"center", {{"x", {M_PI}}, {"xi", {0.0}}}}, {"radius", r}});
    double s = seminorm_probe(b, {1, 0}, {0, 0});
    CHECK(s == doctest::Approx(sup_d1 / r).epsilon(0.02).scale(0.0));
    log_r.push_back(std::log(r));
    log_s.push_back(std::log(s));
  }
  double slope = (log_s.back() - log_s.front()) / (log_r.back() - log_r.front());
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.02).scale(0.0));
}

TEST_CASE("plateau profile") {
  CHECK(plateau_value(0.0) == 1.0);
  CHECK(plateau_value(1.0) == 1.0);
  CHECK(plateau_value(2.0) == 0.0);
  CHECK(plateau_value(1.5) == doctest::Approx(0.5));
  double prev = 1.0;
  for (int i = 1; i < 100; ++i) {
    double v = plateau_value(1.0 + i / 100.0);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("oscillatory integrals: zero amplitude, non-stationary and stationary phases") {
  OscillatoryProblem zero{1, 2.0 * M_PI, [](const std::array<double, 2>&) { return 0.0; },
                          [](const std::array<double, 2>& x) { return x[0]; }};
  CHECK(std::abs(oscillatory_integral(zero, 0.1, 64)) == 0.0);

  auto amp_d = [](int d) {
    return [d](const std::array<double, 2>& x) {
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) r2 += (x[i] - M_PI) * (x[i] - M_PI);
      return plateau_value(std::sqrt(r2) / 0.5);
    };
  };
  std::vector<double> wide = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512};
  OscillatoryProblem linear{1, 2.0 * M_PI, amp_d(1), [](const std::array<double, 2>& x) { return x[0]; }};
  CHECK(decay_fit(linear, wide).fit.slope >= 6.0);

  std::vector<double> ladder = {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
  for (int d : {1, 2}) {
    OscillatoryProblem quad{d, 2.0 * M_PI, amp_d(d), [d](const std::array<double, 2>& x) {
                              double s = 0.0;
                              for (int i = 0; i < d; ++i) s += 0.5 * (x[i] - M_PI) * (x[i] - M_PI);
                              return s;
                            }};
    DecayFit f = decay_fit(quad, ladder);
    CHECK(std::abs(f.fit.slope - 0.5 * d) <= 0.05 * 0.5 * d);
    // Stationary phase: |I| ~ (2 pi h)^{d/2} at a nondegenerate critical point.
    CHECK(std::abs(f.magnitude.back() / std::pow(2.0 * M_PI * ladder.back(), 0.5 * d) - 1.0) <= 0.01);
  }
}

TEST_CASE("oscillatory quadrature refuses unresolved phases") {
  OscillatoryProblem p{1, 2.0 * M_PI, [](const std::array<double, 2>& x) { return plateau_value(std::abs(x[0] - M_PI)); },
                       [](const std::array<double, 2>& x) { return x[0]; }};
  CHECK_THROWS_AS(oscillatory_integral(p, 0.01, 16), ResolutionError);
  int n = oscillatory_quadrature_size(p, 0.01);
  CHECK(n >= 4 * 2 * 100 / (2.0 * M_PI));
  CHECK((n & (n - 1)) == 0);
}

TEST_CASE("FIO with generating function x xi is the identity") {
  GridSpec g{1, 64, 2.0 * M_PI, 0.1};
  WaveFunction u = random_state(g, 8);
  FioSpec id{[](double x, double xi) { return x * xi; }, [](double, double) { return cplx(1.0, 0.0); }};
  CHECK((apply_fio(u, id).values - u.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("free shear FIO multiplies plane waves by exp(-i t xi^2 / 2h)") {
  GridSpec g{1, 64, 2.0 * M_PI, 0.1};
  const double t = 0.7;
  FioSpec shear{[t](double x, double xi) { return x * xi - 0.5 * t * xi * xi; },
                [](double, double) { return cplx(1.0, 0.0); }};
  for (int n : {1, -4, 9}) {
    WaveFunction e = plane_wave(g, {n, 0});
    double xi = g.h * n * g.dual_step();
    cplx factor = std::polar(1.0, -0.5 * t * xi * xi / g.h);
    CHECK((apply_fio(e, shear).values - factor * e.values).cwiseAbs().maxCoeff() < 1e-12);
  }
  FioSpec flat{[](double, double xi) { return xi * xi; }, [](double, double) { return cplx(1.0, 0.0); }};
  CHECK_THROWS_AS(apply_fio(plane_wave(g, {1, 0}), flat), StageError);
}
