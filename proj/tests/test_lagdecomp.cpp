#include <doctest.h>

#include <algorithm>
#include <limits>

#include "semitorus/bump.hpp"
#include "semitorus/errors.hpp"
#include "semitorus/hamflow.hpp"
#include "semitorus/lagdecomp.hpp"
#include "semitorus/randsymbol.hpp"
#include "semitorus/rng.hpp"

using namespace semitorus;

namespace {

WaveFunction waves(const GridSpec& g, const std::vector<Lattice>& freqs) {
  WaveFunction psi(g);
  for (const auto& n : freqs) psi.values += plane_wave(g, n).values;
  return psi;
}

BandWindow window(double mu_h, double epsilon, int cutoff_order) {
  BandWindow w;
  w.mu_h = mu_h;
  w.epsilon = epsilon;
  w.rho = 0.75;
  w.cutoff_order = cutoff_order;
  w.cutoff_center = {M_PI, M_PI};
  return w;
}

HamiltonianSpec flat(int d) {
  HamiltonianSpec s;
  s.d = d;
  return s;
}

double gaussian(double y, double c, double w) { return std::exp(-0.5 * (y - c) * (y - c) / (w * w)); }

}  // namespace

TEST_CASE("a single plane wave decomposes into one coefficient") {
  GridSpec g{1, 64, 2.0 * M_PI, 1.0 / 16.0};
  BandDecomposition bd = band_decompose(plane_wave(g, {12, 0}), window(0.75, 0.5, 0));
  REQUIRE(bd.frequencies.size() == 1);
  CHECK(bd.frequencies[0] == Lattice{12, 0});
  CHECK(std::abs(bd.coefficients[0] - 1.0) < 1e-14);
  CHECK(bd.pre_residual < 1e-14);
  CHECK(bd.residual_norm < 1e-12);
  CHECK(bd.band_size == 7);  // |n - 12| < 4
}

TEST_CASE("out-of-band mass is reported and dropped") {
  GridSpec g{1, 64, 2.0 * M_PI, 1.0 / 16.0};
  BandWindow w = window(0.75, 0.5, 0);
  CHECK_THROWS_AS(band_decompose(waves(g, {{12, 0}, {13, 0}, {25, 0}}), w), StageError);
  w.max_pre_residual = std::numeric_limits<double>::infinity();
  BandDecomposition bd = band_decompose(waves(g, {{12, 0}, {13, 0}, {25, 0}}), w);
  CHECK(bd.frequencies.size() == 2);
  CHECK(bd.pre_residual == doctest::Approx(std::sqrt(1.0 / 3.0)));
  CHECK(bd.residual_norm == doctest::Approx(std::sqrt(2.0 * M_PI)));
  // Negative frequencies belong to the other sector.
  CHECK(bd.frequencies[0][0] > 0);
}

TEST_CASE("band decomposition satisfies Parseval") {
  GridSpec g{2, 32, 2.0 * M_PI, 1.0 / 8.0};
  // Every frequency of the cutoff state stays inside the band.
  BandDecomposition inside = band_decompose(waves(g, {{6, 0}, {6, 1}, {7, -1}}), window(0.75, 0.5, 1));
  CHECK(inside.pre_residual < 1e-14);
  CHECK(inside.parseval_gap < 1e-12);

  WaveFunction psi(g);
  for (int k = 0; k < g.size(); ++k) psi.values[k] = cplx(counter_uniform(2, k, 0) - 0.5, counter_uniform(2, k, 1) - 0.5);
  BandWindow w = window(0.75, 0.5, 1);
  w.max_pre_residual = std::numeric_limits<double>::infinity();
  BandDecomposition bd = band_decompose(psi, w);
  // Oracle: kept coefficients carry the in-band share of the cutoff's mass.
  double kept_sq = 0.0;
  for (const cplx& c : bd.coefficients) kept_sq += std::norm(c);
  double total_sq = std::pow(l2_norm(bd.cutoff), 2) / g.volume();
  CHECK(kept_sq == doctest::Approx(total_sq * (1.0 - bd.pre_residual * bd.pre_residual)).epsilon(1e-10));
  CHECK(bd.parseval_gap == doctest::Approx(std::sqrt(total_sq) - std::sqrt(kept_sq)).epsilon(1e-10));
}

TEST_CASE("band outside the Fourier window is rejected") {
  GridSpec g{1, 16, 2.0 * M_PI, 1.0 / 16.0};
  CHECK_THROWS_AS(band_decompose(plane_wave(g, {3, 0}), window(0.75, 0.5, 0)), ResolutionError);
}

TEST_CASE("sector weights form a partition of unity") {
  for (int n0 = -6; n0 <= 6; ++n0)
    for (int n1 = -6; n1 <= 6; ++n1) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += sector_weight(2, k, {n0, n1}, M_PI / 6.0);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
  CHECK(rotate_from_sector(2, 3, rotate_to_sector(2, 3, {4, -7})) == Lattice{4, -7});
}

TEST_CASE("class modulus") {
  CHECK(class_modulus(0.01, 0.5, 0.05) == 12);
  CHECK(class_modulus(0.01, 1.0, 0.0) == 1);
  CHECK(class_modulus(0.25, 0.5, 0.5) == 4);  // exactly an integer
}

TEST_CASE("classes partition the kept band") {
  GridSpec g{2, 64, 2.0 * M_PI, 1.0 / 16.0};
  WaveFunction psi(g);
  for (int k = 0; k < g.size(); ++k) psi.values[k] = cplx(counter_uniform(3, k, 0) - 0.5, counter_uniform(3, k, 1) - 0.5);
  BandWindow w = window(0.75, 0.5, 1);
  w.max_pre_residual = std::numeric_limits<double>::infinity();
  BandDecomposition bd = band_decompose(psi, w);
  ClassMap cm = group_classes(bd, 0.6, 0.5);
  CHECK(cm.n_h == class_modulus(g.h, 0.6, 0.5));
  CHECK(verify_partition(bd, cm));
  // Brute-force oracle: every index appears exactly once across classes.
  std::vector<int> seen(bd.frequencies.size(), 0);
  for (const auto& [key, members] : cm.classes)
    for (int i : members) ++seen[i];
  CHECK(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));

  ClassMap broken = cm;
  broken.classes.begin()->second.push_back(broken.classes.begin()->second.front());
  CHECK_FALSE(verify_partition(bd, broken));
}

TEST_CASE("separation inside a class is h sigma N_h") {
  GridSpec g{2, 64, 2.0 * M_PI, 1.0 / 16.0};
  BandDecomposition bd;
  bd.grid = g;
  bd.window = window(0.8, 0.5, 0);
  bd.frequencies = {{13, 0}, {13, 12}};
  bd.coefficients = {1.0, 1.0};
  ClassMap cm;
  cm.n_h = 12;
  cm.classes[{13, 0}] = {0, 1};
  auto parts = classes_to_superpositions(bd, cm, 0.15);
  REQUIRE(parts.size() == 1);
  CHECK(parts[0].separation == doctest::Approx(g.h * g.dual_step() * 12));
  CHECK(parts[0].norm_sq == doctest::Approx(2.0 * g.volume()).epsilon(1e-12));
  CHECK_THROWS_AS(classes_to_superpositions(bd, cm, 0.05), StageError);
}

TEST_CASE("superpositions of distinct classes are orthogonal") {
  GridSpec g{2, 32, 2.0 * M_PI, 1.0 / 8.0};
  WaveFunction psi = waves(g, {{6, 0}, {6, 1}, {7, -1}, {5, 2}});
  BandWindow w = window(0.75, 0.5, 0);
  BandDecomposition bd = band_decompose(psi, w);
  ClassMap cm = group_classes(bd, 0.5, 0.5);
  auto parts = classes_to_superpositions(bd, cm, 0.5);
  OrthogonalityReport rep = near_orthogonality(parts, psi);
  CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.max_overlap < 1e-12);
  // Reassembling the parts gives back psi.
  WaveFunction sum(g);
  for (const auto& p : parts) sum.values += evaluate(g, p.superposition).values;
  CHECK((sum.values - psi.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("WKB transport of a linear phase under the free flow") {
  const Vec2 c{M_PI, 0.0}, xi{0.7, 0.0};
  const double t = 0.8;
  LagrangianSheet sheet = linear_sheet(1, 2.0 * M_PI, c, 1.2, xi, [&](const Vec2& y) { return cplx(gaussian(y[0], c[0], 0.3)); });
  WkbOptions opt;
  opt.order = 1;
  for (double x0 : {2.9, 3.6, 4.1}) {
    Vec2 x{x0, 0.0};
    WkbPoint w = wkb_point(sheet, flat(1), t, x, opt);
    CHECK(w.phase == doctest::Approx(xi[0] * x0 - 0.5 * t * xi[0] * xi[0]).epsilon(1e-10));
    CHECK(w.foot[0] == doctest::Approx(x0 - t * xi[0]).epsilon(1e-10));
    CHECK(w.jacobian == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(w.amplitude - gaussian(x0 - t * xi[0], c[0], 0.3)) < 1e-10);
    // First-order amplitude (i t / 2) a''(y).
    double y = x0 - t * xi[0], s = 0.3, u = (y - c[0]) / s;
    double a2 = gaussian(y, c[0], s) * (u * u - 1.0) / (s * s);
    CHECK(std::abs(w.first_order - cplx(0.0, 0.5 * t * a2)) < 1e-5 * std::max(1.0, std::abs(a2)));
  }
}

TEST_CASE("WKB amplitude conserves mass on a spreading quadratic sheet") {
  const double kappa = 0.5, t = 1.0, c = M_PI, width = 0.4;
  LagrangianSheet sheet;
  sheet.d = 1;
  sheet.center = {c, 0.0};
  sheet.half_width = 1.2;
  sheet.at = [=](const Vec2& y) {
    SheetPoint p;
    double u = y[0] - c;
    p.phase = 0.7 * u + 0.5 * kappa * u * u;
    p.grad = {0.7 + kappa * u, 0.0};
    p.hess = {{{kappa, 0.0}, {0.0, 0.0}}};
    p.amplitude = plateau_value(std::abs(u) / width);
    return p;
  };
  // Exact initial mass by fine quadrature.
  const int n = 4000;
  double mass0 = 0.0, mass_t = 0.0;
  for (int k = 0; k < n; ++k) {
    double y = c - 1.2 + 2.4 * (k + 0.5) / n;
    mass0 += std::norm(sheet.at({y, 0.0}).amplitude) * 2.4 / n;
  }
  // The image of [c - 2w, c + 2w] is an interval of length (1 + t kappa) * 4w, shifted by 0.7 t.
  double spread = 1.0 + t * kappa, lo = c + 0.7 * t - spread * 2.0 * width, span = spread * 4.0 * width;
  WkbOptions opt;
  for (int k = 0; k < 400; ++k) {
    double x = lo + span * (k + 0.5) / 400;
    WkbPoint w = wkb_point(sheet, flat(1), t, {x, 0.0}, opt);
    CHECK(w.jacobian == doctest::Approx(spread).epsilon(1e-10));
    mass_t += std::norm(w.amplitude) * span / 400;
  }
  CHECK(mass_t == doctest::Approx(mass0).epsilon(1e-6));
}

TEST_CASE("phase integral: no perturbation, a giant bump, and zeroth vs full order") {
  const double t = 1.0;
  const Vec2 c{M_PI, 0.0};
  LagrangianSheet sheet = linear_sheet(1, 2.0 * M_PI, c, 1.2, {0.7, 0.0}, [](const Vec2&) { return cplx(1.0); });
  WkbOptions opt;
  Vec2 x{c[0] + 0.7 * t, 0.0};

  PhaseIntegral none = phase_integral(sheet, flat(1), t, x, PhaseMode::Zeroth, opt);
  CHECK(none.correction == 0.0);
  CHECK(none.touched.empty());

  PhasePoint centre;
  centre.x = {M_PI, 0.0};
  centre.xi = {0.7, 0.0};
  auto giant = std::make_shared<CoveringSpec>(CoveringSpec::custom(1, 2.0 * M_PI, 100.0, {centre}));
  OmegaDraw one;
  one.omega = {1.0};
  HamiltonianSpec spec = flat(1);
  spec.delta = 0.03;
  spec.perturbation = std::make_shared<RandomSymbol>(giant, one);
  PhaseIntegral z = phase_integral(sheet, spec, t, x, PhaseMode::Zeroth, opt);
  CHECK(z.correction == doctest::Approx(-spec.delta * t).epsilon(1e-10));
  REQUIRE(z.touched.size() == 1);
  CHECK(z.weights[0] == doctest::Approx(t).epsilon(1e-10));

  // Lattice covering: the gap between the modes is second order in delta.
  GridSpec g{1, 128, 2.0 * M_PI, 1.0 / 64.0};
  auto cov = std::make_shared<CoveringSpec>(build_covering(0.36, 0.64, 0.25, g.h, g));
  auto q = std::make_shared<RandomSymbol>(cov, draw_omega(*cov, 9));
  std::vector<double> deltas = {0.02, 0.01, 0.005}, gaps;
  for (double delta : deltas) {
    HamiltonianSpec s = flat(1);
    s.delta = delta;
    s.perturbation = q;
    double zero = phase_integral(sheet, s, t, x, PhaseMode::Zeroth, opt).phase;
    double full = phase_integral(sheet, s, t, x, PhaseMode::Full, opt).phase;
    gaps.push_back(std::abs(full - zero));
  }
  double slope = std::log(gaps.front() / gaps.back()) / std::log(deltas.front() / deltas.back());
  CHECK(slope == doctest::Approx(2.0).epsilon(0.15).scale(0.0));
}
