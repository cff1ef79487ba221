#include "semitorus/lagdecomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semitorus/bump.hpp"
#include "semitorus/errors.hpp"
#include "semitorus/symbol.hpp"

namespace semitorus {

int sector_count(int d) { return d == 1 ? 2 : 4; }

Lattice rotate_to_sector(int d, int sector, const Lattice& n) {
  if (d == 1) return {sector == 0 ? n[0] : -n[0], 0};
  switch (((sector % 4) + 4) % 4) {
    case 0: return n;
    case 1: return {n[1], -n[0]};
    case 2: return {-n[0], -n[1]};
    default: return {-n[1], n[0]};
  }
}

Lattice rotate_from_sector(int d, int sector, const Lattice& n) {
  if (d == 1) return rotate_to_sector(d, sector, n);
  return rotate_to_sector(d, 4 - (((sector % 4) + 4) % 4), n);
}

double sector_weight(int d, int sector, const Lattice& n, double plateau) {
  Lattice r = rotate_to_sector(d, sector, n);
  if (d == 1) {
    if (n[0] == 0) return sector == 0 ? 1.0 : 0.0;
    return r[0] > 0 ? 1.0 : 0.0;
  }
  if (n[0] == 0 && n[1] == 0) return sector == 0 ? 1.0 : 0.0;
  double theta = std::abs(std::atan2(static_cast<double>(r[1]), static_cast<double>(r[0])));
  if (theta <= plateau) return 1.0;
  double span = 0.5 * M_PI - 2.0 * plateau;
  if (theta >= plateau + span) return 0.0;
  // plateau_value(1 + u) falls from 1 to 0 on u in [0, 1] and is odd about u = 1/2.
  return plateau_value(1.0 + (theta - plateau) / span);
}

bool in_band(const GridSpec& grid, const BandWindow& w, const Lattice& n) {
  Lattice r = rotate_to_sector(grid.d, w.sector, n);
  double sigma = grid.dual_step();
  double target = w.mu_h / (grid.h * sigma);
  if (!(std::abs(r[0] - target) < std::pow(grid.h, -w.epsilon))) return false;
  if (grid.d == 2 && !(std::abs(static_cast<double>(r[1])) < w.rho / (sigma * grid.h))) return false;
  return true;
}

namespace {

double cutoff_value(const GridSpec& g, const BandWindow& w, const std::array<double, 2>& x) {
  double v = 1.0;
  for (int i = 0; i < g.d; ++i) v *= std::pow(0.5 * (1.0 + std::cos(x[i] - w.cutoff_center[i])), w.cutoff_order);
  return v;
}

}  // namespace

BandDecomposition band_decompose(const WaveFunction& psi, const BandWindow& w) {
  const GridSpec& g = psi.grid;
  g.validate();
  if (!(w.plateau > 0.0 && w.plateau < 0.25 * M_PI))
    throw ResolutionError("sector plateau must lie in (0, pi/4)");
  if (w.cutoff_order < 0) throw ResolutionError("cutoff order must be non-negative");
  if (w.sector < 0 || w.sector >= sector_count(g.d)) throw ResolutionError("sector index out of range");

  double sigma = g.dual_step();
  double reach1 = std::abs(w.mu_h / (g.h * sigma)) + std::pow(g.h, -w.epsilon);
  double reach2 = g.d == 2 ? w.rho / (sigma * g.h) : 0.0;
  if (reach1 >= g.n / 2 || reach2 >= g.n / 2)
    throw ResolutionError("band exceeds the Fourier window of the grid");

  BandDecomposition bd;
  bd.grid = g;
  bd.window = w;

  Eigen::VectorXcd c = fft_forward(psi);
  for (int k = 0; k < g.size(); ++k) c[k] *= sector_weight(g.d, w.sector, g.lattice(k), w.plateau);
  WaveFunction filtered = fft_inverse(g, c);
  bd.cutoff = filtered;
  for (int k = 0; k < g.size(); ++k) bd.cutoff.values[k] *= cutoff_value(g, w, g.x(k));

  Eigen::VectorXcd a = fft_forward(bd.cutoff);
  double total = a.squaredNorm(), outside = 0.0, amax = a.cwiseAbs().maxCoeff();
  Eigen::VectorXcd kept = Eigen::VectorXcd::Zero(g.size());
  for (int k = 0; k < g.size(); ++k) {
    Lattice n = g.lattice(k);
    if (!in_band(g, w, n)) {
      outside += std::norm(a[k]);
      continue;
    }
    ++bd.band_size;
    if (std::abs(a[k]) <= 1e-12 * amax) continue;  // FFT round-off
    bd.frequencies.push_back(n);
    bd.coefficients.push_back(a[k]);
    kept[k] = a[k];
  }
  bd.pre_residual = total > 0.0 ? std::sqrt(outside / total) : 0.0;
  if (bd.pre_residual > w.max_pre_residual)
    throw StageError("normal-form", "cutoff state leaves the band: relative out-of-band mass " +
                                        std::to_string(bd.pre_residual));
  bd.cardinality_constant = bd.frequencies.size() * std::pow(g.h, g.d - 1 + w.epsilon);

  WaveFunction rebuilt = fft_inverse(g, kept);
  WaveFunction diff(g);
  diff.values = bd.cutoff.values - rebuilt.values;
  bd.residual_norm = l2_norm(diff);
  bd.parseval_gap = std::abs(kept.norm() - l2_norm(bd.cutoff) / std::sqrt(g.volume()));
  return bd;
}

int class_modulus(double h, double gamma, double epsilon) {
  double x = std::pow(h, gamma - 1.0 - epsilon);
  return static_cast<int>(std::floor(x * (1.0 + 1e-12)));
}

ClassMap group_classes(const BandDecomposition& bd, double gamma, double epsilon) {
  ClassMap cm;
  cm.n_h = class_modulus(bd.grid.h, gamma, epsilon);
  if (cm.n_h < 1) throw FeasibilityError("N_h >= 1", "class modulus h^(gamma-1-epsilon) is below 1");
  for (int i = 0; i < static_cast<int>(bd.frequencies.size()); ++i) {
    Lattice r = rotate_to_sector(bd.grid.d, bd.window.sector, bd.frequencies[i]);
    int m = bd.grid.d == 2 ? ((r[1] % cm.n_h) + cm.n_h) % cm.n_h : 0;
    cm.classes[{r[0], m}].push_back(i);
    cm.kept_n1.insert(r[0]);
  }
  return cm;
}

bool verify_partition(const BandDecomposition& bd, const ClassMap& cm) {
  std::vector<int> hits(bd.frequencies.size(), 0);
  for (const auto& [key, members] : cm.classes)
    for (int i : members) {
      if (i < 0 || i >= static_cast<int>(hits.size())) return false;
      Lattice r = rotate_to_sector(bd.grid.d, bd.window.sector, bd.frequencies[i]);
      int m = bd.grid.d == 2 ? ((r[1] % cm.n_h) + cm.n_h) % cm.n_h : 0;
      if (r[0] != key[0] || m != key[1]) return false;
      ++hits[i];
    }
  return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

WaveFunction evaluate(const GridSpec& grid, const Superposition& s) {
  WaveFunction out(grid);
  for (std::size_t j = 0; j < s.sheets.size(); ++j) {
    const LagrangianSheet& sh = s.sheets[j];
    for (int k = 0; k < grid.size(); ++k) {
      Vec2 x = grid.x(k);
      if (!sh.contains(x)) continue;
      SheetPoint p = sh.at(x);
      out.values[k] += s.weights[j] * p.amplitude * std::exp(cplx(0.0, p.phase / s.h));
    }
  }
  return out;
}

std::vector<ClassSuperposition> classes_to_superpositions(const BandDecomposition& bd, const ClassMap& cm,
                                                          double gamma) {
  const GridSpec& g = bd.grid;
  double sigma = g.dual_step();
  Vec2 center{0.5 * g.length, g.d == 2 ? 0.5 * g.length : 0.0};
  std::vector<ClassSuperposition> out;
  for (const auto& [key, members] : cm.classes) {
    ClassSuperposition cs;
    cs.key = key;
    cs.superposition.h = g.h;
    cs.threshold = std::pow(g.h, gamma);
    cs.separation = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < members.size(); ++a) {
      const Lattice& n = bd.frequencies[members[a]];
      Vec2 xi{g.h * sigma * n[0], g.h * sigma * n[1]};
      // Half width just above L/2 so that every grid point lies on the patch.
      cs.superposition.sheets.push_back(
          linear_sheet(g.d, g.length, center, 0.5 * g.length + 1e-9, xi, [](const Vec2&) { return cplx(1.0); }));
      cs.superposition.weights.push_back(bd.coefficients[members[a]]);
      for (std::size_t b = 0; b < a; ++b) {
        const Lattice& m = bd.frequencies[members[b]];
        double dx = g.h * sigma * (n[0] - m[0]), dy = g.h * sigma * (n[1] - m[1]);
        cs.separation = std::min(cs.separation, std::hypot(dx, dy));
      }
    }
    if (cs.separation < cs.threshold * (1.0 - 1e-12))
      throw StageError("separation", "class (" + std::to_string(key[0]) + ", " + std::to_string(key[1]) +
                                         ") has gradient separation " + std::to_string(cs.separation) +
                                         " below h^gamma = " + std::to_string(cs.threshold));
    WaveFunction gv = evaluate(g, cs.superposition);
    cs.norm_sq = std::pow(l2_norm(gv), 2);
    out.push_back(std::move(cs));
  }
  return out;
}

OrthogonalityReport near_orthogonality(const std::vector<ClassSuperposition>& parts, const WaveFunction& psi) {
  OrthogonalityReport rep;
  double psi2 = std::pow(l2_norm(psi), 2);
  if (psi2 == 0.0) throw ResolutionError("near-orthogonality needs a nonzero state");
  std::vector<Eigen::VectorXcd> vals;
  for (const auto& p : parts) {
    rep.ratio += p.norm_sq;
    vals.push_back(evaluate(psi.grid, p.superposition).values);
  }
  rep.ratio /= psi2;
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      double ni = vals[i].norm(), nj = vals[j].norm();
      if (ni == 0.0 || nj == 0.0) continue;
      rep.max_overlap = std::max(rep.max_overlap, std::abs(vals[i].dot(vals[j])) / (ni * nj));
    }
  return rep;
}

}  // namespace semitorus
