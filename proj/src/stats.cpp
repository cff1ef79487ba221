#include "semitorus/stats.hpp"

#include <algorithm>
#include <cmath>

#include "semitorus/errors.hpp"
#include "semitorus/parallel.hpp"
#include "semitorus/rng.hpp"

namespace semitorus {

double characteristic_function(Density d, double u) {
  if (d == Density::Uniform) {
    if (std::abs(u) < 1e-8) return 1.0 - u * u / 6.0;
    return std::sin(u) / u;
  }
  // (1 + cos(pi w)) / 2 on [-1, 1]: pi^2 sin(u) / (u (pi^2 - u^2)).
  double p2 = M_PI * M_PI;
  if (std::abs(u) < 1e-6) return 1.0 - u * u * (1.0 / 6.0 - 1.0 / p2);
  if (std::abs(std::abs(u) - M_PI) < 1e-6) {
    // Removable singularity at u = pi: limit is 1/2.
    double e = std::abs(u) - M_PI;
    return 0.5 - e * 0.5 / M_PI;
  }
  return p2 * std::sin(u) / (u * (p2 - u * u));
}

ZModel build_z_model(const Superposition& g, const HamiltonianSpec& spec, double t, const Vec2& x, double g_norm,
                     const WkbOptions& opt) {
  ZModel m;
  m.h = g.h;
  m.delta = spec.delta;
  m.x = x;
  m.g_norm = g_norm;
  HamiltonianSpec free = spec;
  free.delta = 0.0;
  WkbOptions o = opt;
  o.order = 0;
  for (std::size_t j = 0; j < g.sheets.size(); ++j) {
    m.weight_l1 += std::abs(g.weights[j]);
    WkbPoint w = wkb_point(g.sheets[j], free, t, x, o);
    m.base.push_back(g.weights[j] * w.amplitude * std::exp(cplx(0.0, w.phase / g.h)));
    if (spec.perturbed()) {
      PhaseIntegral pi = phase_integral(g.sheets[j], spec, t, x, PhaseMode::Zeroth, o);
      m.deps.push_back(pi.touched);
      m.weights.push_back(pi.weights);
    } else {
      m.deps.emplace_back();
      m.weights.emplace_back();
    }
  }
  return m;
}

ZSample draw_z(const ZModel& m, std::uint64_t seed, Density density) {
  ZSample s;
  s.x = m.x;
  s.dependency_sets = m.deps;
  for (std::size_t j = 0; j < m.base.size(); ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < m.deps[j].size(); ++k)
      acc += omega_coefficient(seed, static_cast<std::size_t>(m.deps[j][k]), density) * m.weights[j][k];
    cplx z = m.base[j] * std::exp(cplx(0.0, -m.delta * acc / m.h));
    s.terms.push_back(z);
    s.total += z;
  }
  return s;
}

cplx exact_mean(const ZModel& m, Density density) {
  cplx total = 0.0;
  for (std::size_t j = 0; j < m.base.size(); ++j) {
    double f = 1.0;
    for (double w : m.weights[j]) f *= characteristic_function(density, -m.delta * w / m.h);
    total += m.base[j] * f;
  }
  return total;
}

namespace {

Eigen::MatrixXd pearson(const std::vector<Eigen::VectorXd>& cols) {
  int n = static_cast<int>(cols.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(n, n);
  std::vector<Eigen::VectorXd> centred;
  std::vector<double> norms;
  for (const auto& v : cols) {
    Eigen::VectorXd u = v.array() - v.mean();
    norms.push_back(u.norm());
    centred.push_back(std::move(u));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      double r = norms[i] > 0.0 && norms[j] > 0.0 ? centred[i].dot(centred[j]) / (norms[i] * norms[j]) : 0.0;
      c(i, j) = c(j, i) = r;
    }
  return c;
}

bool disjoint(const std::vector<int>& a, const std::vector<int>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return false;
    if (*i < *j) ++i;
    else ++j;
  }
  return true;
}

}  // namespace

IndependenceReport independence_check(const std::vector<ZSample>& samples) {
  IndependenceReport rep;
  if (samples.empty()) return rep;
  const auto& deps = samples.front().dependency_sets;
  int n = static_cast<int>(samples.front().terms.size());
  int m = static_cast<int>(samples.size());
  rep.bound = 4.0 / std::sqrt(static_cast<double>(m));
  std::vector<Eigen::VectorXd> re(n, Eigen::VectorXd(m)), im(n, Eigen::VectorXd(m));
  for (int s = 0; s < m; ++s)
    for (int j = 0; j < n; ++j) {
      re[j][s] = samples[s].terms[j].real();
      im[j][s] = samples[s].terms[j].imag();
    }
  rep.corr_re = pearson(re);
  rep.corr_im = pearson(im);
  int disjoint_pairs = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      ++rep.pairs;
      if (!disjoint(deps[i], deps[j])) continue;
      ++disjoint_pairs;
      rep.max_disjoint_corr =
          std::max({rep.max_disjoint_corr, std::abs(rep.corr_re(i, j)), std::abs(rep.corr_im(i, j))});
    }
  rep.disjoint_fraction = rep.pairs > 0 ? static_cast<double>(disjoint_pairs) / rep.pairs : 1.0;
  return rep;
}

ConcentrationReport concentration_check(const std::vector<ZModel>& models, const ConcentrationParams& p) {
  if (p.draws < 1000) throw StageError("draws", "concentration needs at least 1000 draws per h");
  ConcentrationReport rep;
  rep.predicted_slope = p.gamma - (p.d - 1) * (p.beta - p.epsilon) / 2.0;
  double exponent = rep.predicted_slope;
  std::vector<double> hs, ys, ye;
  rep.tail_ok = true;
  for (std::size_t k = 0; k < models.size(); ++k) {
    const ZModel& m = models[k];
    std::vector<cplx> z(p.draws);
    std::vector<double> energy(p.draws);
    parallel_for(p.draws, p.workers, [&](int i) {
      ZSample s = draw_z(m, counter_hash(p.seed, static_cast<std::uint64_t>(i), k + 1), p.density);
      z[i] = s.total;
      double e = 0.0;
      for (const cplx& t : s.terms) e += std::norm(t);
      energy[i] = e;
    });
    ConcentrationPoint pt;
    pt.h = m.h;
    pt.draws = p.draws;
    pt.g_norm = m.g_norm;
    pt.weight_l1 = m.weight_l1;
    pt.mean_bound = m.g_norm * std::sqrt(static_cast<double>(m.base.size()));
    cplx mean = 0.0;
    for (const cplx& v : z) mean += v;
    mean /= static_cast<double>(p.draws);
    pt.mean_abs = std::abs(mean);
    pt.exact_mean_abs = std::abs(exact_mean(m, p.density));
    std::vector<double> mag(p.draws);
    for (int i = 0; i < p.draws; ++i) mag[i] = std::abs(z[i]);
    std::sort(mag.begin(), mag.end());
    auto q = [&](double f) { return mag[std::min(p.draws - 1, static_cast<int>(std::floor(f * (p.draws - 1))))]; };
    pt.q50 = q(0.5);
    pt.q90 = q(0.9);
    pt.q99 = q(0.99);
    pt.qmax = mag.back();
    pt.tail_threshold = std::pow(m.h, -p.epsilon) * (1.0 + std::pow(m.h, exponent)) * m.g_norm;
    int over = static_cast<int>(std::count_if(mag.begin(), mag.end(), [&](double v) { return v > pt.tail_threshold; }));
    pt.tail_fraction = static_cast<double>(over) / p.draws;
    if (pt.tail_fraction > 10.0 / p.draws) rep.tail_ok = false;
    double emax = *std::max_element(energy.begin(), energy.end());
    pt.unitarity_constant = m.g_norm > 0.0 ? emax / (m.g_norm * m.g_norm) : 0.0;
    rep.points.push_back(pt);
    if (m.g_norm > 0.0 && pt.mean_abs > 0.0) {
      hs.push_back(m.h);
      ys.push_back(pt.mean_abs / m.g_norm);
      ye.push_back(std::max(pt.exact_mean_abs, 1e-300) / m.g_norm);
    }
  }
  if (hs.size() >= 2) {
    rep.fit = fit_loglog(hs, ys);
    rep.exact_fit = fit_loglog(hs, ye);
    rep.slope_ci = bootstrap_slope(hs, ys, 1000, p.seed);
    rep.slope_ok = std::abs(rep.fit.slope - rep.predicted_slope) <= p.tolerance;
  }
  return rep;
}

}  // namespace semitorus
