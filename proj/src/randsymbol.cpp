#include "semitorus/randsymbol.hpp"

#include <cmath>

#include "semitorus/bump.hpp"
#include "semitorus/errors.hpp"
#include "semitorus/hamflow.hpp"
#include "semitorus/rng.hpp"

namespace semitorus {

namespace {

double shell_gap(const std::array<double, 2>& xi, double mu1, double mu2) {
  double r = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1]);
  return std::max({0.0, std::sqrt(mu1) - r, r - std::sqrt(mu2)});
}

double point_distance(int d, double length, const PhasePoint& a, const PhasePoint& b) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    double dx = torus_delta(a.x[i] - b.x[i], length);
    double dxi = a.xi[i] - b.xi[i];
    s += dx * dx + dxi * dxi;
  }
  return std::sqrt(s);
}

int floor_div(double v, double s) { return static_cast<int>(std::floor(v / s)); }

}  // namespace

CoveringSpec CoveringSpec::custom(int d, double length, double radius, std::vector<PhasePoint> centers) {
  CoveringSpec c;
  c.d = d;
  c.length = length;
  c.radius = radius;
  c.lattice = false;
  c.centers = std::move(centers);
  return c;
}

void CoveringSpec::rebuild_index() {
  table_.clear();
  if (!lattice) return;
  int w = 2 * xi_half + 1;
  size_t size = d == 1 ? static_cast<size_t>(nx) * w : static_cast<size_t>(nx) * nx * w * w;
  table_.assign(size, -1);
  double sx = length / nx;
  for (size_t j = 0; j < centers.size(); ++j) {
    const auto& c = centers[j];
    std::array<int, 2> ix{static_cast<int>(std::lround(c.x[0] / sx)) % nx,
                          d == 2 ? static_cast<int>(std::lround(c.x[1] / sx)) % nx : 0};
    std::array<int, 2> jx{static_cast<int>(std::lround(c.xi[0] / xi_spacing)),
                          d == 2 ? static_cast<int>(std::lround(c.xi[1] / xi_spacing)) : 0};
    size_t key = d == 1 ? static_cast<size_t>(ix[0]) * w + (jx[0] + xi_half)
                        : ((static_cast<size_t>(ix[0]) * nx + ix[1]) * w + (jx[0] + xi_half)) * w + (jx[1] + xi_half);
    table_[key] = static_cast<int>(j);
  }
}

int CoveringSpec::lattice_index(const std::array<int, 2>& ix, const std::array<int, 2>& jxi) const {
  int w = 2 * xi_half + 1;
  for (int i = 0; i < d; ++i)
    if (jxi[i] < -xi_half || jxi[i] > xi_half) return -1;
  int i0 = ((ix[0] % nx) + nx) % nx;
  int i1 = d == 2 ? ((ix[1] % nx) + nx) % nx : 0;
  size_t key = d == 1 ? static_cast<size_t>(i0) * w + (jxi[0] + xi_half)
                      : ((static_cast<size_t>(i0) * nx + i1) * w + (jxi[0] + xi_half)) * w + (jxi[1] + xi_half);
  return key < table_.size() ? table_[key] : -1;
}

void CoveringSpec::for_each_near(const PhasePoint& p, double reach, const std::function<void(int, double)>& f) const {
  if (!lattice) {
    for (size_t j = 0; j < centers.size(); ++j) {
      double dist = point_distance(d, length, p, centers[j]);
      if (dist < reach) f(static_cast<int>(j), dist);
    }
    return;
  }
  double sx = length / nx;
  std::array<int, 2> xlo{}, xcount{1, 1}, jlo{}, jhi{};
  for (int i = 0; i < d; ++i) {
    xlo[i] = floor_div(p.x[i] - reach, sx);
    xcount[i] = std::min(nx, floor_div(p.x[i] + reach, sx) - xlo[i] + 1);
    jlo[i] = std::max(-xi_half, static_cast<int>(std::ceil((p.xi[i] - reach) / xi_spacing)));
    jhi[i] = std::min(xi_half, static_cast<int>(std::floor((p.xi[i] + reach) / xi_spacing)));
  }
  // Axis-wise pruning on unwrapped offsets; survivors get the exact torus distance.
  const double r2 = reach * reach * (1.0 + 1e-9);
  const std::array<bool, 2> wrap{xcount[0] == nx, d == 2 && xcount[1] == nx};
  for (int a0 = 0; a0 < xcount[0]; ++a0) {
    double dx0 = wrap[0] ? torus_delta(p.x[0] - (xlo[0] + a0) * sx, length) : p.x[0] - (xlo[0] + a0) * sx;
    double s0 = dx0 * dx0;
    if (s0 >= r2) continue;
    for (int a1 = 0; a1 < xcount[1]; ++a1) {
      double dx1 = d == 2 ? p.x[1] - (xlo[1] + a1) * sx : 0.0;
      if (wrap[1]) dx1 = torus_delta(dx1, length);
      double s1 = s0 + dx1 * dx1;
      if (s1 >= r2) continue;
      for (int b0 = jlo[0]; b0 <= jhi[0]; ++b0) {
        double db0 = p.xi[0] - b0 * xi_spacing;
        double s2 = s1 + db0 * db0;
        if (s2 >= r2) continue;
        for (int b1 = (d == 2 ? jlo[1] : 0); b1 <= (d == 2 ? jhi[1] : 0); ++b1) {
          double db1 = d == 2 ? p.xi[1] - b1 * xi_spacing : 0.0;
          if (s2 + db1 * db1 >= r2) continue;
          int j = lattice_index({xlo[0] + a0, xlo[1] + a1}, {b0, b1});
          if (j < 0) continue;
          double dist = point_distance(d, length, p, centers[j]);
          if (dist < reach) f(j, dist);
        }
      }
    }
  }
}

CoveringSpec build_covering(double mu1, double mu2, double beta, double h, const GridSpec& grid) {
  if (!(mu1 > 0.0) || !(mu2 > mu1)) throw ResolutionError("shell needs 0 < mu1 < mu2");
  if (!(beta > 0.0) || !(h > 0.0) || !(h < 1.0)) throw ResolutionError("covering needs beta > 0 and 0 < h < 1");
  CoveringSpec c;
  c.d = grid.d;
  c.length = grid.length;
  c.h = h;
  c.beta = beta;
  c.mu1 = mu1;
  c.mu2 = mu2;
  c.radius = std::pow(h, beta);
  c.lattice = true;
  double s = c.radius / std::sqrt(static_cast<double>(c.d));
  c.xi_spacing = s;
  c.nx = static_cast<int>(std::ceil(c.length / s - 1e-12));
  c.xi_half = static_cast<int>(std::ceil((std::sqrt(mu2) + c.radius) / s));
  double sx = c.length / c.nx;
  int d = c.d;
  int jr = c.xi_half;
  for (int i0 = 0; i0 < c.nx; ++i0)
    for (int i1 = 0; i1 < (d == 2 ? c.nx : 1); ++i1)
      for (int j0 = -jr; j0 <= jr; ++j0)
        for (int j1 = (d == 2 ? -jr : 0); j1 <= (d == 2 ? jr : 0); ++j1) {
          std::array<double, 2> xi{j0 * s, j1 * s};
          if (shell_gap(xi, mu1, mu2) > c.radius) continue;
          PhasePoint p;
          p.x = {i0 * sx, i1 * sx};
          p.xi = xi;
          c.centers.push_back(p);
        }
  c.rebuild_index();

  // Probes: one x-cell (the lattice is x-periodic) times the shell on a 10x finer xi lattice.
  const int fine = 10;
  double fx = sx / fine, fs = s / fine;
  int fr = static_cast<int>(std::ceil(std::sqrt(mu2) / fs));
  std::vector<std::array<double, 2>> xprobe, xiprobe;
  for (int a = 0; a < fine; ++a)
    for (int b = 0; b < (d == 2 ? fine : 1); ++b) xprobe.push_back({(a + 0.5) * fx, d == 2 ? (b + 0.5) * fx : 0.0});
  for (int a = -fr; a <= fr; ++a)
    for (int b = (d == 2 ? -fr : 0); b <= (d == 2 ? fr : 0); ++b) {
      std::array<double, 2> xi{a * fs, b * fs};
      double e = xi[0] * xi[0] + xi[1] * xi[1];
      if (e >= mu1 && e <= mu2) xiprobe.push_back(xi);
    }
  for (const auto& xp : xprobe)
    for (const auto& xq : xiprobe) {
      PhasePoint p;
      p.x = xp;
      p.xi = xq;
      // The nearest lattice node is within the covering radius; fall back to a search.
      std::array<int, 2> ix{static_cast<int>(std::lround(p.x[0] / sx)), static_cast<int>(std::lround(p.x[1] / sx))};
      std::array<int, 2> jx{static_cast<int>(std::lround(p.xi[0] / s)), static_cast<int>(std::lround(p.xi[1] / s))};
      int j = c.lattice_index(ix, jx);
      if (j >= 0 && point_distance(d, c.length, p, c.centers[j]) <= c.radius) continue;
      bool hit = false;
      c.for_each_near(p, c.radius * (1.0 + 1e-12), [&](int, double) { hit = true; });
      if (!hit) throw StageError("covering", "shell probe not within h^beta of any centre");
    }

  // Multiplicity is translation invariant away from the shell edges, so one
  // full lattice cell of probes near the shell suffices.
  double mid = std::sqrt(0.5 * (mu1 + mu2));
  int jm = static_cast<int>(std::floor(mid / s));
  for (int a = 0; a < (d == 2 ? fine * fine : fine); ++a)
    for (int b = 0; b < (d == 2 ? fine * fine : fine); ++b) {
      PhasePoint p;
      p.x = {((d == 2 ? a / fine : a) + 0.5) * fx, d == 2 ? ((a % fine) + 0.5) * fx : 0.0};
      p.xi = {jm * s + ((d == 2 ? b / fine : b) + 0.5) * fs, d == 2 ? ((b % fine) + 0.5) * fs : 0.0};
      int inner = 0, outer = 0;
      c.for_each_near(p, 2.0 * c.radius, [&](int, double dist) {
        ++outer;
        if (dist <= c.radius) ++inner;
      });
      c.multiplicity = std::max(c.multiplicity, inner);
      c.support_multiplicity = std::max(c.support_multiplicity, outer);
    }
  return c;
}

void to_json(nlohmann::json& j, const CoveringSpec& c) {
  nlohmann::json centers = nlohmann::json::array();
  for (const auto& p : c.centers) {
    nlohmann::json x = nlohmann::json::array(), xi = nlohmann::json::array();
    for (int i = 0; i < c.d; ++i) {
      x.push_back(p.x[i]);
      xi.push_back(p.xi[i]);
    }
    centers.push_back({{"x", x}, {"xi", xi}});
  }
  j = nlohmann::json{{"d", c.d},
                     {"L", c.length},
                     {"h", c.h},
                     {"beta", c.beta},
                     {"mu1", c.mu1},
                     {"mu2", c.mu2},
                     {"radius", c.radius},
                     {"lattice", c.lattice},
                     {"nx", c.nx},
                     {"xi_spacing", c.xi_spacing},
                     {"xi_half", c.xi_half},
                     {"multiplicity", c.multiplicity},
                     {"support_multiplicity", c.support_multiplicity},
                     {"centers", centers}};
}

void from_json(const nlohmann::json& j, CoveringSpec& c) {
  c.d = j.at("d").get<int>();
  c.length = j.at("L").get<double>();
  c.h = j.at("h").get<double>();
  c.beta = j.at("beta").get<double>();
  c.mu1 = j.at("mu1").get<double>();
  c.mu2 = j.at("mu2").get<double>();
  c.radius = j.at("radius").get<double>();
  c.lattice = j.at("lattice").get<bool>();
  c.nx = j.at("nx").get<int>();
  c.xi_spacing = j.at("xi_spacing").get<double>();
  c.xi_half = j.at("xi_half").get<int>();
  c.multiplicity = j.at("multiplicity").get<int>();
  c.support_multiplicity = j.at("support_multiplicity").get<int>();
  c.centers.clear();
  for (const auto& e : j.at("centers")) {
    PhasePoint p;
    for (int i = 0; i < c.d; ++i) {
      p.x[i] = e.at("x").at(i).get<double>();
      p.xi[i] = e.at("xi").at(i).get<double>();
    }
    c.centers.push_back(p);
  }
  c.rebuild_index();
}

std::string density_name(Density d) { return d == Density::Uniform ? "uniform" : "raised-cosine"; }

Density density_from_name(const std::string& name) {
  if (name == "uniform") return Density::Uniform;
  if (name == "raised-cosine") return Density::RaisedCosine;
  throw ConfigError("unknown coefficient density '" + name + "' (expected raised-cosine or uniform)");
}

double density_variance(Density d) {
  return d == Density::Uniform ? 1.0 / 3.0 : 1.0 / 3.0 - 2.0 / (M_PI * M_PI);
}

double density_quantile(Density d, double u) {
  if (d == Density::Uniform) return 2.0 * u - 1.0;
  // F(w) = (w + 1)/2 + sin(pi w)/(2 pi); safeguarded Newton on [-1, 1].
  double lo = -1.0, hi = 1.0, w = 2.0 * u - 1.0;
  for (int it = 0; it < 100; ++it) {
    double f = 0.5 * (w + 1.0) + std::sin(M_PI * w) / (2.0 * M_PI) - u;
    if (f > 0) hi = w;
    else lo = w;
    double fp = 0.5 * (1.0 + std::cos(M_PI * w));
    double next = fp > 1e-14 ? w - f / fp : 0.5 * (lo + hi);
    if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (std::abs(next - w) < 1e-15) return next;
    w = next;
  }
  return w;
}

double omega_coefficient(std::uint64_t seed, std::size_t j, Density density) {
  return density_quantile(density, counter_uniform(seed, j, 0x6f6d656761ULL));
}

OmegaDraw draw_omega(const CoveringSpec& cov, std::uint64_t seed, Density density) {
  OmegaDraw w;
  w.seed = seed;
  w.density = density;
  w.omega.resize(cov.centers.size());
  for (size_t j = 0; j < w.omega.size(); ++j) w.omega[j] = omega_coefficient(seed, j, density);
  return w;
}

void to_json(nlohmann::json& j, const OmegaDraw& w) {
  j = nlohmann::json{{"seed", w.seed}, {"density", density_name(w.density)}, {"omega", w.omega}};
}

void from_json(const nlohmann::json& j, OmegaDraw& w) {
  w.seed = j.at("seed").get<std::uint64_t>();
  w.density = density_from_name(j.at("density").get<std::string>());
  w.omega = j.at("omega").get<std::vector<double>>();
}

RandomSymbol::RandomSymbol(std::shared_ptr<const CoveringSpec> cov, OmegaDraw omega)
    : cov_(std::move(cov)), omega_(std::move(omega)) {
  if (omega_.omega.size() != cov_->centers.size())
    throw Error("omega draw length does not match the covering");
}

LocalJet RandomSymbol::bump_jet(int j, const PhasePoint& p, int order) const {
  const CoveringSpec& c = *cov_;
  LocalJet out;
  std::array<double, 4> u{};
  double r2 = 0.0;
  for (int i = 0; i < c.d; ++i) {
    u[i] = torus_delta(p.x[i] - c.centers[j].x[i], c.length);
    u[2 + i] = p.xi[i] - c.centers[j].xi[i];
    r2 += u[i] * u[i] + u[2 + i] * u[2 + i];
  }
  double r = std::sqrt(r2);
  double eps = c.radius;
  Plateau pl = plateau(r / eps);
  out.value = pl.value;
  if (order < 1 || r <= eps) return out;
  for (int i = 0; i < 4; ++i) out.grad[i] = pl.d1 / eps * u[i] / r;
  if (order < 2) return out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double uu = u[a] * u[b];
      out.hess[a][b] = pl.d2 / (eps * eps) * uu / r2 + pl.d1 / eps * ((a == b ? 1.0 / r : 0.0) - uu / (r2 * r));
    }
  return out;
}

LocalJet RandomSymbol::jet(const PhasePoint& p, int order) const {
  LocalJet out;
  cov_->for_each_near(p, 2.0 * cov_->radius, [&](int j, double) {
    double w = omega_.omega[j];
    if (w == 0.0) return;
    LocalJet b = bump_jet(j, p, order);
    out.value += w * b.value;
    for (int a = 0; a < 4; ++a) {
      out.grad[a] += w * b.grad[a];
      for (int c = 0; c < 4; ++c) out.hess[a][c] += w * b.hess[a][c];
    }
  });
  return out;
}

double RandomSymbol::value(const PhasePoint& p) const { return jet(p, 0).value; }

Symbol RandomSymbol::as_symbol(const GridSpec& grid) const {
  // Stamp each bump onto the grid nodes inside its support instead of
  // searching the covering once per node.
  const CoveringSpec& c = *cov_;
  const int size = grid.size();
  const double reach = 2.0 * c.radius;
  Eigen::MatrixXcd samples = Eigen::MatrixXcd::Zero(size, size);
  std::vector<std::array<double, 2>> xs(size), xis(size);
  for (int k = 0; k < size; ++k) {
    xs[k] = grid.x(k);
    xis[k] = grid.xi(k);
  }
  std::vector<std::pair<int, double>> near_x;
  for (std::size_t j = 0; j < c.centers.size(); ++j) {
    double w = omega_.omega[j];
    if (w == 0.0) continue;
    const PhasePoint& q = c.centers[j];
    near_x.clear();
    for (int k = 0; k < size; ++k) {
      double s = 0.0;
      for (int i = 0; i < c.d; ++i) {
        double dx = torus_delta(xs[k][i] - q.x[i], c.length);
        s += dx * dx;
      }
      if (s < reach * reach) near_x.emplace_back(k, s);
    }
    if (near_x.empty()) continue;
    for (int m = 0; m < size; ++m) {
      double t = 0.0;
      for (int i = 0; i < c.d; ++i) t += (xis[m][i] - q.xi[i]) * (xis[m][i] - q.xi[i]);
      if (t >= reach * reach) continue;
      for (const auto& [k, s] : near_x) {
        double r = std::sqrt(s + t);
        if (r < reach) samples(k, m) += w * plateau_value(r / c.radius);
      }
    }
  }
  return Symbol::sampled(grid, std::move(samples), true);
}

FlowAverageReport validate_flow_average(const CoveringSpec& cov, const HamiltonianSpec& kinetic, double horizon,
                                        int samples, double declared_c0) {
  if (samples < 1 || !(horizon > 0.0)) throw Error("flow average needs samples >= 1 and horizon > 0");
  HamiltonianSpec free_flow = kinetic;
  free_flow.delta = 0.0;
  free_flow.perturbation.reset();
  int steps = static_cast<int>(std::ceil(horizon / (cov.radius / 10.0)));
  if (steps % 2) ++steps;
  double dt = horizon / steps;
  FlowAverageReport rep;
  rep.declared_c0 = declared_c0;
  rep.samples = samples;
  rep.c0_hat = std::numeric_limits<double>::infinity();
  const std::uint64_t seed = 0x666c6f77ULL;
  for (int s = 0; s < samples; ++s) {
    PhasePoint p;
    double lam = cov.mu1 + (cov.mu2 - cov.mu1) * counter_uniform(seed, s, 1);
    for (int i = 0; i < cov.d; ++i) p.x[i] = cov.length * counter_uniform(seed, s, 2 + i);
    double speed = std::sqrt(lam);
    if (cov.d == 1) {
      p.xi[0] = counter_uniform(seed, s, 4) < 0.5 ? -speed : speed;
    } else {
      double ang = 2.0 * M_PI * counter_uniform(seed, s, 4);
      p.xi = {speed * std::cos(ang), speed * std::sin(ang)};
    }
    // Rescale onto the requested energy when the metric is warped.
    double c = 2.0 * free_flow.energy(p) / lam;
    if (c > 0) {
      p.xi[0] /= std::sqrt(c);
      p.xi[1] /= std::sqrt(c);
    }
    Trajectory tr = flow(free_flow, p, horizon, dt);
    double integral = 0.0;
    for (size_t k = 0; k < tr.points.size(); ++k) {
      double sum = 0.0;
      cov.for_each_near(tr.points[k], 2.0 * cov.radius, [&](int, double dist) { sum += plateau_value(dist / cov.radius); });
      double w = (k == 0 || k + 1 == tr.points.size()) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      integral += w * sum;
    }
    integral *= dt / 3.0;
    rep.c0_hat = std::min(rep.c0_hat, integral / horizon);
  }
  rep.passed = rep.c0_hat >= declared_c0;
  return rep;
}

}  // namespace semitorus
