#include <algorithm>
#include <cmath>
#include <set>

#include "semitorus/errors.hpp"
#include "semitorus/lagdecomp.hpp"
#include "semitorus/symbol.hpp"

namespace semitorus {

namespace {

// Composite Simpson on uniform nodes; odd interval counts close with a 3/8 panel.
double integrate_uniform(const std::vector<double>& f, double dt) {
  int n = static_cast<int>(f.size()) - 1;
  if (n <= 0) return 0.0;
  if (n == 1) return 0.5 * dt * (f[0] + f[1]);
  double s = 0.0;
  int simpson_end = n % 2 == 0 ? n : n - 3;
  for (int k = 0; k + 2 <= simpson_end; k += 2) s += dt / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
  if (simpson_end != n) {
    int k = simpson_end;
    s += 3.0 * dt / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
  }
  return s;
}

double effective_step(const HamiltonianSpec& spec, double requested) {
  return std::min(requested, spec.max_step());
}

Eigen::MatrixXd hess_matrix(int d, const Mat2& h) {
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = h[i][j];
  return m;
}

// d x_t / d y for the graph of d phi through the Jacobian of the flow.
Eigen::MatrixXd spread(int d, const Eigen::MatrixXd& jac, const Eigen::MatrixXd& hess) {
  return jac.topLeftCorner(d, d) + jac.topRightCorner(d, d) * hess;
}

std::string where(int d, const Vec2& x) {
  std::string s = "x = (" + std::to_string(x[0]);
  if (d == 2) s += ", " + std::to_string(x[1]);
  return s + ")";
}

cplx laplacian_fd(const LagrangianSheet& sheet, const Vec2& y) {
  double k = 1e-3 * std::max(1e-3, sheet.half_width);
  cplx lap = 0.0;
  for (int i = 0; i < sheet.d; ++i) {
    auto at = [&](double off) {
      Vec2 z = y;
      z[i] += off;
      return sheet.at(z).amplitude;
    };
    lap += (-at(2 * k) + 16.0 * at(k) - 30.0 * at(0.0) + 16.0 * at(-k) - at(-2 * k)) / (12.0 * k * k);
  }
  return lap;
}

}  // namespace

WkbPoint wkb_point(const LagrangianSheet& sheet, const HamiltonianSpec& spec, double t, const Vec2& x,
                   const WkbOptions& opt, const Vec2* guess) {
  const int d = spec.d;
  if (!(sheet.half_width < 0.25 * sheet.length))
    throw StageError("wrap-around", "patch half width " + std::to_string(sheet.half_width) +
                                        " is not below L/4");
  if (opt.order != 0 && opt.order != 1) throw StageError("wkb-order", "only orders 0 and 1 are implemented");
  double step = effective_step(spec, opt.step);

  WkbPoint out;
  out.x = x;
  Vec2 y{};
  if (guess) {
    y = *guess;
  } else {
    SheetPoint sp = sheet.at(x);
    PhasePoint rho;
    rho.x = x;
    rho.xi = sp.grad;
    LocalJet j = spec.jet(rho, 1);
    for (int i = 0; i < d; ++i) y[i] = x[i] - t * j.grad[2 + i];
    if (d == 1) y[1] = 0.0;
  }

  bool converged = false;
  for (int it = 0; it < opt.max_newton; ++it) {
    SheetPoint sp = sheet.at(y);
    PhasePoint start;
    start.x = y;
    start.xi = sp.grad;
    PhasePoint end;
    Eigen::MatrixXd jac = tangent_endpoint(spec, start, t, step, &end);
    Eigen::VectorXd f(d);
    for (int i = 0; i < d; ++i) f[i] = torus_delta(end.x[i] - x[i], sheet.length);
    if (f.norm() < opt.tol) {
      converged = true;
      break;
    }
    Eigen::VectorXd dy = spread(d, jac, hess_matrix(d, sp.hess)).fullPivLu().solve(f);
    double cap = 0.5 * sheet.half_width;
    if (dy.norm() > cap) dy *= cap / dy.norm();
    for (int i = 0; i < d; ++i) y[i] -= dy[i];
  }
  if (!converged) throw StageError("characteristics", "Newton did not converge at " + where(d, x));

  SheetPoint sp = sheet.at(y);
  out.foot = y;
  out.inside = sheet.contains(y);
  PhasePoint start;
  start.x = y;
  start.xi = sp.grad;
  TangentFrame frame = tangent_flow(spec, start, t, step);
  Eigen::MatrixXd hy = hess_matrix(d, sp.hess);
  for (std::size_t k = 1; k < frame.jacobians.size(); ++k) {
    double det = spread(d, frame.jacobians[k], hy).determinant();
    if (!(det > 0.0))
      throw StageError("caustic", "focal point on the ray from " + where(d, y) + " at time " +
                                      std::to_string(frame.trajectory.t[k]));
  }
  const Eigen::MatrixXd& jac = frame.jacobians.back();
  Eigen::MatrixXd dx = spread(d, jac, hy);
  out.jacobian = dx.determinant();

  // Action along the ray.
  std::vector<double> lag;
  lag.reserve(frame.trajectory.points.size());
  for (const PhasePoint& p : frame.trajectory.points) {
    LocalJet j = spec.jet(p, 1);
    double v = -j.value;
    for (int i = 0; i < d; ++i) v += p.xi[i] * j.grad[2 + i];
    lag.push_back(v);
  }
  double dt = frame.trajectory.t.size() > 1 ? frame.trajectory.t[1] - frame.trajectory.t[0] : 0.0;
  out.phase = sp.phase + integrate_uniform(lag, dt);

  const PhasePoint& end = frame.trajectory.points.back();
  out.grad = end.xi;
  Eigen::MatrixXd dxi = jac.bottomLeftCorner(d, d) + jac.bottomRightCorner(d, d) * hy;
  Eigen::MatrixXd h = dxi * dx.inverse();
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) out.hess[i][k] = 0.5 * (h(i, k) + h(k, i));

  out.amplitude = sp.amplitude / std::sqrt(out.jacobian);
  if (opt.order == 1) {
    if (spec.perturbed() || spec.warp != 0.0)
      throw StageError("wkb-order", "first-order amplitude is implemented for the flat unperturbed torus only");
    if (hy.norm() > 1e-12)
      throw StageError("wkb-order", "first-order amplitude is implemented for linear phases only");
    out.first_order = cplx(0.0, 0.5 * t) * laplacian_fd(sheet, y);
  }
  if (!out.inside) {
    out.amplitude = 0.0;
    out.first_order = 0.0;
  }
  return out;
}

std::vector<WkbPoint> wkb_propagate(const LagrangianSheet& sheet, const HamiltonianSpec& spec, double t,
                                    const std::vector<Vec2>& xs, const WkbOptions& opt) {
  std::vector<WkbPoint> out;
  out.reserve(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k == 0) {
      out.push_back(wkb_point(sheet, spec, t, xs[k], opt));
      continue;
    }
    Vec2 guess = out.back().foot;
    for (int i = 0; i < spec.d; ++i) guess[i] += torus_delta(xs[k][i] - xs[k - 1][i], sheet.length);
    out.push_back(wkb_point(sheet, spec, t, xs[k], opt, &guess));
  }
  return out;
}

LagrangianSheet propagated_sheet(const LagrangianSheet& sheet, const HamiltonianSpec& spec, double t,
                                 const WkbOptions& opt) {
  SheetPoint c = sheet.at(sheet.center);
  PhasePoint start;
  start.x = sheet.center;
  start.xi = c.grad;
  PhasePoint end = flow_endpoint(spec, start, t, effective_step(spec, opt.step));
  LagrangianSheet out = sheet;
  for (int i = 0; i < spec.d; ++i) out.center[i] = end.x[i];
  out.at = [sheet, spec, t, opt](const Vec2& x) {
    WkbPoint w = wkb_point(sheet, spec, t, x, opt);
    SheetPoint p;
    p.phase = w.phase;
    p.grad = w.grad;
    p.hess = w.hess;
    p.amplitude = w.amplitude + opt.h * w.first_order;
    return p;
  };
  return out;
}

namespace {

// Distance in the flat product metric from c to the segment [a, b], with the
// x offsets taken through torus_delta relative to a.
double segment_distance(int d, double length, const PhasePoint& a, const PhasePoint& b, const PhasePoint& c) {
  double ab[4] = {}, ac[4] = {};
  for (int i = 0; i < d; ++i) {
    ab[i] = torus_delta(b.x[i] - a.x[i], length);
    ac[i] = torus_delta(c.x[i] - a.x[i], length);
    ab[2 + i] = b.xi[i] - a.xi[i];
    ac[2 + i] = c.xi[i] - a.xi[i];
  }
  double num = 0.0, den = 0.0;
  for (int k = 0; k < 4; ++k) {
    num += ab[k] * ac[k];
    den += ab[k] * ab[k];
  }
  double u = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 0.0;
  double s = 0.0;
  for (int k = 0; k < 4; ++k) s += (ac[k] - u * ab[k]) * (ac[k] - u * ab[k]);
  return std::sqrt(s);
}

}  // namespace

PhaseIntegral phase_integral(const LagrangianSheet& sheet, const HamiltonianSpec& spec, double t, const Vec2& x,
                             PhaseMode mode, const WkbOptions& opt) {
  PhaseIntegral out;
  HamiltonianSpec free = spec;
  free.delta = 0.0;
  WkbOptions base_opt = opt;
  base_opt.order = 0;
  WkbPoint base = wkb_point(sheet, free, t, x, base_opt);
  out.phase = base.phase;
  out.grad = base.grad;
  if (!spec.perturbed()) return out;

  const RandomSymbol& q = *spec.perturbation;
  const CoveringSpec& cov = q.covering();
  double r = cov.radius;
  double step = std::min(opt.step, r / 10.0);
  if (!(step > 0.0)) throw ResolutionError("phase integral needs a positive bump radius");

  PhasePoint start;
  start.x = x;
  const HamiltonianSpec* path_spec = &free;
  if (mode == PhaseMode::Full) {
    WkbPoint full = wkb_point(sheet, spec, t, x, base_opt);
    out.grad = full.grad;
    path_spec = &spec;
  }
  start.xi = out.grad;

  int n = std::max(2, static_cast<int>(std::ceil(std::abs(t) / step - 1e-9)));
  if (n % 2) ++n;
  // Backward in time from s = t to s = 0; the node order does not affect the integrals.
  Trajectory path = flow(*path_spec, start, -t, std::abs(t) / n);
  const auto& pts = path.points;
  out.nodes = static_cast<int>(pts.size());

  std::set<int> touched;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const PhasePoint& a = pts[k];
    const PhasePoint& b = pts[k + 1];
    double seg = 0.0;
    for (int i = 0; i < spec.d; ++i) {
      double dx = torus_delta(b.x[i] - a.x[i], cov.length), dxi = b.xi[i] - a.xi[i];
      seg += dx * dx + dxi * dxi;
    }
    seg = std::sqrt(seg);
    cov.for_each_near(a, 2.0 * r + seg + 1e-12, [&](int j, double) {
      if (segment_distance(spec.d, cov.length, a, b, cov.centers[j]) < 2.0 * r) touched.insert(j);
    });
  }
  out.touched.assign(touched.begin(), touched.end());

  double dt = std::abs(t) / (pts.size() - 1);
  std::vector<double> f(pts.size());
  const auto& omega = q.omega().omega;
  for (int j : out.touched) {
    for (std::size_t k = 0; k < pts.size(); ++k) f[k] = q.bump_jet(j, pts[k], 0).value;
    double w = integrate_uniform(f, dt);
    out.weights.push_back(w);
    out.correction -= spec.delta * omega[j] * w;
  }
  if (t < 0.0) out.correction = -out.correction;
  out.phase += out.correction;
  return out;
}

}  // namespace semitorus
