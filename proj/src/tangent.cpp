#include <cmath>
#include <nlohmann/json.hpp>

#include "semitorus/errors.hpp"
#include "semitorus/hamflow.hpp"

namespace semitorus {

bool LagrangianSheet::contains(const Vec2& x) const {
  for (int i = 0; i < d; ++i)
    if (std::abs(torus_delta(x[i] - center[i], length)) >= half_width) return false;
  return true;
}

std::vector<Vec2> LagrangianSheet::sample_points(int count) const {
  const double a0 = std::sqrt(2.0) - 1.0, a1 = std::sqrt(3.0) - 1.0, a = (std::sqrt(5.0) - 1.0) / 2.0;
  std::vector<Vec2> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    Vec2 x = center;
    if (d == 1) {
      double u = std::fmod((k + 0.5) * a, 1.0);
      x[0] += 0.999 * half_width * (2.0 * u - 1.0);
    } else {
      double u = std::fmod((k + 0.5) * a0, 1.0), v = std::fmod((k + 0.5) * a1, 1.0);
      x[0] += 0.999 * half_width * (2.0 * u - 1.0);
      x[1] += 0.999 * half_width * (2.0 * v - 1.0);
    }
    out.push_back(x);
  }
  return out;
}

LagrangianSheet linear_sheet(int d, double length, Vec2 center, double half_width, Vec2 xi,
                             std::function<std::complex<double>(const Vec2&)> amp) {
  LagrangianSheet s;
  s.d = d;
  s.length = length;
  s.center = center;
  s.half_width = half_width;
  s.at = [xi, amp = std::move(amp)](const Vec2& x) {
    SheetPoint p;
    p.phase = xi[0] * x[0] + xi[1] * x[1];
    p.grad = xi;
    p.amplitude = amp(x);
    return p;
  };
  return s;
}

namespace {

int slot_of(int d, int a) { return a < d ? a : 2 + (a - d); }

Eigen::MatrixXd linearisation(const HamiltonianSpec& spec, const PhaseState& y) {
  int d = spec.d;
  LocalJet j = spec.jet(to_point(y), 2);
  Eigen::MatrixXd a(2 * d, 2 * d);
  // d/dt x = dp/dxi, d/dt xi = -dp/dx
  for (int r = 0; r < 2 * d; ++r)
    for (int c = 0; c < 2 * d; ++c) {
      int sc = slot_of(d, c);
      if (r < d) a(r, c) = j.hess[2 + r][sc];
      else a(r, c) = -j.hess[r - d][sc];
    }
  return a;
}

struct Jet {
  PhaseState y;
  Eigen::MatrixXd m;
};

Jet tangent_rhs(const HamiltonianSpec& spec, const Jet& s) {
  return {spec.vector_field(s.y), linearisation(spec, s.y) * s.m};
}

Jet shift(const Jet& s, double dt, const Jet& k) {
  Jet out = s;
  for (int i = 0; i < 4; ++i) out.y[i] += dt * k.y[i];
  out.m += dt * k.m;
  return out;
}

Jet tangent_rk4(const HamiltonianSpec& spec, const Jet& s, double dt) {
  Jet k1 = tangent_rhs(spec, s);
  Jet k2 = tangent_rhs(spec, shift(s, 0.5 * dt, k1));
  Jet k3 = tangent_rhs(spec, shift(s, 0.5 * dt, k2));
  Jet k4 = tangent_rhs(spec, shift(s, dt, k3));
  Jet out = s;
  for (int i = 0; i < 4; ++i) out.y[i] += dt / 6.0 * (k1.y[i] + 2 * k2.y[i] + 2 * k3.y[i] + k4.y[i]);
  out.m += dt / 6.0 * (k1.m + 2 * k2.m + 2 * k3.m + k4.m);
  return out;
}

int steps_for(const HamiltonianSpec& spec, double t, double step) {
  if (!(step > 0.0)) throw ResolutionError("flow step must be positive");
  if (step > spec.max_step() * (1.0 + 1e-12)) throw ResolutionError("tangent flow step is coarser than admissible");
  return std::max(1, static_cast<int>(std::ceil(std::abs(t) / step - 1e-9)));
}

// Smallest C >= 1 with C exp(C s) >= growth.
double growth_constant(double growth, double s) {
  if (growth <= 1.0 || s <= 0.0) return 1.0;
  double lo = 1.0, hi = 1.0;
  while (hi * std::exp(hi * s) < growth) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid * std::exp(mid * s) < growth) lo = mid;
    else hi = mid;
  }
  return hi;
}

}  // namespace

TangentFrame tangent_flow(const HamiltonianSpec& spec, const PhasePoint& start, double t, double step) {
  int d = spec.d;
  int n = steps_for(spec, t, step);
  double dt = t / n;
  TangentFrame fr;
  Jet s{to_state(start), Eigen::MatrixXd::Identity(2 * d, 2 * d)};
  double e0 = spec.energy(start);
  fr.trajectory.t.push_back(0.0);
  fr.trajectory.points.push_back(start);
  fr.jacobians.push_back(s.m);
  fr.c0 = 1.0;
  for (int k = 1; k <= n; ++k) {
    s = tangent_rk4(spec, s, dt);
    PhasePoint p = to_point(s.y);
    fr.trajectory.t.push_back(k * dt);
    fr.trajectory.points.push_back(p);
    fr.trajectory.energy_drift = std::max(fr.trajectory.energy_drift, std::abs(spec.energy(p) - e0));
    fr.jacobians.push_back(s.m);
    fr.det_error = std::max(fr.det_error, std::abs(s.m.determinant() - 1.0));
    double norm = Eigen::JacobiSVD<Eigen::MatrixXd>(s.m).singularValues()(0);
    fr.c0 = std::max(fr.c0, growth_constant(norm, std::abs(k * dt)));
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(s.m);
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  fr.ftle.resize(2 * d);
  for (int i = 0; i < 2 * d; ++i) fr.ftle[i] = std::log(std::abs(r(i, i))) / std::abs(t);
  std::sort(fr.ftle.data(), fr.ftle.data() + fr.ftle.size(), std::greater<double>());
  return fr;
}

Eigen::MatrixXd tangent_endpoint(const HamiltonianSpec& spec, const PhasePoint& start, double t, double step,
                                 PhasePoint* end) {
  int d = spec.d;
  int n = steps_for(spec, t, step);
  double dt = t / n;
  Jet s{to_state(start), Eigen::MatrixXd::Identity(2 * d, 2 * d)};
  for (int k = 0; k < n; ++k) s = tangent_rk4(spec, s, dt);
  if (end) *end = to_point(s.y);
  return s.m;
}

Splitting local_splitting(const HamiltonianSpec& spec, const PhasePoint& p, double horizon, double step) {
  int d = spec.d;
  Splitting out;
  Eigen::MatrixXd jf = tangent_endpoint(spec, p, horizon, step);
  Eigen::MatrixXd jb = tangent_endpoint(spec, p, -horizon, step);
  Eigen::JacobiSVD<Eigen::MatrixXd> sf(jf, Eigen::ComputeFullV), sb(jb, Eigen::ComputeFullV);
  out.stable = sf.matrixV().col(2 * d - 1);
  out.unstable = sb.matrixV().col(2 * d - 1);
  LocalJet j = spec.jet(p, 1);
  out.flow.resize(2 * d);
  out.transverse.resize(2 * d);
  for (int i = 0; i < d; ++i) {
    out.flow[i] = j.grad[2 + i];
    out.flow[d + i] = -j.grad[i];
    out.transverse[i] = j.grad[i];
    out.transverse[d + i] = j.grad[2 + i];
  }
  out.flow.normalize();
  out.transverse.normalize();
  Eigen::VectorXd sv = sf.singularValues();
  out.gap = d == 2 ? (std::log(sv(0)) - std::log(sv(1))) / horizon : 0.0;
  out.determinate = d == 2 && out.gap >= 1e-3;
  return out;
}

double stable_fraction(const Splitting& s, const Eigen::VectorXd& v) {
  int n = static_cast<int>(v.size());
  if (n == 2) throw StageError("splitting", "one degree of freedom has no stable/unstable splitting");
  Eigen::MatrixXd basis(n, 4);
  basis << s.unstable, s.stable, s.flow, s.transverse;
  Eigen::VectorXd c = basis.fullPivLu().solve(v);
  return std::abs(c(1)) * s.stable.norm() / v.norm();
}

InstabilityReport instability_check(const LagrangianSheet& sheet, const HamiltonianSpec& spec, double eta,
                                    double horizon, double step, int samples) {
  InstabilityReport rep;
  rep.eta = eta;
  rep.samples = samples;
  int d = spec.d;
  for (const Vec2& x : sheet.sample_points(samples)) {
    SheetPoint sp = sheet.at(x);
    PhasePoint rho;
    rho.x = x;
    rho.xi = sp.grad;
    Splitting s = local_splitting(spec, rho, horizon, step);
    if (!s.determinate) {
      ++rep.indeterminate;
      continue;
    }
    Eigen::MatrixXd basis(2 * d, 4);
    basis << s.unstable, s.stable, s.flow, s.transverse;
    Eigen::VectorXd ell = basis.fullPivLu().inverse().row(1).transpose();
    Eigen::MatrixXd tan(2 * d, d);
    for (int i = 0; i < d; ++i) {
      tan.col(i).setZero();
      tan(i, i) = 1.0;
      for (int k = 0; k < d; ++k) tan(d + k, i) = sp.hess[k][i];
    }
    Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(tan).householderQ() * Eigen::MatrixXd::Identity(2 * d, d);
    rep.eta_hat = std::max(rep.eta_hat, (q.transpose() * ell).norm() * s.stable.norm());
  }
  rep.passed = rep.indeterminate == 0 && rep.eta_hat <= eta;
  return rep;
}

double distortion(const LagrangianSheet& sheet, int samples) {
  std::vector<Vec2> pts = sheet.sample_points(samples);
  std::vector<SheetPoint> data;
  data.reserve(pts.size());
  for (const auto& x : pts) data.push_back(sheet.at(x));
  const int sub = 16;
  double worst = 1.0;
  for (size_t a = 0; a < pts.size(); ++a) {
    for (size_t b = a + 1; b < pts.size(); ++b) {
      Vec2 dx{};
      double amb2 = 0.0;
      for (int i = 0; i < sheet.d; ++i) {
        dx[i] = torus_delta(pts[b][i] - pts[a][i], sheet.length);
        double dxi = data[b].grad[i] - data[a].grad[i];
        amb2 += dx[i] * dx[i] + dxi * dxi;
      }
      if (amb2 <= 0.0) continue;
      double len = 0.0;
      for (int k = 0; k <= sub; ++k) {
        double s = static_cast<double>(k) / sub;
        Vec2 x{pts[a][0] + s * dx[0], pts[a][1] + s * dx[1]};
        SheetPoint sp = sheet.at(x);
        double v2 = 0.0;
        for (int i = 0; i < sheet.d; ++i) {
          double dxi = 0.0;
          for (int k2 = 0; k2 < sheet.d; ++k2) dxi += sp.hess[i][k2] * dx[k2];
          v2 += dx[i] * dx[i] + dxi * dxi;
        }
        double w = (k == 0 || k == sub) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        len += w * std::sqrt(v2);
      }
      len /= 3.0 * sub;
      worst = std::max(worst, len / std::sqrt(amb2));
    }
  }
  return worst;
}

nlohmann::json tangent_summary(const TangentFrame& frame) {
  std::vector<double> ftle(frame.ftle.data(), frame.ftle.data() + frame.ftle.size());
  return nlohmann::json{{"ftle", ftle},
                        {"C0", frame.c0},
                        {"det_error", frame.det_error},
                        {"energy_drift", frame.trajectory.energy_drift},
                        {"t_end", frame.trajectory.t.back()}};
}

}  // namespace semitorus
