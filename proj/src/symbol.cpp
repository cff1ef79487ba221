#include "semitorus/symbol.hpp"

#include <cmath>

#include "semitorus/bump.hpp"
#include "semitorus/errors.hpp"
#include "semitorus/metric.hpp"

namespace semitorus {

Plateau plateau(double r) {
  Plateau p;
  if (r <= 1.0) {
    p.value = 1.0;
    return p;
  }
  if (r >= 2.0) return p;
  double u = 2.0 - r;
  double a = std::exp(-1.0 / u);
  double b = std::exp(-1.0 / (1.0 - u));
  double s = a + b;
  p.value = a / s;
  double g = 1.0 / (u * u) + 1.0 / ((1.0 - u) * (1.0 - u));
  double sp = a * b * g / (s * s);  // dS/du
  double gp = -2.0 / (u * u * u) + 2.0 / ((1.0 - u) * (1.0 - u) * (1.0 - u));
  double dlog_a = 1.0 / (u * u);
  double dlog_b = -1.0 / ((1.0 - u) * (1.0 - u));
  double dlog_s = (a * dlog_a + b * dlog_b) / s;
  double spp = sp * (dlog_a + dlog_b + gp / g - 2.0 * dlog_s);
  p.d1 = -sp;
  p.d2 = spp;
  return p;
}

WarpFactor warp_factor(int d, double length, double warp, const std::array<double, 2>& x) {
  WarpFactor w;
  if (warp == 0.0) return w;
  double k = 2.0 * M_PI / length;
  if (d == 1) {
    w.c = 1.0 + warp * std::cos(k * x[0]);
    w.grad[0] = -warp * k * std::sin(k * x[0]);
    w.hess[0][0] = -warp * k * k * std::cos(k * x[0]);
    return w;
  }
  // Mixed term breaks separability so the geodesic flow is not integrable.
  double c0 = std::cos(k * x[0]), c1 = std::cos(k * x[1]);
  double s0 = std::sin(k * x[0]), s1 = std::sin(k * x[1]);
  double cm = std::cos(k * (x[0] + x[1])), sm = std::sin(k * (x[0] + x[1]));
  double third = warp / 3.0;
  w.c = 1.0 + third * (c0 + c1 + cm);
  w.grad[0] = -third * k * (s0 + sm);
  w.grad[1] = -third * k * (s1 + sm);
  w.hess[0][0] = -third * k * k * (c0 + cm);
  w.hess[1][1] = -third * k * k * (c1 + cm);
  w.hess[0][1] = w.hess[1][0] = -third * k * k * cm;
  return w;
}

double torus_delta(double dx, double length) {
  dx = std::fmod(dx, length);
  if (dx > 0.5 * length) dx -= length;
  if (dx < -0.5 * length) dx += length;
  return dx;
}

double phase_distance(const GridSpec& grid, const PhasePoint& a, const PhasePoint& b) {
  double s = 0.0;
  for (int i = 0; i < grid.d; ++i) {
    double dx = torus_delta(a.x[i] - b.x[i], grid.length);
    double dxi = a.xi[i] - b.xi[i];
    s += dx * dx + dxi * dxi;
  }
  return std::sqrt(s);
}

Symbol Symbol::analytic(const GridSpec& grid, Fn fn, bool real, SymbolClass cls) {
  Symbol s;
  s.grid_ = grid;
  s.fn_ = std::move(fn);
  s.real_ = real;
  s.cls_ = cls;
  return s;
}

Symbol Symbol::sampled(const GridSpec& grid, Eigen::MatrixXcd samples, bool real, SymbolClass cls) {
  if (samples.rows() != grid.size() || samples.cols() != grid.size())
    throw ResolutionError("symbol samples must be N^d x N^d");
  Symbol s;
  s.grid_ = grid;
  s.samples_ = std::move(samples);
  s.real_ = real;
  s.cls_ = cls;
  return s;
}

namespace {

std::array<double, 2> read_pair(const nlohmann::json& j, int d) {
  std::array<double, 2> v{};
  for (int i = 0; i < d; ++i) v[i] = j.at(i).get<double>();
  return v;
}

}  // namespace

Symbol Symbol::from_descriptor(const GridSpec& grid, const nlohmann::json& desc) {
  std::string type = desc.at("type").get<std::string>();
  int d = grid.d;
  Symbol s;
  if (type == "bump") {
    PhasePoint c;
    c.x = read_pair(desc.at("center").at("x"), d);
    c.xi = read_pair(desc.at("center").at("xi"), d);
    double r = desc.at("radius").get<double>();
    double amp = desc.value("amplitude", 1.0);
    if (!(r > 0.0)) throw ResolutionError("bump radius must be positive");
    s = analytic(grid, [grid, c, r, amp](const PhasePoint& p) {
      return cplx(amp * plateau_value(phase_distance(grid, p, c) / r), 0.0);
    }, true, {0, 0.0});
  } else if (type == "gaussian") {
    PhasePoint c;
    c.x = read_pair(desc.at("center").at("x"), d);
    c.xi = read_pair(desc.at("center").at("xi"), d);
    double w = desc.at("width").get<double>();
    double amp = desc.value("amplitude", 1.0);
    if (!(w > 0.0)) throw ResolutionError("gaussian width must be positive");
    s = analytic(grid, [grid, c, w, amp](const PhasePoint& p) {
      double r = phase_distance(grid, p, c) / w;
      return cplx(amp * std::exp(-0.5 * r * r), 0.0);
    }, true, {0, 0.0});
  } else if (type == "compact") {
    PhasePoint c;
    c.x = read_pair(desc.at("center").at("x"), d);
    c.xi = read_pair(desc.at("center").at("xi"), d);
    double w = desc.at("radius").get<double>();
    double amp = desc.value("amplitude", 1.0);
    if (!(w > 0.0)) throw ResolutionError("compact bump radius must be positive");
    s = analytic(grid, [grid, c, w, amp](const PhasePoint& p) {
      double r = phase_distance(grid, p, c) / w;
      if (r >= 1.0) return cplx(0.0, 0.0);
      return cplx(amp * std::exp(1.0 - 1.0 / (1.0 - r * r)), 0.0);
    }, true, {0, 0.0});
  } else if (type == "plane") {
    std::array<double, 2> m = read_pair(desc.at("m"), d);
    double phase = desc.value("phase", 0.0);
    double amp = desc.value("amplitude", 1.0);
    double k = grid.dual_step();
    s = analytic(grid, [m, phase, amp, k](const PhasePoint& p) {
      return cplx(amp * std::cos(k * (m[0] * p.x[0] + m[1] * p.x[1]) + phase), 0.0);
    }, true, {0, 0.0});
  } else if (type == "linear") {
    std::array<double, 2> v = read_pair(desc.at("v"), d);
    double c0 = desc.value("c", 0.0);
    s = analytic(grid, [v, c0](const PhasePoint& p) {
      return cplx(c0 + v[0] * p.xi[0] + v[1] * p.xi[1], 0.0);
    }, true, {1, 0.0});
  } else if (type == "metric-kinetic") {
    double warp = desc.value("warp", 0.0);
    s = analytic(grid, [grid, warp](const PhasePoint& p) {
      double c = warp_factor(grid.d, grid.length, warp, p.x).c;
      return cplx(0.5 * c * (p.xi[0] * p.xi[0] + p.xi[1] * p.xi[1]), 0.0);
    }, true, {2, 0.0});
  } else {
    throw ResolutionError("unknown symbol family '" + type + "'");
  }
  s.descriptor_ = desc;
  return s;
}

cplx Symbol::eval(const PhasePoint& p) const {
  if (!fn_) throw Error("symbol has no closed form; use at() on grid nodes");
  return fn_(p);
}

cplx Symbol::at(int x_flat, int xi_flat) const {
  if (fn_) {
    PhasePoint p;
    p.x = grid_.x(x_flat);
    p.xi = grid_.xi(xi_flat);
    return fn_(p);
  }
  return samples_(x_flat, xi_flat);
}

void Symbol::column(int xi_flat, cplx* out) const {
  int size = grid_.size();
  if (fn_) {
    PhasePoint p;
    p.xi = grid_.xi(xi_flat);
    for (int j = 0; j < size; ++j) {
      p.x = grid_.x(j);
      out[j] = fn_(p);
    }
  } else {
    for (int j = 0; j < size; ++j) out[j] = samples_(j, xi_flat);
  }
}

Eigen::MatrixXcd Symbol::samples() const {
  if (!fn_) return samples_;
  Eigen::MatrixXcd out(grid_.size(), grid_.size());
  for (int m = 0; m < grid_.size(); ++m) column(m, out.col(m).data());
  return out;
}

}  // namespace semitorus
