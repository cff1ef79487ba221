#include "semitorus/hamflow.hpp"

#include <cmath>
#include <fstream>

#include "semitorus/errors.hpp"
#include "semitorus/metric.hpp"

namespace semitorus {

PhaseState to_state(const PhasePoint& p) { return {p.x[0], p.x[1], p.xi[0], p.xi[1]}; }

PhasePoint to_point(const PhaseState& s) {
  PhasePoint p;
  p.x = {s[0], s[1]};
  p.xi = {s[2], s[3]};
  return p;
}

LocalJet HamiltonianSpec::jet(const PhasePoint& p, int order) const {
  LocalJet out;
  WarpFactor w = warp_factor(d, length, warp, p.x);
  double xi2 = p.xi[0] * p.xi[0] + p.xi[1] * p.xi[1];
  out.value = 0.5 * w.c * xi2;
  if (order >= 1) {
    for (int i = 0; i < d; ++i) {
      out.grad[i] = 0.5 * w.grad[i] * xi2;
      out.grad[2 + i] = w.c * p.xi[i];
    }
  }
  if (order >= 2) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        out.hess[i][j] = 0.5 * w.hess[i][j] * xi2;
        out.hess[i][2 + j] = w.grad[i] * p.xi[j];
        out.hess[2 + j][i] = out.hess[i][2 + j];
        out.hess[2 + i][2 + j] = i == j ? w.c : 0.0;
      }
  }
  if (perturbed()) {
    LocalJet q = perturbation->jet(p, order);
    out.value += delta * q.value;
    for (int a = 0; a < 4; ++a) {
      out.grad[a] += delta * q.grad[a];
      for (int b = 0; b < 4; ++b) out.hess[a][b] += delta * q.hess[a][b];
    }
  }
  return out;
}

PhaseState HamiltonianSpec::vector_field(const PhaseState& s) const {
  LocalJet j = jet(to_point(s), 1);
  PhaseState f{};
  for (int i = 0; i < d; ++i) {
    f[i] = j.grad[2 + i];
    f[2 + i] = -j.grad[i];
  }
  return f;
}

double HamiltonianSpec::max_step() const {
  if (perturbed()) return perturbation->covering().radius / 10.0;
  if (warp != 0.0) return 0.1;
  return 1.0;
}

namespace {

PhaseState axpy(const PhaseState& a, double s, const PhaseState& b) {
  return {a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]};
}

PhaseState rk4(const HamiltonianSpec& spec, const PhaseState& y, double dt) {
  PhaseState k1 = spec.vector_field(y);
  PhaseState k2 = spec.vector_field(axpy(y, 0.5 * dt, k1));
  PhaseState k3 = spec.vector_field(axpy(y, 0.5 * dt, k2));
  PhaseState k4 = spec.vector_field(axpy(y, dt, k3));
  PhaseState out;
  for (int i = 0; i < 4; ++i) out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

int step_count(const HamiltonianSpec& spec, double t, double step) {
  if (!(step > 0.0)) throw ResolutionError("flow step must be positive");
  if (step > spec.max_step() * (1.0 + 1e-12))
    throw ResolutionError("flow step " + std::to_string(step) + " is coarser than the admissible " +
                          std::to_string(spec.max_step()));
  return std::max(1, static_cast<int>(std::ceil(std::abs(t) / step - 1e-9)));
}

void check_window(const HamiltonianSpec& spec, const PhaseState& y) {
  if (!spec.xi_window) return;
  for (int i = 0; i < spec.d; ++i)
    if (std::abs(y[2 + i]) > *spec.xi_window)
      throw ResolutionError("trajectory leaves the sampled xi window |xi| <= " + std::to_string(*spec.xi_window));
}

}  // namespace

Trajectory flow(const HamiltonianSpec& spec, const PhasePoint& start, double t, double step) {
  int n = step_count(spec, t, step);
  double dt = t / n;
  Trajectory tr;
  PhaseState y = to_state(start);
  double e0 = spec.energy(start);
  tr.t.push_back(0.0);
  tr.points.push_back(start);
  for (int k = 1; k <= n; ++k) {
    y = rk4(spec, y, dt);
    check_window(spec, y);
    PhasePoint p = to_point(y);
    tr.t.push_back(k * dt);
    tr.points.push_back(p);
    tr.energy_drift = std::max(tr.energy_drift, std::abs(spec.energy(p) - e0));
  }
  return tr;
}

PhasePoint flow_endpoint(const HamiltonianSpec& spec, const PhasePoint& start, double t, double step) {
  int n = step_count(spec, t, step);
  double dt = t / n;
  PhaseState y = to_state(start);
  for (int k = 0; k < n; ++k) {
    y = rk4(spec, y, dt);
    check_window(spec, y);
  }
  return to_point(y);
}

void write_trajectory_csv(const std::filesystem::path& path, int d, const HamiltonianSpec& spec, const Trajectory& tr) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "t";
  for (int i = 0; i < d; ++i) out << ",x" << i;
  for (int i = 0; i < d; ++i) out << ",xi" << i;
  out << ",energy\n";
  for (size_t k = 0; k < tr.t.size(); ++k) {
    out << tr.t[k];
    for (int i = 0; i < d; ++i) out << ',' << tr.points[k].x[i];
    for (int i = 0; i < d; ++i) out << ',' << tr.points[k].xi[i];
    out << ',' << spec.energy(tr.points[k]) << '\n';
  }
}

}  // namespace semitorus
