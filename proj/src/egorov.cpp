#include <cmath>

#include "semitorus/errors.hpp"
#include "semitorus/qprop.hpp"

namespace semitorus {

namespace {

// Grid nodes (x_j, xi_m) in the same (j, m) order as symbol samples.
std::vector<PhasePoint> grid_nodes(const GridSpec& g) {
  int size = g.size();
  std::vector<PhasePoint> out(static_cast<size_t>(size) * size);
  for (int m = 0; m < size; ++m)
    for (int j = 0; j < size; ++j) {
      PhasePoint& p = out[static_cast<size_t>(m) * size + j];
      p.x = g.x(j);
      p.xi = g.xi(m);
    }
  return out;
}

void advance(const HamiltonianSpec& spec, std::vector<PhasePoint>& pts, double t, double step) {
  if (t == 0.0) return;
  for (auto& p : pts) p = flow_endpoint(spec, p, t, step);
}

Eigen::MatrixXcd evaluate(const GridSpec& g, const Symbol& a, const std::vector<PhasePoint>& pts) {
  int size = g.size();
  Eigen::MatrixXcd out(size, size);
  for (int m = 0; m < size; ++m)
    for (int j = 0; j < size; ++j) out(j, m) = a.eval(pts[static_cast<size_t>(m) * size + j]);
  return out;
}

// Symbol mass within two lattice rows of the window edge must be negligible.
void check_window(const GridSpec& g, const Eigen::MatrixXcd& samples, const char* what) {
  double peak = samples.cwiseAbs().maxCoeff();
  double edge = 0.0;
  for (int m = 0; m < g.size(); ++m) {
    auto f = g.lattice(m);
    bool near = false;
    for (int i = 0; i < g.d; ++i) near = near || std::abs(f[i]) >= g.n / 2 - 2;
    if (near) edge = std::max(edge, samples.col(m).cwiseAbs().maxCoeff());
  }
  if (edge > 1e-12 * std::max(peak, 1e-300))
    throw ResolutionError(std::string(what) + " reaches the edge of the frequency window");
}

HamiltonianSpec unbounded(HamiltonianSpec spec) {
  spec.xi_window.reset();
  return spec;
}

Eigen::MatrixXcd sym_quantize(const GridSpec& g, const Eigen::MatrixXcd& samples, bool real) {
  return quantize(Symbol::sampled(g, samples, real)).matrix;
}

}  // namespace

EgorovResult egorov_residual(const Propagator& prop, const Symbol& a, double t, const HamiltonianSpec& spec,
                             double step) {
  const GridSpec& g = prop.grid();
  if (!a.has_closed_form()) throw Error("egorov_residual needs a closed-form symbol");
  HamiltonianSpec fl = unbounded(spec);
  std::vector<PhasePoint> pts = grid_nodes(g);
  Eigen::MatrixXcd a0 = evaluate(g, a, pts);
  check_window(g, a0, "test symbol");
  advance(fl, pts, t, step);
  Eigen::MatrixXcd at = evaluate(g, a, pts);
  check_window(g, at, "flowed test symbol");

  Eigen::MatrixXcd heis = prop.conjugate(quantize(a).matrix, -t);
  EgorovResult r;
  r.h = g.h;
  r.t = t;
  r.residual = operator_norm(heis - sym_quantize(g, at, a.real()));
  return r;
}

namespace {

// {p, a}(Phi^s rho) = grad a . X_p at the flowed point, by central differences of a.
cplx poisson_with_flow(const HamiltonianSpec& spec, const Symbol& a, const PhasePoint& q) {
  const double eps = 1e-6;
  PhaseState field = spec.vector_field(to_state(q));
  cplx acc = 0.0;
  for (int i = 0; i < spec.d; ++i) {
    PhasePoint p1 = q, p2 = q;
    p1.x[i] += eps;
    p2.x[i] -= eps;
    acc += (a.eval(p1) - a.eval(p2)) / (2.0 * eps) * field[i];
    p1 = q;
    p2 = q;
    p1.xi[i] += eps;
    p2.xi[i] -= eps;
    acc += (a.eval(p1) - a.eval(p2)) / (2.0 * eps) * field[2 + i];
  }
  return acc;
}

}  // namespace

EgorovRecursion egorov_recursion_terms(const Propagator& prop, const Symbol& a, double t, const HamiltonianSpec& spec,
                                       double step, int nodes) {
  const GridSpec& g = prop.grid();
  if (!a.has_closed_form()) throw Error("egorov recursion needs a closed-form symbol");
  if (nodes < 2 || nodes % 2) throw Error("Simpson rule needs an even number of intervals");
  HamiltonianSpec fl = unbounded(spec);
  int size = g.size();
  const cplx minus_i(0.0, -1.0);
  const Eigen::MatrixXcd& ham = prop.hamiltonian();

  std::vector<PhasePoint> at_s = grid_nodes(g);
  double ds = t / nodes;
  Eigen::MatrixXcd c1 = Eigen::MatrixXcd::Zero(size, size);
  Eigen::MatrixXcd b0;
  for (int k = 0; k <= nodes; ++k) {
    double s = k * ds;
    if (k > 0) advance(fl, at_s, ds, step);
    Eigen::MatrixXcd bs = evaluate(g, a, at_s);
    Eigen::MatrixXcd bracket(size, size);
    for (int m = 0; m < size; ++m)
      for (int j = 0; j < size; ++j) bracket(j, m) = poisson_with_flow(fl, a, at_s[static_cast<size_t>(m) * size + j]);
    Eigen::MatrixXcd b_op = sym_quantize(g, bs, a.real());
    Eigen::MatrixXcd e0_op = g.h * minus_i * sym_quantize(g, bracket, a.real()) - (ham * b_op - b_op * ham);
    SymbolInterpolator e0(g, kn_symbol(g, e0_op));

    // Pull back along Phi^{t-s}.
    std::vector<PhasePoint> pulled = grid_nodes(g);
    advance(fl, pulled, t - s, step);
    double w = (k == 0 || k == nodes) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    for (int m = 0; m < size; ++m)
      for (int j = 0; j < size; ++j) {
        const PhasePoint& p = pulled[static_cast<size_t>(m) * size + j];
        cplx v = 0.0;
        try {
          v = e0(p);
        } catch (const ResolutionError&) {
          v = 0.0;  // outside the sampled window; e0 is microlocalised away from it
        }
        c1(j, m) += w * v;
      }
    if (k == nodes) b0 = bs;
  }
  c1 *= cplx(0.0, 1.0) / g.h * (ds / 3.0);

  EgorovRecursion out;
  out.b0 = b0;
  out.c1 = c1;
  out.c1_sup = c1.cwiseAbs().maxCoeff();
  Eigen::MatrixXcd heis = prop.conjugate(quantize(a).matrix, -t);
  Eigen::MatrixXcd b0_op = sym_quantize(g, b0, a.real());
  Eigen::MatrixXcd c1_kn = quantize_kn(Symbol::sampled(g, c1, false));
  Eigen::MatrixXcd c1_op = 0.5 * (c1_kn + c1_kn.adjoint());
  out.residual0 = operator_norm(heis - b0_op);
  out.residual1 = operator_norm(heis - (b0_op - c1_op));
  return out;
}

}  // namespace semitorus
