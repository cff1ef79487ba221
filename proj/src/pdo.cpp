#include "semitorus/pdo.hpp"

#include <cmath>
#include <vector>

#include "semitorus/errors.hpp"
#include "semitorus/fourier.hpp"

namespace semitorus {

namespace {

void check_resolved(const Symbol& a) {
  a.grid().validate();
  if (a.shell_mu2) a.grid().check_shell(*a.shell_mu2);
}

// Fills op(n, m) = coefficient of exp(i k_{n-m} x) in a(., xi_m).
Eigen::MatrixXcd kn_matrix(const GridSpec& g, const std::function<void(int, cplx*)>& column) {
  int size = g.size();
  Eigen::MatrixXcd op(size, size);
  std::vector<cplx> col(size), coef(size);
  double norm = 1.0 / size;
  for (int m = 0; m < size; ++m) {
    column(m, col.data());
    fourier::transform(g.d, g.n, -1, col.data(), coef.data());
    auto sm = g.split(m);
    for (int nn = 0; nn < size; ++nn) {
      auto sn = g.split(nn);
      int k = g.join((sn[0] - sm[0] + g.n) % g.n, g.d == 2 ? (sn[1] - sm[1] + g.n) % g.n : 0);
      op(nn, m) = coef[k] * norm;
    }
  }
  return op;
}

}  // namespace

Eigen::MatrixXcd quantize_kn(const Symbol& a) {
  check_resolved(a);
  return kn_matrix(a.grid(), [&](int m, cplx* out) { a.column(m, out); });
}

PseudoOp quantize(const Symbol& a) {
  check_resolved(a);
  const GridSpec& g = a.grid();
  PseudoOp op;
  op.grid = g;
  op.matrix = kn_matrix(g, [&](int m, cplx* out) { a.column(m, out); });
  Eigen::Index size = op.matrix.rows();
  if (a.real()) {
    for (Eigen::Index i = 0; i < size; ++i) {
      op.matrix(i, i) = op.matrix(i, i).real();
      for (Eigen::Index j = i + 1; j < size; ++j) {
        cplx v = 0.5 * (op.matrix(i, j) + std::conj(op.matrix(j, i)));
        op.matrix(i, j) = v;
        op.matrix(j, i) = std::conj(v);
      }
    }
    op.hermitian = true;
  } else {
    Eigen::MatrixXcd conj_kn = kn_matrix(g, [&](int m, cplx* out) {
      a.column(m, out);
      for (int j = 0; j < g.size(); ++j) out[j] = std::conj(out[j]);
    });
    op.matrix = 0.5 * (op.matrix + conj_kn.adjoint());
    op.hermitian = false;
  }
  return op;
}

Eigen::MatrixXcd kn_symbol(const GridSpec& g, const Eigen::MatrixXcd& op) {
  int size = g.size();
  Eigen::MatrixXcd out(size, size);
  std::vector<cplx> coef(size), col(size);
  for (int m = 0; m < size; ++m) {
    auto sm = g.split(m);
    for (int nn = 0; nn < size; ++nn) {
      auto sn = g.split(nn);
      int k = g.join((sn[0] - sm[0] + g.n) % g.n, g.d == 2 ? (sn[1] - sm[1] + g.n) % g.n : 0);
      coef[k] = op(nn, m);
    }
    fourier::transform(g.d, g.n, +1, coef.data(), col.data());
    for (int j = 0; j < size; ++j) out(j, m) = col[j];
  }
  return out;
}

PseudoOp fourier_multiplier(const GridSpec& grid, const std::function<double(const std::array<double, 2>&)>& f) {
  PseudoOp op;
  op.grid = grid;
  op.matrix = Eigen::MatrixXcd::Zero(grid.size(), grid.size());
  for (int m = 0; m < grid.size(); ++m) op.matrix(m, m) = f(grid.xi(m));
  op.hermitian = true;
  return op;
}

PseudoOp semiclassical_laplacian(const GridSpec& grid) {
  return fourier_multiplier(grid, [](const std::array<double, 2>& xi) { return xi[0] * xi[0] + xi[1] * xi[1]; });
}

WaveFunction apply(const PseudoOp& op, const WaveFunction& psi) {
  if (!(op.grid == psi.grid)) throw ResolutionError("operator and state live on different grids");
  return from_basis(psi.grid, op.matrix * to_basis(psi));
}

double operator_norm(const Eigen::MatrixXcd& a, int max_iter, double tol) {
  Eigen::Index n = a.cols();
  if (n == 0) return 0.0;
  // Deterministic start with every component nonzero.
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(1.0 + 0.37 * std::sin(1.7 * i), 0.29 * std::cos(0.9 * i));
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXcd w = a.adjoint() * (a * v);
    double lam = w.norm();
    if (lam == 0.0) return 0.0;
    v = w / lam;
    double next = std::sqrt(lam);
    if (it > 0 && std::abs(next - est) <= tol * next) {
      est = next;
      break;
    }
    est = next;
  }
  return est;
}

namespace {

// Weights of the fourth-order centred first-derivative stencil, composed `order` times.
std::vector<double> derivative_weights(int order, double step) {
  std::vector<double> w{1.0};
  const double base[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
  for (int k = 0; k < order; ++k) {
    std::vector<double> next(w.size() + 4, 0.0);
    for (size_t i = 0; i < w.size(); ++i)
      for (int s = 0; s < 5; ++s) next[i + s] += w[i] * base[s] / (12.0 * step);
    w = std::move(next);
  }
  return w;  // centred: offset = index - (size-1)/2
}

}  // namespace

double seminorm_probe(const Symbol& a, std::array<int, 2> alpha, std::array<int, 2> beta) {
  const GridSpec& g = a.grid();
  int size = g.size();
  double step = g.h * g.dual_step();
  std::vector<double> w0 = derivative_weights(beta[0], step);
  std::vector<double> w1 = derivative_weights(g.d == 2 ? beta[1] : 0, step);
  int r0 = static_cast<int>(w0.size() - 1) / 2, r1 = static_cast<int>(w1.size() - 1) / 2;
  int order_beta = beta[0] + (g.d == 2 ? beta[1] : 0);
  int weight_power = order_beta - a.symbol_class().order;

  std::vector<cplx> acc(size), col(size), coef(size);
  double best = 0.0;
  for (int m = 0; m < size; ++m) {
    auto fm = g.lattice(m);
    if (fm[0] - r0 < -g.n / 2 || fm[0] + r0 > g.n / 2 - 1) continue;
    if (g.d == 2 && (fm[1] - r1 < -g.n / 2 || fm[1] + r1 > g.n / 2 - 1)) continue;
    std::fill(acc.begin(), acc.end(), cplx(0.0));
    for (int o0 = -r0; o0 <= r0; ++o0) {
      for (int o1 = -r1; o1 <= r1; ++o1) {
        double wt = w0[o0 + r0] * w1[o1 + r1];
        if (wt == 0.0) continue;
        int mm = g.join(g.slot(fm[0] + o0), g.d == 2 ? g.slot(fm[1] + o1) : 0);
        a.column(mm, col.data());
        for (int j = 0; j < size; ++j) acc[j] += wt * col[j];
      }
    }
    if (alpha[0] > 0 || (g.d == 2 && alpha[1] > 0)) {
      fourier::transform(g.d, g.n, -1, acc.data(), coef.data());
      for (int k = 0; k < size; ++k) {
        auto lk = g.lattice(k);
        cplx factor(1.0, 0.0);
        for (int i = 0; i < g.d; ++i)
          for (int p = 0; p < alpha[i]; ++p) factor *= cplx(0.0, lk[i] * g.dual_step());
        // Drop the unpaired Nyquist mode for odd derivatives.
        for (int i = 0; i < g.d; ++i)
          if (lk[i] == -g.n / 2 && alpha[i] % 2 == 1) factor = 0.0;
        coef[k] *= factor / static_cast<double>(size);
      }
      fourier::transform(g.d, g.n, +1, coef.data(), acc.data());
    }
    auto xi = g.xi(m);
    double bracket = std::sqrt(1.0 + xi[0] * xi[0] + xi[1] * xi[1]);
    double weight = std::pow(bracket, weight_power);
    for (int j = 0; j < size; ++j) best = std::max(best, weight * std::abs(acc[j]));
  }
  return best;
}

SymbolInterpolator::SymbolInterpolator(const GridSpec& grid, const Eigen::MatrixXcd& samples)
    : grid_(grid), coeffs_(samples.rows(), samples.cols()) {
  int size = grid.size();
  std::vector<cplx> col(size), coef(size);
  for (int m = 0; m < size; ++m) {
    for (int j = 0; j < size; ++j) col[j] = samples(j, m);
    fourier::transform(grid.d, grid.n, -1, col.data(), coef.data());
    for (int k = 0; k < size; ++k) coeffs_(k, m) = coef[k] / static_cast<double>(size);
  }
}

cplx SymbolInterpolator::operator()(const PhasePoint& p) const {
  const GridSpec& g = grid_;
  double step = g.h * g.dual_step();
  // Five-point Lagrange stencil in each xi axis.
  std::array<std::array<double, 5>, 2> lw{};
  std::array<int, 2> base{};
  for (int i = 0; i < g.d; ++i) {
    double u = p.xi[i] / step;
    int c = static_cast<int>(std::lround(u));
    if (c - 2 < -g.n / 2 || c + 2 > g.n / 2 - 1)
      throw ResolutionError("interpolation point leaves the sampled xi window");
    base[i] = c - 2;
    for (int s = 0; s < 5; ++s) {
      double l = 1.0;
      for (int t = 0; t < 5; ++t)
        if (t != s) l *= (u - (c - 2 + t)) / static_cast<double>(s - t);
      lw[i][s] = l;
    }
  }
  // Trigonometric basis values at x.
  int size = g.size();
  std::vector<cplx> e0(g.n), e1(g.d == 2 ? g.n : 1, cplx(1.0));
  for (int s = 0; s < g.n; ++s) {
    int f = g.freq(s);
    double wt = (f == -g.n / 2) ? 0.0 : 1.0;  // Nyquist split evenly below
    e0[s] = wt * std::polar(1.0, f * g.dual_step() * p.x[0]);
    if (g.d == 2) e1[s] = wt * std::polar(1.0, f * g.dual_step() * p.x[1]);
  }
  int nyq = g.n / 2;
  cplx nyq0 = std::cos(nyq * g.dual_step() * p.x[0]);
  cplx nyq1 = g.d == 2 ? cplx(std::cos(nyq * g.dual_step() * p.x[1])) : cplx(1.0);
  e0[nyq] = nyq0;
  if (g.d == 2) e1[nyq] = nyq1;

  cplx total = 0.0;
  int n1 = g.d == 2 ? 5 : 1;
  for (int s0 = 0; s0 < 5; ++s0) {
    for (int s1 = 0; s1 < n1; ++s1) {
      double wt = lw[0][s0] * (g.d == 2 ? lw[1][s1] : 1.0);
      int m = g.join(g.slot(base[0] + s0), g.d == 2 ? g.slot(base[1] + s1) : 0);
      cplx v = 0.0;
      for (int k = 0; k < size; ++k) {
        auto sk = g.split(k);
        v += coeffs_(k, m) * e0[sk[0]] * (g.d == 2 ? e1[sk[1]] : cplx(1.0));
      }
      total += wt * v;
    }
  }
  return total;
}

}  // namespace semitorus
