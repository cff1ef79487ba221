#include "semitorus/supnorm.hpp"

#include <cmath>

#include "semitorus/errors.hpp"

namespace semitorus {

std::string gradient_bound_name(GradientBound g) {
  switch (g) {
    case GradientBound::Sobolev: return "sobolev";
    case GradientBound::Spectral: return "spectral";
    default: return "second_order";
  }
}

GradientBound gradient_bound_from_name(const std::string& name) {
  if (name == "sobolev") return GradientBound::Sobolev;
  if (name == "spectral") return GradientBound::Spectral;
  if (name == "second_order") return GradientBound::SecondOrder;
  throw ConfigError("unknown gradient bound '" + name + "' (sobolev, spectral, second_order)");
}

WaveFunction oversample(const WaveFunction& psi, int factor) {
  if (factor == 1) return psi;
  const GridSpec& g = psi.grid;
  GridSpec fine = g;
  fine.n = g.n * factor;
  Eigen::VectorXcd c = fft_forward(psi);
  Eigen::VectorXcd cf = Eigen::VectorXcd::Zero(fine.size());
  for (int k = 0; k < g.size(); ++k) {
    auto n = g.lattice(k);
    cf[fine.join(fine.slot(n[0]), g.d == 2 ? fine.slot(n[1]) : 0)] = c[k];
  }
  return fft_inverse(fine, cf);
}

namespace {

struct SpectralSums {
  double g0 = 0.0, g1 = 0.0, g2 = 0.0;
  double kmax = 0.0, l2 = 0.0;
  int modes = 0;
};

SpectralSums spectral_sums(const GridSpec& g, const Eigen::VectorXcd& c) {
  SpectralSums s;
  double sigma = g.dual_step();
  double cmax = c.cwiseAbs().maxCoeff();
  for (int k = 0; k < g.size(); ++k) {
    double a = std::abs(c[k]);
    if (a <= 1e-15 * cmax) continue;
    auto n = g.lattice(k);
    double kk = sigma * std::hypot(static_cast<double>(n[0]), static_cast<double>(n[1]));
    s.g0 += a;
    s.g1 += kk * a;
    s.g2 += kk * kk * a;
    s.kmax = std::max(s.kmax, kk);
    s.l2 += a * a;
    ++s.modes;
  }
  s.l2 = std::sqrt(s.l2);
  return s;
}

// Node gradients of psi on the grid of `fine`, from its own coefficients.
std::array<Eigen::VectorXcd, 2> node_gradient(const WaveFunction& fine) {
  const GridSpec& g = fine.grid;
  Eigen::VectorXcd c = fft_forward(fine);
  std::array<Eigen::VectorXcd, 2> out;
  for (int i = 0; i < g.d; ++i) {
    Eigen::VectorXcd ci(g.size());
    for (int k = 0; k < g.size(); ++k) ci[k] = cplx(0.0, g.dual_step() * g.lattice(k)[i]) * c[k];
    out[i] = fft_inverse(g, ci).values;
  }
  if (g.d == 1) out[1] = Eigen::VectorXcd::Zero(g.size());
  return out;
}

}  // namespace

SupnormCertificate supnorm_measure(const WaveFunction& psi, GradientBound mode, double tol, int max_oversampling) {
  const GridSpec& g = psi.grid;
  if (max_oversampling < 1) throw ResolutionError("oversampling factor must be at least 1");
  SupnormCertificate cert;
  cert.mode = mode;
  cert.grid_max = linf_norm(psi);
  Eigen::VectorXcd c = fft_forward(psi);
  SpectralSums s = spectral_sums(g, c);
  for (int factor = 1;; factor *= 2) {
    WaveFunction fine = oversample(psi, factor);
    double rho = g.spacing() / factor * std::sqrt(static_cast<double>(g.d)) / 2.0;
    cert.oversampling = factor;
    cert.linf = linf_norm(fine);
    if (s.modes == 0) {
      cert.upper = cert.linf;
    } else if (mode == GradientBound::SecondOrder) {
      auto grad = node_gradient(fine);
      double hess = 2.0 * (s.g1 * s.g1 + s.g0 * s.g2);
      double best = 0.0;
      for (int k = 0; k < fine.grid.size(); ++k) {
        cplx v = fine.values[k];
        double gx = 2.0 * std::real(std::conj(v) * grad[0][k]);
        double gy = 2.0 * std::real(std::conj(v) * grad[1][k]);
        double bound = std::norm(v) + std::hypot(gx, gy) * rho + 0.5 * hess * rho * rho;
        best = std::max(best, bound);
      }
      cert.upper = std::sqrt(best);
    } else {
      double gbound = mode == GradientBound::Spectral ? s.g1 : s.kmax * std::sqrt(static_cast<double>(s.modes)) * s.l2;
      cert.upper = cert.linf + gbound * rho;
    }
    cert.correction = cert.upper - cert.linf;
    if (cert.correction <= tol * cert.linf || factor * 2 > max_oversampling) break;
  }
  cert.inconclusive = cert.correction > cert.linf;
  return cert;
}

nlohmann::json to_json(const SupnormCertificate& c) {
  return {{"linf", c.linf},
          {"upper", c.upper},
          {"correction", c.correction},
          {"grid_max", c.grid_max},
          {"oversampling", c.oversampling},
          {"mode", gradient_bound_name(c.mode)},
          {"inconclusive", c.inconclusive}};
}

}  // namespace semitorus
