#include <doctest.h>

#include <filesystem>

#include "semitorus/errors.hpp"
#include "semitorus/grid.hpp"
#include "semitorus/rng.hpp"

using namespace semitorus;

namespace {

WaveFunction random_state(const GridSpec& g, std::uint64_t seed) {
  WaveFunction psi(g);
  for (int k = 0; k < g.size(); ++k)
    psi.values[k] = cplx(counter_uniform(seed, k, 1) - 0.5, counter_uniform(seed, k, 2) - 0.5);
  return psi;
}

// Direct O(N^2d) Fourier-series coefficients.
cplx direct_coefficient(const WaveFunction& psi, std::array<int, 2> n) {
  const GridSpec& g = psi.grid;
  cplx acc = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    auto x = g.x(k);
    acc += psi.values[k] * std::exp(cplx(0.0, -g.dual_step() * (n[0] * x[0] + n[1] * x[1])));
  }
  return acc / static_cast<double>(g.size());
}

}  // namespace

TEST_CASE("constant function has a single zero-frequency coefficient") {
  GridSpec g{2, 16, 2.0 * M_PI, 0.1};
  WaveFunction one(g);
  one.values.setOnes();
  Eigen::VectorXcd c = fft_forward(one);
  CHECK(std::abs(c[0] - 1.0) < 1e-14);
  CHECK(c.tail(g.size() - 1).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("plane wave (3,0) on N=32 lands on one coefficient") {
  GridSpec g{2, 32, 2.0 * M_PI, 0.1};
  Eigen::VectorXcd c = fft_forward(plane_wave(g, {3, 0}));
  int hit = g.join(g.slot(3), g.slot(0));
  CHECK(std::abs(c[hit] - 1.0) < 1e-13);
  c[hit] = 0.0;
  CHECK(c.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("forward and inverse transforms round trip") {
  for (int d : {1, 2}) {
    GridSpec g{d, 32, 3.0, 0.05};
    WaveFunction psi = random_state(g, 7);
    WaveFunction back = fft_inverse(g, fft_forward(psi));
    CHECK((back.values - psi.values).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("coefficients agree with direct summation and satisfy Parseval") {
  GridSpec g{2, 16, 2.0 * M_PI, 0.1};
  WaveFunction psi = random_state(g, 3);
  Eigen::VectorXcd c = fft_forward(psi);
  double sum_sq = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    CHECK(std::abs(c[k] - direct_coefficient(psi, g.lattice(k))) < 1e-13);
    sum_sq += std::norm(c[k]);
  }
  double l2 = l2_norm(psi);
  CHECK(std::abs(g.volume() * sum_sq - l2 * l2) < 1e-11 * l2 * l2);
}

TEST_CASE("orthonormal basis coordinates preserve the discrete norm") {
  GridSpec g{2, 16, 5.0, 0.1};
  WaveFunction psi = random_state(g, 4);
  Eigen::VectorXcd v = to_basis(psi);
  double l2 = l2_norm(psi);
  CHECK(std::abs(v.squaredNorm() * g.cell_volume() - l2 * l2) < 1e-12);
  CHECK((from_basis(g, v).values - psi.values).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("norms of simple states") {
  GridSpec g{1, 64, 2.0 * M_PI, 0.1};
  WaveFunction one(g);
  one.values.setOnes();
  CHECK(l2_norm(one) == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-14));
  CHECK(linf_norm(one) == doctest::Approx(1.0));
  CHECK(linf_norm(plane_wave(g, {3, 0})) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("aligned sum of K plane waves") {
  GridSpec g{2, 32, 2.0 * M_PI, 0.1};
  const std::vector<std::array<int, 2>> freqs = {{1, 0}, {0, 3}, {-2, 5}, {4, -4}, {7, 1}};
  const int k_modes = static_cast<int>(freqs.size());
  WaveFunction psi(g);
  for (const auto& n : freqs) psi.values += plane_wave(g, n).values;
  CHECK(l2_norm(psi) == doctest::Approx(std::sqrt(k_modes) * 2.0 * M_PI).epsilon(1e-12));
  CHECK(std::abs(psi.values[0]) == doctest::Approx(k_modes));
  // Dense-sampling oracle: direct evaluation on a 4x finer lattice never exceeds K.
  double dense = 0.0;
  int nf = 4 * g.n;
  for (int a = 0; a < nf; ++a)
    for (int b = 0; b < nf; ++b) {
      double x0 = a * g.length / nf, x1 = b * g.length / nf;
      cplx v = 0.0;
      for (const auto& n : freqs) v += std::exp(cplx(0.0, n[0] * x0 + n[1] * x1));
      dense = std::max(dense, std::abs(v));
    }
  CHECK(dense <= k_modes + 1e-12);
  CHECK(linf_norm(psi) == doctest::Approx(dense).epsilon(1e-12));
}

TEST_CASE("grid validation and shell resolution") {
  CHECK_THROWS_AS((GridSpec{1, 48, 1.0, 0.1}.validate()), ResolutionError);
  CHECK_THROWS_AS((GridSpec{3, 16, 1.0, 0.1}.validate()), ResolutionError);
  CHECK_THROWS_AS((GridSpec{1, 16, 1.0, 1.5}.validate()), ResolutionError);
  GridSpec g{1, 64, 2.0 * M_PI, 1.0 / 16.0};  // xi_max = 2
  CHECK_NOTHROW(g.check_shell(1.0));
  CHECK_THROWS_AS(g.check_shell(1.21), ResolutionError);
}

TEST_CASE("binary wavefunction round trip") {
  GridSpec g{2, 8, 2.0, 0.25};
  WaveFunction psi = random_state(g, 9);
  auto path = std::filesystem::temp_directory_path() / "semitorus_wf_test.bin";
  write_wavefunction(path, psi);
  WaveFunction back = read_wavefunction(path);
  std::filesystem::remove(path);
  CHECK(back.grid == g);
  CHECK((back.values - psi.values).cwiseAbs().maxCoeff() < 1e-7);
}
