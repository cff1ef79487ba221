#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <vector>

namespace semitorus {

using cplx = std::complex<double>;

// Uniform grid on the flat torus [0, L)^d with N points per axis.
// Flat index layout is row-major with axis 0 slowest, for both the
// position samples and the Fourier lattice.
struct GridSpec {
  int d = 1;
  int n = 64;
  double length = 2.0 * M_PI;
  double h = 0.1;

  // Throws ResolutionError on bad d, N, L or h.
  void validate() const;
  // Throws ResolutionError unless the frequency window resolves the shell
  // |xi|^2 <= mu2 with a factor-2 margin.
  void check_shell(double mu2) const;

  int size() const { return d == 1 ? n : n * n; }
  double spacing() const { return length / n; }
  double cell_volume() const { return d == 1 ? spacing() : spacing() * spacing(); }
  double volume() const { return d == 1 ? length : length * length; }
  double dual_step() const { return 2.0 * M_PI / length; }
  // Largest resolved |xi| along one axis.
  double xi_max() const { return h * (n / 2) * dual_step(); }

  // Signed lattice frequency of a 1-D FFT slot, in [-N/2, N/2).
  int freq(int slot) const { return slot < n / 2 ? slot : slot - n; }
  int slot(int freq_value) const { return ((freq_value % n) + n) % n; }
  std::array<int, 2> split(int flat) const {
    return d == 1 ? std::array<int, 2>{flat, 0} : std::array<int, 2>{flat / n, flat % n};
  }
  int join(int i0, int i1) const { return d == 1 ? i0 : i0 * n + i1; }
  // Lattice vector n of a flat Fourier index.
  std::array<int, 2> lattice(int flat) const {
    auto s = split(flat);
    return {freq(s[0]), d == 2 ? freq(s[1]) : 0};
  }
  // Physical covector xi = h * n * 2pi / L.
  std::array<double, 2> xi(int flat) const {
    auto m = lattice(flat);
    return {h * m[0] * dual_step(), h * m[1] * dual_step()};
  }
  std::array<double, 2> x(int flat) const {
    auto s = split(flat);
    return {s[0] * spacing(), d == 2 ? s[1] * spacing() : 0.0};
  }

  bool operator==(const GridSpec& o) const {
    return d == o.d && n == o.n && length == o.length && h == o.h;
  }
};

void to_json(nlohmann::json& j, const GridSpec& g);
void from_json(const nlohmann::json& j, GridSpec& g);

// A point of T*T^d. Only the first d slots are meaningful.
struct PhasePoint {
  std::array<double, 2> x{};
  std::array<double, 2> xi{};
};

struct WaveFunction {
  GridSpec grid;
  Eigen::VectorXcd values;  // samples at the grid points

  WaveFunction() = default;
  explicit WaveFunction(const GridSpec& g) : grid(g), values(Eigen::VectorXcd::Zero(g.size())) {}
};

// L^2 norm with quadrature weight (L/N)^d.
double l2_norm(const WaveFunction& psi);
double linf_norm(const WaveFunction& psi);

// Fourier-series coefficients c_n with psi(x) = sum_n c_n exp(i k_n . x).
// Parseval: L^d * sum |c_n|^2 = ||psi||_2^2.
Eigen::VectorXcd fft_forward(const WaveFunction& psi);
WaveFunction fft_inverse(const GridSpec& grid, const Eigen::VectorXcd& coeffs);

// Coordinates in the orthonormal Fourier basis used by every dense operator.
Eigen::VectorXcd to_basis(const WaveFunction& psi);
WaveFunction from_basis(const GridSpec& grid, const Eigen::VectorXcd& coords);

WaveFunction plane_wave(const GridSpec& grid, std::array<int, 2> lattice_vector);

// Binary layout: one JSON header line {d,N,L,h} then N^d little-endian
// complex64 pairs (float re, float im).
void write_wavefunction(const std::filesystem::path& path, const WaveFunction& psi);
WaveFunction read_wavefunction(const std::filesystem::path& path);
void write_modulus_csv(const std::filesystem::path& path, const WaveFunction& psi);

}  // namespace semitorus
