#include "semitorus/grid.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "semitorus/errors.hpp"
#include "semitorus/fourier.hpp"

namespace semitorus {

void GridSpec::validate() const {
  if (d != 1 && d != 2) throw ResolutionError("grid dimension must be 1 or 2, got " + std::to_string(d));
  if (n < 8 || (n & (n - 1)) != 0)
    throw ResolutionError("grid size N must be a power of two >= 8, got " + std::to_string(n));
  if (!(length > 0.0)) throw ResolutionError("torus period L must be positive");
  if (!(h > 0.0) || !(h < 1.0)) throw ResolutionError("semiclassical h must lie in (0, 1)");
}

void GridSpec::check_shell(double mu2) const {
  double need = 2.0 * std::sqrt(mu2);
  if (xi_max() < need) {
    std::ostringstream os;
    os << "frequency window |xi| <= " << xi_max() << " does not cover 2*sqrt(mu2) = " << need
       << " (h=" << h << ", N=" << n << ")";
    throw ResolutionError(os.str());
  }
}

void to_json(nlohmann::json& j, const GridSpec& g) {
  j = nlohmann::json{{"d", g.d}, {"N", g.n}, {"L", g.length}, {"h", g.h}};
}

void from_json(const nlohmann::json& j, GridSpec& g) {
  g.d = j.at("d").get<int>();
  g.n = j.at("N").get<int>();
  g.length = j.at("L").get<double>();
  g.h = j.at("h").get<double>();
}

double l2_norm(const WaveFunction& psi) {
  return std::sqrt(psi.grid.cell_volume() * psi.values.squaredNorm());
}

double linf_norm(const WaveFunction& psi) {
  return psi.values.size() ? psi.values.cwiseAbs().maxCoeff() : 0.0;
}

Eigen::VectorXcd fft_forward(const WaveFunction& psi) {
  const auto& g = psi.grid;
  Eigen::VectorXcd out(g.size());
  fourier::transform(g.d, g.n, -1, psi.values.data(), out.data());
  out /= static_cast<double>(g.size());
  return out;
}

WaveFunction fft_inverse(const GridSpec& grid, const Eigen::VectorXcd& coeffs) {
  WaveFunction psi(grid);
  fourier::transform(grid.d, grid.n, +1, coeffs.data(), psi.values.data());
  return psi;
}

Eigen::VectorXcd to_basis(const WaveFunction& psi) {
  const auto& g = psi.grid;
  Eigen::VectorXcd out(g.size());
  fourier::transform(g.d, g.n, -1, psi.values.data(), out.data());
  out /= std::sqrt(static_cast<double>(g.size()));
  return out;
}

WaveFunction from_basis(const GridSpec& grid, const Eigen::VectorXcd& coords) {
  WaveFunction psi(grid);
  fourier::transform(grid.d, grid.n, +1, coords.data(), psi.values.data());
  psi.values /= std::sqrt(static_cast<double>(grid.size()));
  return psi;
}

WaveFunction plane_wave(const GridSpec& grid, std::array<int, 2> m) {
  WaveFunction psi(grid);
  double k = grid.dual_step();
  for (int j = 0; j < grid.size(); ++j) {
    auto x = grid.x(j);
    psi.values[j] = std::polar(1.0, k * (m[0] * x[0] + m[1] * x[1]));
  }
  return psi;
}

namespace {
static_assert(sizeof(float) == 4);

void require_little_endian() {
  if constexpr (std::endian::native != std::endian::little)
    throw Error("binary wavefunction IO assumes a little-endian host");
}
}  // namespace

void write_wavefunction(const std::filesystem::path& path, const WaveFunction& psi) {
  require_little_endian();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  nlohmann::json header = psi.grid;
  out << header.dump() << '\n';
  for (Eigen::Index i = 0; i < psi.values.size(); ++i) {
    float pair[2] = {static_cast<float>(psi.values[i].real()), static_cast<float>(psi.values[i].imag())};
    out.write(reinterpret_cast<const char*>(pair), sizeof pair);
  }
}

WaveFunction read_wavefunction(const std::filesystem::path& path) {
  require_little_endian();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  GridSpec g = nlohmann::json::parse(line).get<GridSpec>();
  g.validate();
  WaveFunction psi(g);
  for (Eigen::Index i = 0; i < psi.values.size(); ++i) {
    float pair[2];
    if (!in.read(reinterpret_cast<char*>(pair), sizeof pair))
      throw Error("truncated wavefunction payload in " + path.string());
    psi.values[i] = cplx(pair[0], pair[1]);
  }
  return psi;
}

void write_modulus_csv(const std::filesystem::path& path, const WaveFunction& psi) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << (psi.grid.d == 1 ? "x,abs\n" : "x,y,abs\n");
  for (int j = 0; j < psi.grid.size(); ++j) {
    auto x = psi.grid.x(j);
    out << x[0] << ',';
    if (psi.grid.d == 2) out << x[1] << ',';
    out << std::abs(psi.values[j]) << '\n';
  }
}

}  // namespace semitorus
