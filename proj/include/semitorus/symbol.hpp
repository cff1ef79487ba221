#pragma once

#include <functional>
#include <nlohmann/json.hpp>
#include <optional>

#include "semitorus/grid.hpp"

namespace semitorus {

// Membership claim for S^order_eta; used to weight seminorm probes.
struct SymbolClass {
  int order = 0;
  double eta = 0.0;
};

// A symbol a(x, xi) on T*T^d, either given by a closed form or by samples on
// (position grid) x (Fourier lattice). Samples are stored column-major in xi:
// samples(j, m) = a(x_j, xi_m).
class Symbol {
 public:
  using Fn = std::function<cplx(const PhasePoint&)>;

  static Symbol analytic(const GridSpec& grid, Fn fn, bool real, SymbolClass cls = {});
  static Symbol sampled(const GridSpec& grid, Eigen::MatrixXcd samples, bool real, SymbolClass cls = {});
  // Families with a JSON descriptor: "bump", "compact", "gaussian", "plane", "linear",
  // "metric-kinetic".
  static Symbol from_descriptor(const GridSpec& grid, const nlohmann::json& desc);

  const GridSpec& grid() const { return grid_; }
  bool real() const { return real_; }
  const SymbolClass& symbol_class() const { return cls_; }
  const std::optional<nlohmann::json>& descriptor() const { return descriptor_; }

  cplx at(int x_flat, int xi_flat) const;
  cplx eval(const PhasePoint& p) const;  // closed form only
  bool has_closed_form() const { return static_cast<bool>(fn_); }
  // a(x_j, xi_m) for all j, written to out[0..size).
  void column(int xi_flat, cplx* out) const;
  Eigen::MatrixXcd samples() const;

  // Optional energy window; quantize rejects shells the grid cannot resolve.
  std::optional<double> shell_mu2;

 private:
  GridSpec grid_;
  Fn fn_;
  Eigen::MatrixXcd samples_;
  bool real_ = true;
  SymbolClass cls_;
  std::optional<nlohmann::json> descriptor_;
};

// Flat-product distance on T^d x R^d with periodic x.
double phase_distance(const GridSpec& grid, const PhasePoint& a, const PhasePoint& b);
double torus_delta(double dx, double length);

}  // namespace semitorus
