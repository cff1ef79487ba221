#include "semitorus/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "semitorus/bump.hpp"
#include "semitorus/errors.hpp"
#include "semitorus/parallel.hpp"
#include "semitorus/qprop.hpp"
#include "semitorus/rng.hpp"
#include "semitorus/supnorm.hpp"

namespace semitorus {

namespace {

// Six decimals keep products of denominators inside 64 bits.
Rational as_rational(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return parse_rational(buf);
}

ExperimentReport start_report(const std::string& sub, const ExperimentConfig& c) {
  ExperimentReport r;
  r.subcommand = sub;
  r.config = to_json(c);
  // Scheduling and output location never change results.
  r.config["run"].erase("parallel");
  r.config["run"].erase("out");
  r.seeds = c.effective_seeds();
  return r;
}

std::shared_ptr<const RandomSymbol> perturbation_at(const ExperimentConfig& c, const GridSpec& g, double h,
                                                    std::uint64_t seed) {
  auto cov = std::make_shared<CoveringSpec>(build_covering(c.mu1, c.mu2, c.beta, h, g));
  OmegaDraw w = draw_omega(*cov, seed, c.density);
  return std::make_shared<RandomSymbol>(cov, std::move(w));
}

HamiltonianSpec model_spec(const ExperimentConfig& c, double h, std::shared_ptr<const RandomSymbol> q) {
  HamiltonianSpec s;
  s.d = c.d;
  s.length = c.length;
  s.warp = c.metric == "warped" ? c.warp : 0.0;
  s.delta = q ? c.delta(h) : 0.0;
  s.perturbation = std::move(q);
  return s;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

Lattice wrap_lattice(const GridSpec& g, const Lattice& n) { return {g.slot(n[0]), g.d == 2 ? g.slot(n[1]) : 0}; }

}  // namespace

ShellMode shell_eigenmode(const GridSpec& g, double mu1, double mu2, const std::string& phases, std::uint64_t seed,
                          double plateau) {
  g.validate();
  double s = g.h * g.dual_step();
  int lo = std::max(1, static_cast<int>(std::ceil(mu1 / (s * s) - 1e-9)));
  int hi = static_cast<int>(std::floor(mu2 / (s * s) + 1e-9));
  int lim = g.n / 2 - 1;
  ShellMode best;
  for (int r2 = lo; r2 <= hi; ++r2) {
    std::vector<Lattice> pts;
    if (g.d == 1) {
      int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(r2))));
      if (m * m == r2 && m <= lim) pts = {{-m, 0}, {m, 0}};
    } else {
      for (int a = -lim; a <= lim; ++a) {
        int b2 = r2 - a * a;
        if (b2 < 0) continue;
        int b = static_cast<int>(std::lround(std::sqrt(static_cast<double>(b2))));
        if (b * b != b2 || b > lim) continue;
        if (plateau > 0.0) {
          double lo_c = std::min(std::abs(a), b), hi_c = std::max(std::abs(a), b);
          if (std::atan2(lo_c, hi_c) > plateau - 1e-9) continue;
        }
        pts.push_back({a, b});
        if (b != 0) pts.push_back({a, -b});
      }
    }
    if (pts.size() > best.points.size()) {
      best.points = std::move(pts);
      best.radius_sq = r2;
    }
  }
  if (best.points.empty()) throw ResolutionError("no lattice circle |n|^2 = R^2 inside the shell");
  std::sort(best.points.begin(), best.points.end());
  best.energy = s * s * best.radius_sq;
  Eigen::VectorXcd coeffs = Eigen::VectorXcd::Zero(g.size());
  for (std::size_t k = 0; k < best.points.size(); ++k) {
    cplx v = 1.0;
    if (phases == "random") v = std::exp(cplx(0.0, 2.0 * M_PI * counter_uniform(seed, k, 0x5eed)));
    Lattice w = wrap_lattice(g, best.points[k]);
    coeffs[g.join(w[0], w[1])] = v;
  }
  best.psi = fft_inverse(g, coeffs);
  best.psi.values /= l2_norm(best.psi);
  return best;
}

EgorovLadder egorov_ladder(const EgorovSection& e, double length, double beta, Density density, std::uint64_t seed0,
                           int workers) {
  EgorovLadder out;
  out.beta = beta;
  out.h = e.h;
  out.required_slope = 1.0 - 2.0 * beta - e.tolerance;
  int nh = static_cast<int>(e.h.size());
  int ns = e.seeds_per_h;
  out.per_seed.assign(nh, std::vector<double>(ns, 0.0));
  parallel_for(nh * ns, workers, [&](int task) {
    int k = task / ns, s = task % ns;
    double h = e.h[k];
    GridSpec g{1, e.n, length, h};
    auto cov = std::make_shared<CoveringSpec>(build_covering(e.mu1, e.mu2, beta, h, g));
    HamiltonianSpec spec;
    spec.d = 1;
    spec.length = length;
    spec.delta = std::pow(h, 2.0 * beta + e.alpha_offset);
    spec.perturbation = std::make_shared<RandomSymbol>(cov, draw_omega(*cov, seed0 + s, density));
    Propagator prop(build_hamiltonian(g, spec));
    nlohmann::json desc = {{"type", "gaussian"},
                           {"center", {{"x", nlohmann::json::array({0.5 * length})},
                                       {"xi", nlohmann::json::array({e.symbol_xi})}}},
                           {"width", e.width_factor * std::pow(h, beta)}};
    Symbol a = Symbol::from_descriptor(g, desc);
    out.per_seed[k][s] = egorov_residual(prop, a, e.t, spec, cov->radius / 10.0).residual;
  });
  for (const auto& row : out.per_seed) {
    double acc = 0.0;
    for (double v : row) acc += v;
    out.residual.push_back(acc / ns);
  }
  out.fit = fit_loglog(out.h, out.residual);
  out.passed = out.fit.slope >= out.required_slope && out.fit.r2 >= e.min_r2;
  return out;
}

DecomposeResult decompose_mode(const ShellMode& mode, const DecompositionSection& p) {
  const WaveFunction& psi = mode.psi;
  const GridSpec& g = psi.grid;
  DecomposeResult r;
  r.h = g.h;
  r.radius_sq = mode.radius_sq;
  double norm = l2_norm(psi);
  double mu_h = g.h * g.dual_step() * std::sqrt(static_cast<double>(mode.radius_sq));
  for (int sector = 0; sector < sector_count(g.d); ++sector) {
    BandWindow w;
    w.sector = sector;
    w.mu_h = mu_h;
    w.epsilon = p.epsilon;
    w.rho = p.rho;
    w.plateau = p.plateau;
    w.cutoff_center = {0.5 * g.length, g.d == 2 ? 0.5 * g.length : 0.0};
    w.cutoff_order = p.cutoff_order;
    BandDecomposition bd = band_decompose(psi, w);
    ClassMap cm = group_classes(bd, p.gamma, p.epsilon);
    SectorResult sr;
    sr.sector = sector;
    sr.kept = static_cast<int>(bd.frequencies.size());
    sr.band_size = bd.band_size;
    sr.classes = static_cast<int>(cm.classes.size());
    sr.n_h = cm.n_h;
    sr.pre_residual = bd.pre_residual;
    sr.residual = bd.residual_norm / norm;
    sr.parseval_gap = bd.parseval_gap;
    sr.partition_ok = verify_partition(bd, cm);
    auto parts = classes_to_superpositions(bd, cm, p.gamma);
    sr.min_separation = std::numeric_limits<double>::infinity();
    for (const auto& cs : parts) sr.min_separation = std::min(sr.min_separation, cs.separation);
    r.parts.insert(r.parts.end(), std::make_move_iterator(parts.begin()), std::make_move_iterator(parts.end()));
    r.max_residual = std::max(r.max_residual, sr.residual);
    r.kept_total += sr.kept;
    r.kept_max = std::max(r.kept_max, sr.kept);
    r.partition_ok = r.partition_ok && sr.partition_ok;
    r.sectors.push_back(sr);
  }
  r.orthogonality = near_orthogonality(r.parts, psi);
  r.cardinality_constant = r.kept_max * std::pow(g.h, g.d - 1 + p.epsilon);
  return r;
}

SheetFamily make_sheet_family(int d, double length, double h, int sheets, double xi0, double t, double patch,
                              const Vec2& x) {
  SheetFamily f;
  f.x = x;
  f.g.h = h;
  std::vector<Vec2> dirs;
  if (d == 1) {
    if (sheets > 2) throw ConfigError("at most 2 sheets in d = 1");
    dirs = {Vec2{xi0, 0.0}, Vec2{-xi0, 0.0}};
    dirs.resize(sheets);
  } else {
    for (int j = 0; j < sheets; ++j) {
      double th = 2.0 * M_PI * j / sheets + 0.25;
      dirs.push_back({xi0 * std::cos(th), xi0 * std::sin(th)});
    }
  }
  auto wrap = [length](double v) { return v - length * std::floor(v / length); };
  for (const Vec2& xi : dirs) {
    Vec2 c{wrap(x[0] - t * xi[0]), d == 2 ? wrap(x[1] - t * xi[1]) : 0.0};
    double scale = 0.5 * patch;
    auto amp = [c, scale, length, d](const Vec2& y) {
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) {
        double dy = torus_delta(y[i] - c[i], length);
        r2 += dy * dy;
      }
      return cplx(plateau_value(std::sqrt(r2) / scale), 0.0);
    };
    f.g.sheets.push_back(linear_sheet(d, length, c, patch, xi, amp));
    f.g.weights.push_back(1.0 / std::sqrt(static_cast<double>(sheets)));
  }
  f.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dirs.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      f.min_separation = std::min(f.min_separation, std::hypot(dirs[i][0] - dirs[j][0], dirs[i][1] - dirs[j][1]));
  // Quadrature grid resolving xi0 / h with a factor 4 margin.
  int nq = 64;
  while (nq < 8.0 * xi0 * length / (2.0 * M_PI * h)) nq *= 2;
  GridSpec q{d, nq, length, h};
  f.g_norm = l2_norm(evaluate(q, f.g));
  return f;
}

ExperimentReport run_validate(const ExperimentConfig& c) {
  ExperimentReport r = start_report("validate", c);
  validate_config(c);
  ExponentBudget b = gamma_prime(as_rational(c.alpha), as_rational(c.beta), c.d);
  r.measurements.push_back({{"budget", to_json(b)}});
  r.gate("feasibility", true);
  return r;
}

ExperimentReport run_quantize_check(const ExperimentConfig& c) {
  validate_config(c);
  ExperimentReport r = start_report("quantize-check", c);
  const double tol = 1e-10;
  double worst_herm = 0.0, worst_kn = 0.0, worst_mult = 0.0, worst_x = 0.0, worst_affine = 0.0, worst_ham = 0.0;
  std::uint64_t seed = r.seeds.front();
  for (double h : c.h) {
    GridSpec g{c.d, c.quantize_n, c.length, h};
    double xi_mid = std::sqrt(0.5 * (c.mu1 + c.mu2));
    nlohmann::json desc = {{"type", "gaussian"}, {"width", 0.5}};
    if (c.d == 1)
      desc["center"] = {{"x", nlohmann::json::array({0.5 * c.length})}, {"xi", nlohmann::json::array({xi_mid})}};
    else
      desc["center"] = {{"x", nlohmann::json::array({0.5 * c.length, 0.5 * c.length})},
                        {"xi", nlohmann::json::array({xi_mid, 0.0})}};
    Symbol a = Symbol::from_descriptor(g, desc);
    PseudoOp op = quantize(a);
    double herm = max_abs(op.matrix - op.matrix.adjoint()) / std::max(max_abs(op.matrix), 1e-300);

    Eigen::MatrixXcd kn = quantize_kn(a);
    double kn_err = max_abs(kn_symbol(g, kn) - a.samples());

    Symbol kin = Symbol::analytic(
        g, [](const PhasePoint& p) { return cplx(0.5 * (p.xi[0] * p.xi[0] + p.xi[1] * p.xi[1]), 0.0); }, true);
    PseudoOp mult =
        fourier_multiplier(g, [](const std::array<double, 2>& xi) { return 0.5 * (xi[0] * xi[0] + xi[1] * xi[1]); });
    double mult_err = max_abs(quantize(kin).matrix - mult.matrix);

    // x-only symbol: multiplication at the grid nodes.
    auto f = [&](const PhasePoint& p) { return std::cos(p.x[0]) + (c.d == 2 ? 0.5 * std::sin(2.0 * p.x[1]) : 0.0); };
    Symbol fx = Symbol::analytic(g, [&](const PhasePoint& p) { return cplx(f(p), 0.0); }, true);
    WaveFunction u(g);
    for (int k = 0; k < g.size(); ++k)
      u.values[k] = cplx(counter_uniform(seed, k, 1) - 0.5, counter_uniform(seed, k, 2) - 0.5);
    WaveFunction fu = apply(quantize(fx), u);
    double x_err = 0.0;
    for (int k = 0; k < g.size(); ++k) {
      PhasePoint p;
      p.x = g.x(k);
      x_err = std::max(x_err, std::abs(fu.values[k] - f(p) * u.values[k]));
    }

    // f(x) xi_1 quantises to (f hD + hD f) / 2.
    Symbol lin = Symbol::analytic(g, [&](const PhasePoint& p) { return cplx(f(p) * p.xi[0], 0.0); }, true);
    PseudoOp hd = fourier_multiplier(g, [](const std::array<double, 2>& xi) { return xi[0]; });
    WaveFunction fu_pt(g);
    for (int k = 0; k < g.size(); ++k) {
      PhasePoint p;
      p.x = g.x(k);
      fu_pt.values[k] = f(p) * u.values[k];
    }
    WaveFunction du = apply(hd, u);
    WaveFunction dfu = apply(hd, fu_pt);
    WaveFunction lu = apply(quantize(lin), u);
    double affine_err = 0.0;
    for (int k = 0; k < g.size(); ++k) {
      PhasePoint p;
      p.x = g.x(k);
      cplx expect = 0.5 * (f(p) * du.values[k] + dfu.values[k]);
      affine_err = std::max(affine_err, std::abs(lu.values[k] - expect));
    }

    HamiltonianSpec spec = model_spec(c, h, perturbation_at(c, g, h, seed));
    PseudoOp ham = build_hamiltonian(g, spec);
    double ham_err = max_abs(ham.matrix - ham.matrix.adjoint()) / std::max(max_abs(ham.matrix), 1e-300);

    r.measurements.push_back({{"h", h},
                              {"N", g.n},
                              {"hermitian", herm},
                              {"kn_roundtrip", kn_err},
                              {"multiplier", mult_err},
                              {"multiplication", x_err},
                              {"affine", affine_err},
                              {"hamiltonian_hermitian", ham_err}});
    worst_herm = std::max(worst_herm, herm);
    worst_kn = std::max(worst_kn, kn_err);
    worst_mult = std::max(worst_mult, mult_err);
    worst_x = std::max(worst_x, x_err);
    worst_affine = std::max(worst_affine, affine_err);
    worst_ham = std::max(worst_ham, ham_err);
  }
  r.gate("hermitian", worst_herm <= tol, {{"max", worst_herm}, {"tol", tol}});
  r.gate("kn_roundtrip", worst_kn <= tol, {{"max", worst_kn}, {"tol", tol}});
  r.gate("multiplier", worst_mult <= tol, {{"max", worst_mult}, {"tol", tol}});
  r.gate("multiplication", worst_x <= tol, {{"max", worst_x}, {"tol", tol}});
  r.gate("affine", worst_affine <= tol, {{"max", worst_affine}, {"tol", tol}});
  r.gate("hamiltonian_hermitian", worst_ham <= tol, {{"max", worst_ham}, {"tol", tol}});
  return r;
}

ExperimentReport run_egorov(const ExperimentConfig& c) {
  validate_config(c);
  ExperimentReport r = start_report("egorov", c);
  const EgorovSection& e = c.egorov;
  std::uint64_t seed0 = r.seeds.front();
  nlohmann::json fits = nlohmann::json::object();
  for (double beta : e.betas) {
    EgorovLadder lad = egorov_ladder(e, c.length, beta, c.density, seed0, c.parallel);
    for (std::size_t k = 0; k < lad.h.size(); ++k)
      for (int s = 0; s < e.seeds_per_h; ++s)
        r.measurements.push_back({{"beta", beta},
                                  {"h", lad.h[k]},
                                  {"seed", seed0 + s},
                                  {"delta", std::pow(lad.h[k], 2.0 * beta + e.alpha_offset)},
                                  {"residual", lad.per_seed[k][s]}});
    std::string key = "beta=" + to_string(as_rational(beta));
    nlohmann::json fe = fit_entry(lad.h, lad.residual, seed0);
    fe["required_slope"] = lad.required_slope;
    fe["min_r2"] = e.min_r2;
    fe["ladder"] = lad.h.size();
    fe["mean_residual"] = lad.residual;
    fits[key] = fe;
    r.gate("egorov_rate " + key, lad.passed,
           {{"slope", lad.fit.slope}, {"r2", lad.fit.r2}, {"required_slope", lad.required_slope}});
  }
  r.fits["exponent_fit"] = fits;
  return r;
}

ExperimentReport run_decompose(const ExperimentConfig& c) {
  validate_config(c);
  ExperimentReport r = start_report("decompose", c);
  const auto& p = c.decomposition;
  std::uint64_t seed = r.seeds.front();
  double worst_res = 0.0, worst_ratio = 0.0, worst_c = 0.0;
  bool partition = true;
  std::vector<double> hs, kept;
  for (double h : c.h) {
    GridSpec g = c.grid(h);
    ShellMode mode = shell_eigenmode(g, c.mu1, c.mu2, p.phases, seed, g.d == 2 ? p.plateau : 0.0);
    DecomposeResult d = decompose_mode(mode, p);
    nlohmann::json sectors = nlohmann::json::array();
    for (const auto& s : d.sectors)
      sectors.push_back({{"sector", s.sector},
                         {"kept", s.kept},
                         {"band_size", s.band_size},
                         {"classes", s.classes},
                         {"N_h", s.n_h},
                         {"pre_residual", s.pre_residual},
                         {"residual", s.residual},
                         {"parseval_gap", s.parseval_gap},
                         {"min_separation", finite_or_null(s.min_separation)},
                         {"partition", s.partition_ok}});
    r.measurements.push_back({{"h", h},
                              {"seed", seed},
                              {"radius_sq", d.radius_sq},
                              {"modes", mode.points.size()},
                              {"energy", mode.energy},
                              {"sectors", sectors},
                              {"parts", d.parts.size()},
                              {"orthogonality_ratio", d.orthogonality.ratio},
                              {"max_overlap", d.orthogonality.max_overlap},
                              {"residual", d.max_residual},
                              {"kept_max", d.kept_max},
                              {"cardinality_constant", d.cardinality_constant}});
    worst_res = std::max(worst_res, d.max_residual);
    worst_ratio = std::max(worst_ratio, d.orthogonality.ratio);
    worst_c = std::max(worst_c, d.cardinality_constant);
    partition = partition && d.partition_ok;
    hs.push_back(h);
    kept.push_back(std::max(d.kept_max, 1));
  }
  if (hs.size() >= 2) r.fits["kept_terms"] = fit_entry(hs, kept, seed);
  r.gate("reconstruction", worst_res <= 1e-8, {{"max", worst_res}, {"tol", 1e-8}});
  r.gate("partition", partition);
  r.gate("cardinality", true, {{"C", worst_c}, {"exponent", -(c.d - 1) - p.epsilon}});
  if (p.gamma > 0.5)
    r.gate("near_orthogonality", worst_ratio <= 1.0 + 1e-6, {{"max_ratio", worst_ratio}, {"tol", 1e-6}});
  return r;
}

ExperimentReport run_propagate(const ExperimentConfig& c) {
  validate_config(c);
  ExperimentReport r = start_report("propagate", c);
  std::uint64_t seed = r.seeds.front();
  double worst_u = 0.0, worst_spec = 0.0, worst_mono = 0.0;
  for (double h : c.h) {
    GridSpec g{c.d, c.quantize_n, c.length, h};
    auto q = perturbation_at(c, g, h, seed);
    HamiltonianSpec spec = model_spec(c, h, q);
    Propagator prop(build_hamiltonian(g, spec));
    Eigen::MatrixXcd u = prop.unitary(c.t);
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(g.size(), g.size());
    double unit = max_abs(u.adjoint() * u - id);

    ConjugatedOperator conj = conjugate_laplacian(prop, c.t);
    Eigen::MatrixXcd herm = 0.5 * (conj.matrix + conj.matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    std::vector<double> ref;
    for (int k = 0; k < g.size(); ++k) {
      auto xi = g.xi(k);
      ref.push_back(xi[0] * xi[0] + xi[1] * xi[1]);
    }
    std::sort(ref.begin(), ref.end());
    double spec_err = 0.0;
    for (int k = 0; k < g.size(); ++k) spec_err = std::max(spec_err, std::abs(es.eigenvalues()[k] - ref[k]));

    // Transport of a linear-phase sheet: free characteristics and the phase correction.
    double xi0 = c.concentration.xi0;
    double patch = c.concentration.patch;
    Vec2 centre{0.5 * c.length, c.d == 2 ? 0.5 * c.length : 0.0};
    Vec2 dir{xi0, 0.0};
    LagrangianSheet sheet = linear_sheet(c.d, c.length, centre, patch, dir, [&](const Vec2& y) {
      double r2 = 0.0;
      for (int i = 0; i < c.d; ++i) r2 += std::pow(torus_delta(y[i] - centre[i], c.length), 2);
      return cplx(plateau_value(std::sqrt(r2) / (0.5 * patch)), 0.0);
    });
    HamiltonianSpec free = spec;
    free.delta = 0.0;
    free.perturbation.reset();
    WkbOptions opt;
    double mono = 0.0, max_corr = 0.0, max_gap = 0.0;
    int max_touched = 0;
    // The perturbed characteristics may fold; such points are counted, not fatal.
    std::map<std::string, int> full_failures;
    for (const Vec2& y : sheet.sample_points(16)) {
      Vec2 x{y[0] + c.t * dir[0], c.d == 2 ? y[1] + c.t * dir[1] : 0.0};
      WkbPoint w = wkb_point(sheet, free, c.t, x, opt, &y);
      double g2 = w.grad[0] * w.grad[0] + w.grad[1] * w.grad[1];
      mono = std::max(mono, std::abs(g2 - xi0 * xi0));
      PhaseIntegral z = phase_integral(sheet, spec, c.t, x, PhaseMode::Zeroth, opt);
      max_corr = std::max(max_corr, std::abs(z.correction));
      max_touched = std::max(max_touched, static_cast<int>(z.touched.size()));
      try {
        PhaseIntegral full = phase_integral(sheet, spec, c.t, x, PhaseMode::Full, opt);
        max_gap = std::max(max_gap, std::abs(full.phase - z.phase));
      } catch (const StageError& e) {
        ++full_failures[e.stage()];
      }
    }
    r.measurements.push_back({{"h", h},
                              {"seed", seed},
                              {"N", g.n},
                              {"delta", spec.delta},
                              {"unitarity", unit},
                              {"spectrum", spec_err},
                              {"reconstruction", prop.reconstruction_error()},
                              {"monochromaticity", mono},
                              {"phase_correction", max_corr},
                              {"zeroth_vs_full", max_gap},
                              {"touched", max_touched},
                              {"full_mode_failures", full_failures}});
    worst_u = std::max(worst_u, unit);
    worst_spec = std::max(worst_spec, spec_err);
    worst_mono = std::max(worst_mono, mono);
  }
  r.gate("unitarity", worst_u <= 1e-10, {{"max", worst_u}, {"tol", 1e-10}});
  r.gate("spectral_invariance", worst_spec <= 1e-9, {{"max", worst_spec}, {"tol", 1e-9}});
  if (c.metric != "warped" || c.warp == 0.0)
    r.gate("monochromaticity", worst_mono <= 1e-6, {{"max", worst_mono}, {"tol", 1e-6}});
  return r;
}

ExperimentReport run_concentration(const ExperimentConfig& c) {
  validate_config(c);
  ExperimentReport r = start_report("concentration", c);
  const ConcentrationSection& cs = c.concentration;
  std::uint64_t seed = r.seeds.front();
  ExponentBudget budget = gamma_prime(as_rational(c.alpha), as_rational(c.beta), c.d);
  double gamma = boost::rational_cast<double>(budget.gamma);
  Vec2 x{0.5 * c.length, c.d == 2 ? 0.5 * c.length : 0.0};

  std::vector<ZModel> models;
  bool all_disjoint = true;
  double worst_corr = 0.0, bound = 0.0, min_sep = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < cs.h.size(); ++k) {
    double h = cs.h[k];
    GridSpec g = c.grid(h);
    SheetFamily fam = make_sheet_family(c.d, c.length, h, cs.sheets, cs.xi0, cs.t, cs.patch, x);
    HamiltonianSpec spec = model_spec(c, h, perturbation_at(c, g, h, seed));
    WkbOptions opt;
    ZModel m = build_z_model(fam.g, spec, cs.t, x, fam.g_norm, opt);

    std::vector<ZSample> samples(c.draws);
    parallel_for(c.draws, c.parallel, [&](int i) {
      samples[i] = draw_z(m, counter_hash(seed, static_cast<std::uint64_t>(i), 1000 + k), c.density);
    });
    IndependenceReport ind = independence_check(samples);
    all_disjoint = all_disjoint && ind.disjoint_fraction == 1.0;
    worst_corr = std::max(worst_corr, ind.max_disjoint_corr);
    bound = ind.bound;
    min_sep = std::min(min_sep, fam.min_separation);
    std::vector<int> dep_sizes;
    for (const auto& dset : m.deps) dep_sizes.push_back(static_cast<int>(dset.size()));
    r.measurements.push_back({{"h", h},
                              {"seed", seed},
                              {"sheets", cs.sheets},
                              {"separation", finite_or_null(fam.min_separation)},
                              {"separation_required", std::pow(h, c.beta - cs.epsilon)},
                              {"g_norm", fam.g_norm},
                              {"dependency_sizes", dep_sizes},
                              {"disjoint_fraction", ind.disjoint_fraction},
                              {"max_disjoint_corr", ind.max_disjoint_corr},
                              {"corr_bound", ind.bound}});
    models.push_back(std::move(m));
  }

  ConcentrationParams p;
  p.d = c.d;
  p.beta = c.beta;
  p.epsilon = cs.epsilon;
  p.gamma = gamma;
  p.draws = c.draws;
  p.seed = seed;
  p.density = c.density;
  p.workers = c.parallel;
  p.tolerance = cs.tolerance;
  ConcentrationReport rep = concentration_check(models, p);
  nlohmann::json points = nlohmann::json::array();
  std::vector<double> hs, ys;
  for (const auto& pt : rep.points) {
    points.push_back({{"h", pt.h},
                      {"mean_abs", pt.mean_abs},
                      {"exact_mean_abs", pt.exact_mean_abs},
                      {"g_norm", pt.g_norm},
                      {"weight_l1", pt.weight_l1},
                      {"mean_bound", pt.mean_bound},
                      {"q50", pt.q50},
                      {"q90", pt.q90},
                      {"q99", pt.q99},
                      {"qmax", pt.qmax},
                      {"tail_fraction", pt.tail_fraction},
                      {"tail_threshold", pt.tail_threshold},
                      {"unitarity_constant", pt.unitarity_constant},
                      {"draws", pt.draws}});
    hs.push_back(pt.h);
    ys.push_back(pt.mean_abs / pt.g_norm);
  }
  r.measurements.push_back({{"concentration", points}});
  r.fits["mean_decay"] = {{"slope", rep.fit.slope},
                          {"intercept", rep.fit.intercept},
                          {"r2", rep.fit.r2},
                          {"ci_lo", rep.slope_ci.lo},
                          {"ci_hi", rep.slope_ci.hi},
                          {"predicted", rep.predicted_slope},
                          {"Gamma", gamma}};
  r.fits["exact_mean_decay"] = {
      {"slope", rep.exact_fit.slope}, {"intercept", rep.exact_fit.intercept}, {"r2", rep.exact_fit.r2}};
  r.gate("independence_disjoint", all_disjoint, {{"min_separation", finite_or_null(min_sep)}});
  r.gate("independence_corr", worst_corr <= bound, {{"max", worst_corr}, {"bound", bound}});
  r.gate("concentration_slope", rep.slope_ok,
         {{"slope", rep.fit.slope}, {"predicted", rep.predicted_slope}, {"tolerance", cs.tolerance}});
  r.gate("concentration_tail", rep.tail_ok);
  return r;
}

ExperimentReport run_supnorm_sweep(const ExperimentConfig& c) {
  validate_config(c);
  ExperimentReport r = start_report("supnorm-sweep", c);
  GradientBound mode = gradient_bound_from_name(c.supnorm.gradient_bound);
  std::vector<double> hs, base_ratio, pert_ratio;
  bool conclusive = true;
  for (double h : c.h) {
    GridSpec g = c.grid(h);
    ShellMode sm = shell_eigenmode(g, c.mu1, c.mu2, "aligned", 0, 0.0);
    SupnormCertificate base = supnorm_measure(sm.psi, mode, c.supnorm.tol, c.supnorm.max_oversampling);
    conclusive = conclusive && !base.inconclusive;
    bool dense = c.supnorm.propagator == "dense" || (c.supnorm.propagator == "auto" && g.size() <= 1024);
    double acc = 0.0;
    for (std::uint64_t seed : r.seeds) {
      HamiltonianSpec spec = model_spec(c, h, perturbation_at(c, g, h, seed));
      PseudoOp ham = build_hamiltonian(g, spec);
      WaveFunction out;
      int terms = 0;
      if (dense) {
        out = Propagator(ham).apply(c.t, sm.psi);
      } else {
        ChebyshevPropagator cp(ham);
        out = cp.apply(c.t, sm.psi);
        terms = cp.last_terms();
      }
      double norm = l2_norm(out);
      SupnormCertificate cert = supnorm_measure(out, mode, c.supnorm.tol, c.supnorm.max_oversampling);
      conclusive = conclusive && !cert.inconclusive;
      acc += cert.upper / norm;
      r.measurements.push_back({{"h", h},
                                {"seed", seed},
                                {"radius_sq", sm.radius_sq},
                                {"modes", sm.points.size()},
                                {"baseline", to_json(base)},
                                {"perturbed", to_json(cert)},
                                {"norm", norm},
                                {"ratio", cert.upper / norm},
                                {"propagator", dense ? "dense" : "chebyshev"},
                                {"chebyshev_terms", terms}});
    }
    hs.push_back(h);
    base_ratio.push_back(base.upper);
    pert_ratio.push_back(acc / r.seeds.size());
  }
  std::uint64_t seed = r.seeds.front();
  if (hs.size() >= 2) {
    nlohmann::json fb = fit_entry(hs, base_ratio, seed);
    nlohmann::json fp = fit_entry(hs, pert_ratio, seed);
    ExponentBudget b = gamma_prime(as_rational(c.alpha), as_rational(c.beta), c.d);
    r.fits["baseline"] = fb;
    r.fits["perturbed"] = fp;
    r.fits["gap"] = {{"slope_difference", fp["slope"].get<double>() - fb["slope"].get<double>()},
                     {"predicted_exponent", boost::rational_cast<double>(b.supnorm_exponent)}};
  }
  r.gate("certified", conclusive);
  return r;
}

ExperimentReport run_exponents(int d, const Rational& alpha, const Rational& beta) {
  ExperimentReport r;
  r.subcommand = "exponents";
  r.config = {{"d", d}, {"alpha", to_string(alpha)}, {"beta", to_string(beta)}};
  ExponentBudget b = gamma_prime(alpha, beta, d);
  r.measurements.push_back({{"budget", to_json(b)}});
  nlohmann::json opt = nlohmann::json::array();
  for (int dd = 1; dd <= 3; ++dd) {
    GammaOptimum o = optimize_gamma_prime(dd);
    opt.push_back({{"d", dd},
                   {"best", to_json(o.best)},
                   {"numeric_alpha", o.numeric_alpha},
                   {"numeric_beta", o.numeric_beta},
                   {"numeric_value", o.numeric_value}});
  }
  r.measurements.push_back({{"optimum", opt}});
  r.gate("feasible", true);
  return r;
}

ExperimentReport run_subcommand(const std::string& name, const ExperimentConfig& c) {
  if (name == "validate") return run_validate(c);
  if (name == "quantize-check") return run_quantize_check(c);
  if (name == "egorov") return run_egorov(c);
  if (name == "decompose") return run_decompose(c);
  if (name == "propagate") return run_propagate(c);
  if (name == "concentration") return run_concentration(c);
  if (name == "supnorm-sweep") return run_supnorm_sweep(c);
  if (name == "exponents") {
    ExperimentReport r = run_exponents(c.d, as_rational(c.alpha), as_rational(c.beta));
    ExperimentReport base = start_report("exponents", c);
    r.config = base.config;
    r.seeds = base.seeds;
    return r;
  }
  throw ConfigError("unknown subcommand '" + name + "'");
}

}  // namespace semitorus
