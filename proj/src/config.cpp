#include "semitorus/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "semitorus/errors.hpp"
#include "semitorus/exponents.hpp"
#include "semitorus/supnorm.hpp"

namespace semitorus {

using nlohmann::json;

namespace {

std::string type_name(const json& v) { return v.type_name(); }

// Reads one JSON object, remembering which keys were consumed.
class Section {
 public:
  Section(const json& root, std::string path) : path_(std::move(path)) {
    if (!root.is_object()) throw ConfigError("field '" + path_ + "': expected an object, got " + type_name(root));
    obj_ = &root;
  }

  bool has(const std::string& key) const { return obj_->contains(key); }

  template <class T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!obj_->contains(key)) return;
    const json& v = obj_->at(key);
    try {
      if constexpr (std::is_same_v<T, int>) {
        if (!v.is_number_integer()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) throw ConfigError("");
      }
      out = v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError("field '" + field(key) + "': wrong type " + type_name(v));
    }
  }

  template <class T>
  void read_list(const std::string& key, std::vector<T>& out) {
    seen_.insert(key);
    if (!obj_->contains(key)) return;
    const json& v = obj_->at(key);
    if (!v.is_array()) throw ConfigError("field '" + field(key) + "': expected an array, got " + type_name(v));
    std::vector<T> tmp;
    for (std::size_t i = 0; i < v.size(); ++i) {
      bool ok = std::is_same_v<T, double> ? v[i].is_number() : v[i].is_number_unsigned() || v[i].is_number_integer();
      if (!ok || (!std::is_same_v<T, double> && v[i].get<long long>() < 0))
        throw ConfigError("field '" + field(key) + "[" + std::to_string(i) + "]': wrong type " + type_name(v[i]));
      tmp.push_back(v[i].get<T>());
    }
    out = std::move(tmp);
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Section(obj_->contains(key) ? obj_->at(key) : empty, field(key));
  }

  void finish() const {
    for (const auto& [key, v] : obj_->items())
      if (!seen_.count(key)) throw ConfigError("field '" + field(key) + "': unknown key");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json* obj_ = nullptr;
  std::string path_;
  std::set<std::string> seen_;
};

void fail(const std::string& field, const std::string& what) {
  throw ConfigError("field '" + field + "': " + what);
}

bool power_of_two(int n) { return n >= 8 && (n & (n - 1)) == 0; }

}  // namespace

double ExperimentConfig::delta(double h_value) const { return std::pow(h_value, alpha); }

std::vector<std::uint64_t> ExperimentConfig::effective_seeds() const {
  std::vector<std::uint64_t> out;
  for (auto s : seeds) out.push_back(s + seed_offset);
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("config parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": " + e.what());
  }
  ExperimentConfig c;
  Section top(root, "");
  std::string schema = kConfigSchema;
  top.read("schema", schema);
  if (schema != kConfigSchema) fail("schema", "expected '" + std::string(kConfigSchema) + "', got '" + schema + "'");

  Section dom = top.child("domain");
  dom.read("d", c.d);
  dom.read("N", c.n);
  dom.read("L", c.length);
  dom.finish();

  Section lad = top.child("ladder");
  lad.read_list("h", c.h);
  lad.finish();

  Section mod = top.child("model");
  mod.read("metric", c.metric);
  mod.read("warp", c.warp);
  mod.read("mu1", c.mu1);
  mod.read("mu2", c.mu2);
  mod.read("t", c.t);
  mod.finish();

  Section per = top.child("perturbation");
  per.read("alpha", c.alpha);
  per.read("beta", c.beta);
  per.read("eps0", c.eps0);
  std::string density = density_name(c.density);
  per.read("density", density);
  try {
    c.density = density_from_name(density);
  } catch (const std::exception& e) {
    fail("perturbation.density", e.what());
  }
  per.read_list("seeds", c.seeds);
  per.finish();

  Section dec = top.child("decomposition");
  dec.read("gamma", c.decomposition.gamma);
  dec.read("epsilon", c.decomposition.epsilon);
  dec.read("rho", c.decomposition.rho);
  dec.read("plateau", c.decomposition.plateau);
  dec.read("cutoff_order", c.decomposition.cutoff_order);
  dec.read("phases", c.decomposition.phases);
  dec.finish();

  Section run = top.child("run");
  run.read("draws", c.draws);
  run.read("parallel", c.parallel);
  run.read("out", c.out);
  run.read("seed_offset", c.seed_offset);
  run.finish();

  Section qz = top.child("quantize");
  qz.read("N", c.quantize_n);
  qz.finish();

  Section eg = top.child("egorov");
  eg.read("N", c.egorov.n);
  eg.read_list("h", c.egorov.h);
  eg.read_list("betas", c.egorov.betas);
  eg.read("alpha_offset", c.egorov.alpha_offset);
  eg.read("mu1", c.egorov.mu1);
  eg.read("mu2", c.egorov.mu2);
  eg.read("t", c.egorov.t);
  eg.read("seeds_per_h", c.egorov.seeds_per_h);
  eg.read("symbol_xi", c.egorov.symbol_xi);
  eg.read("width_factor", c.egorov.width_factor);
  eg.read("tolerance", c.egorov.tolerance);
  eg.read("min_r2", c.egorov.min_r2);
  eg.finish();

  Section co = top.child("concentration");
  co.read("sheets", c.concentration.sheets);
  co.read("t", c.concentration.t);
  co.read("xi0", c.concentration.xi0);
  co.read("patch", c.concentration.patch);
  co.read("epsilon", c.concentration.epsilon);
  co.read("tolerance", c.concentration.tolerance);
  co.read_list("h", c.concentration.h);
  co.finish();

  Section sn = top.child("supnorm");
  sn.read("gradient_bound", c.supnorm.gradient_bound);
  sn.read("tol", c.supnorm.tol);
  sn.read("max_oversampling", c.supnorm.max_oversampling);
  sn.read("propagator", c.supnorm.propagator);
  sn.finish();

  top.finish();
  if (c.egorov.h.empty()) c.egorov.h = c.h;
  if (c.concentration.h.empty()) c.concentration.h = c.h;
  if (c.quantize_n == 0) c.quantize_n = c.d == 1 ? c.n : std::min(c.n, 32);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void validate_config(const ExperimentConfig& c) {
  if (c.d != 1 && c.d != 2) fail("domain.d", "must be 1 or 2");
  if (!power_of_two(c.n)) fail("domain.N", "must be a power of two >= 8");
  if (!(c.length > 0.0)) fail("domain.L", "must be positive");
  if (c.h.empty()) fail("ladder.h", "needs at least one value");
  if (!(c.mu1 > 0.0 && c.mu2 > c.mu1)) fail("model.mu1", "need 0 < mu1 < mu2");
  if (!(c.t > 0.0)) fail("model.t", "must be positive");
  if (c.metric != "flat" && c.metric != "warped") fail("model.metric", "must be 'flat' or 'warped'");
  if (c.metric == "flat" && c.warp != 0.0) fail("model.warp", "must be 0 for the flat metric");
  double wlo = -1.0, whi = c.d == 1 ? 1.0 : 2.0;
  if (!(c.warp > wlo && c.warp < whi)) fail("model.warp", "metric factor must stay positive");
  for (std::size_t i = 0; i < c.h.size(); ++i) {
    std::string f = "ladder.h[" + std::to_string(i) + "]";
    try {
      GridSpec g = c.grid(c.h[i]);
      g.validate();
      g.check_shell(c.mu2);
    } catch (const ResolutionError& e) {
      fail(f, e.what());
    }
  }
  // Exponent conditions for delta = h^alpha.
  if (!(c.beta > 0.0)) throw FeasibilityError("beta > 0", "perturbation.beta must be positive");
  if (!(c.beta < 0.5)) throw FeasibilityError("beta < 1/2", "perturbation.beta = " + std::to_string(c.beta) +
                                                                " violates beta < 1/2");
  if (!(c.beta < c.alpha / 2.0))
    throw FeasibilityError("beta < alpha/2", "perturbation.beta violates beta < alpha/2");
  if (!(c.beta < 2.0 - 2.0 * c.alpha))
    throw FeasibilityError("beta < 2 - 2 alpha", "perturbation.beta violates beta < 2 - 2 alpha");
  check_margin(c.alpha, c.beta, c.eps0);
  if (c.seeds.empty()) fail("perturbation.seeds", "needs at least one seed");

  const auto& dc = c.decomposition;
  if (!(dc.gamma > 0.0 && dc.gamma <= 1.0)) fail("decomposition.gamma", "must lie in (0, 1]");
  if (!(dc.epsilon > 0.0)) fail("decomposition.epsilon", "must be positive");
  if (!(dc.rho > 0.0)) fail("decomposition.rho", "must be positive");
  if (!(dc.plateau > 0.0 && dc.plateau < 0.25 * M_PI)) fail("decomposition.plateau", "must lie in (0, pi/4)");
  if (dc.cutoff_order < 0) fail("decomposition.cutoff_order", "must be non-negative");
  if (dc.phases != "random" && dc.phases != "aligned") fail("decomposition.phases", "must be 'random' or 'aligned'");

  if (c.draws < 1000) fail("run.draws", "concentration needs at least 1000 draws");
  if (c.parallel < 1) fail("run.parallel", "must be at least 1");
  if (!power_of_two(c.quantize_n)) fail("quantize.N", "must be a power of two >= 8");

  const auto& e = c.egorov;
  if (!power_of_two(e.n)) fail("egorov.N", "must be a power of two >= 8");
  if (e.h.size() < 2) fail("egorov.h", "needs at least two values");
  for (std::size_t i = 0; i < e.betas.size(); ++i)
    if (!(e.betas[i] > 0.0 && e.betas[i] < 0.5))
      fail("egorov.betas[" + std::to_string(i) + "]", "must lie in (0, 1/2)");
  if (!(e.mu1 > 0.0 && e.mu2 > e.mu1)) fail("egorov.mu1", "need 0 < mu1 < mu2");
  if (!(e.t > 0.0)) fail("egorov.t", "must be positive");
  if (e.seeds_per_h < 1) fail("egorov.seeds_per_h", "must be at least 1");
  if (!(e.width_factor > 0.0)) fail("egorov.width_factor", "must be positive");
  for (std::size_t i = 0; i < e.h.size(); ++i) {
    try {
      GridSpec g{1, e.n, c.length, e.h[i]};
      g.validate();
      g.check_shell(e.mu2);
    } catch (const ResolutionError& err) {
      fail("egorov.h[" + std::to_string(i) + "]", err.what());
    }
  }

  const auto& cc = c.concentration;
  if (cc.sheets < 1) fail("concentration.sheets", "must be at least 1");
  if (!(cc.t > 0.0)) fail("concentration.t", "must be positive");
  if (!(cc.patch > 0.0 && cc.patch < 0.25 * c.length)) fail("concentration.patch", "must lie in (0, L/4)");
  if (!(cc.epsilon > 0.0 && cc.epsilon < c.beta)) fail("concentration.epsilon", "must lie in (0, beta)");
  if (cc.h.size() < 2) fail("concentration.h", "needs at least two values");
  if (c.d == 1 && cc.sheets > 2) fail("concentration.sheets", "at most 2 sheets (directions +-xi0) in d = 1");
  if (!(cc.xi0 * cc.xi0 >= c.mu1 && cc.xi0 * cc.xi0 <= c.mu2))
    fail("concentration.xi0", "xi0^2 must lie in the shell [mu1, mu2]");

  try {
    gradient_bound_from_name(c.supnorm.gradient_bound);
  } catch (const ConfigError& err) {
    fail("supnorm.gradient_bound", err.what());
  }
  if (!(c.supnorm.tol > 0.0)) fail("supnorm.tol", "must be positive");
  if (c.supnorm.max_oversampling < 1) fail("supnorm.max_oversampling", "must be at least 1");
  const auto& p = c.supnorm.propagator;
  if (p != "auto" && p != "dense" && p != "chebyshev") fail("supnorm.propagator", "must be auto, dense or chebyshev");
}

json to_json(const ExperimentConfig& c) {
  json seeds = json::array();
  for (auto s : c.seeds) seeds.push_back(s);
  return {
      {"schema", kConfigSchema},
      {"domain", {{"d", c.d}, {"N", c.n}, {"L", c.length}}},
      {"ladder", {{"h", c.h}}},
      {"model", {{"metric", c.metric}, {"warp", c.warp}, {"mu1", c.mu1}, {"mu2", c.mu2}, {"t", c.t}}},
      {"perturbation",
       {{"alpha", c.alpha}, {"beta", c.beta}, {"eps0", c.eps0}, {"density", density_name(c.density)}, {"seeds", seeds}}},
      {"decomposition",
       {{"gamma", c.decomposition.gamma},
        {"epsilon", c.decomposition.epsilon},
        {"rho", c.decomposition.rho},
        {"plateau", c.decomposition.plateau},
        {"cutoff_order", c.decomposition.cutoff_order},
        {"phases", c.decomposition.phases}}},
      {"run", {{"draws", c.draws}, {"parallel", c.parallel}, {"out", c.out}, {"seed_offset", c.seed_offset}}},
      {"quantize", {{"N", c.quantize_n}}},
      {"egorov",
       {{"N", c.egorov.n},
        {"h", c.egorov.h},
        {"betas", c.egorov.betas},
        {"alpha_offset", c.egorov.alpha_offset},
        {"mu1", c.egorov.mu1},
        {"mu2", c.egorov.mu2},
        {"t", c.egorov.t},
        {"seeds_per_h", c.egorov.seeds_per_h},
        {"symbol_xi", c.egorov.symbol_xi},
        {"width_factor", c.egorov.width_factor},
        {"tolerance", c.egorov.tolerance},
        {"min_r2", c.egorov.min_r2}}},
      {"concentration",
       {{"sheets", c.concentration.sheets},
        {"t", c.concentration.t},
        {"xi0", c.concentration.xi0},
        {"patch", c.concentration.patch},
        {"epsilon", c.concentration.epsilon},
        {"tolerance", c.concentration.tolerance},
        {"h", c.concentration.h}}},
      {"supnorm",
       {{"gradient_bound", c.supnorm.gradient_bound},
        {"tol", c.supnorm.tol},
        {"max_oversampling", c.supnorm.max_oversampling},
        {"propagator", c.supnorm.propagator}}},
  };
}

}  // namespace semitorus
