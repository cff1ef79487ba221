#include <CLI11.hpp>

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <map>

#include "semitorus/config.hpp"
#include "semitorus/errors.hpp"
#include "semitorus/experiments.hpp"
#include "semitorus/exponents.hpp"
#include "semitorus/report.hpp"

using namespace semitorus;

namespace {

enum Exit { kOk = 0, kGateFailed = 1, kConfig = 2, kFeasibility = 3, kStage = 4, kResolution = 5, kOther = 6 };

struct Options {
  std::string config;
  std::string out;
  int parallel = 0;
  long long seed_offset = -1;
  int d = 2;
  std::string alpha = "5/7";
  std::string beta = "2/7";
};

void print_exponents(const ExperimentReport& r) {
  const auto& b = r.measurements.at(0).at("budget");
  std::cout << std::left << std::setw(4) << "d" << std::setw(10) << "alpha" << std::setw(10) << "beta"
            << std::setw(12) << "Gamma" << std::setw(12) << "Gamma'"
            << "sup-norm exponent\n";
  std::cout << std::setw(4) << b.at("d").get<int>() << std::setw(10) << b.at("alpha").get<std::string>()
            << std::setw(10) << b.at("beta").get<std::string>()
            << std::setw(12) << (b.at("Gamma").get<std::string>() + (b.at("Gamma_open").get<bool>() ? " (open)" : ""))
            << std::setw(12) << b.at("GammaPrime").get<std::string>() << b.at("supnorm_exponent").get<std::string>()
            << "\n\noptimum over (alpha, beta):\n";
  for (const auto& o : r.measurements.at(1).at("optimum")) {
    const auto& best = o.at("best");
    std::cout << "  d=" << o.at("d").get<int>() << "  Gamma'=" << best.at("GammaPrime").get<std::string>()
              << " at alpha=" << best.at("alpha").get<std::string>() << " beta=" << best.at("beta").get<std::string>()
              << "  (numeric " << o.at("numeric_value").get<double>() << ")\n";
  }
}

int run(const std::string& name, const Options& o, bool has_d, bool has_alpha, bool has_beta) {
  ExperimentReport r;
  std::filesystem::path out_dir = "out";
  if (const char* env = std::getenv("SEMITORUS_OUT")) out_dir = env;
  if (name == "exponents" && o.config.empty()) {
    r = run_exponents(o.d, parse_rational(o.alpha), parse_rational(o.beta));
  } else {
    if (o.config.empty()) throw ConfigError("--config is required for '" + name + "'");
    ExperimentConfig c = load_config(o.config);
    if (!std::getenv("SEMITORUS_OUT")) out_dir = c.out;
    if (o.parallel > 0) c.parallel = o.parallel;
    if (o.seed_offset >= 0) c.seed_offset = static_cast<std::uint64_t>(o.seed_offset);
    if (name == "exponents" && (has_d || has_alpha || has_beta)) {
      r = run_exponents(has_d ? o.d : c.d, has_alpha ? parse_rational(o.alpha) : parse_rational(std::to_string(c.alpha)),
                        has_beta ? parse_rational(o.beta) : parse_rational(std::to_string(c.beta)));
    } else {
      r = run_subcommand(name, c);
    }
  }
  if (!o.out.empty()) out_dir = o.out;
  r.timestamp = utc_timestamp();
  if (name == "exponents") print_exponents(r);
  auto path = write_report(out_dir, r);
  for (const auto& [gate, g] : r.gates.items())
    std::cout << (g.value("passed", false) ? "PASS " : "FAIL ") << gate << "\n";
  std::cout << "report " << path.string() << "\nsha256 " << report_hash(r) << "\n";
  return r.passed() ? kOk : kGateFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical propagation experiments on the flat torus"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"validate", "feasibility and resolution checks only"},
      {"quantize-check", "quantisation identities on the configured grid"},
      {"egorov", "Heisenberg vs classical transport residual ladder"},
      {"decompose", "band decomposition of a shell eigenmode into separated superpositions"},
      {"propagate", "unitarity, conjugated spectrum and WKB transport"},
      {"concentration", "Monte Carlo statistics of the propagated superposition at a point"},
      {"supnorm-sweep", "certified sup-norm ratios before and after propagation"},
      {"exponents", "exact exponent budget and optimiser"},
  };
  std::map<std::string, CLI::App*> apps;
  CLI::Option *opt_d = nullptr, *opt_alpha = nullptr, *opt_beta = nullptr;
  for (const auto& [name, desc] : subs) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->add_option("--config", o.config, "experiment config (JSON with comments)");
    s->add_option("--out", o.out, "output directory (default: $SEMITORUS_OUT, then run.out)");
    s->add_option("--parallel", o.parallel, "worker threads")->check(CLI::PositiveNumber);
    s->add_option("--seed-offset", o.seed_offset, "added to every declared seed")->check(CLI::NonNegativeNumber);
    if (name == "exponents") {
      opt_d = s->add_option("--d", o.d, "dimension")->check(CLI::Range(1, 16));
      opt_alpha = s->add_option("--alpha", o.alpha, "rational alpha, e.g. 5/7");
      opt_beta = s->add_option("--beta", o.beta, "rational beta, e.g. 2/7");
    }
    apps[name] = s;
  }
  CLI11_PARSE(app, argc, argv);

  std::string name;
  for (const auto& [n, s] : apps)
    if (s->parsed()) name = n;
  try {
    return run(name, o, opt_d->count() > 0, opt_alpha->count() > 0, opt_beta->count() > 0);
  } catch (const FeasibilityError& e) {
    std::cerr << "feasibility error [" << e.inequality() << "]: " << e.what() << "\n";
    return kFeasibility;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const StageError& e) {
    std::cerr << "stage error [" << e.stage() << "]: " << e.what() << "\n";
    return kStage;
  } catch (const ResolutionError& e) {
    std::cerr << "resolution error: " << e.what() << "\n";
    return kResolution;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
}
