#include <doctest.h>

#include <fstream>
#include <sstream>

#include "semitorus/config.hpp"
#include "semitorus/errors.hpp"
#include "semitorus/experiments.hpp"

using namespace semitorus;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string shipped(const std::string& name) { return std::string(SEMITORUS_CONFIG_DIR) + "/" + name; }

}  // namespace

TEST_CASE("shipped configs load, validate and round-trip") {
  for (const char* name : {"d1-small.json", "d2-small.json"}) {
    ExperimentConfig c = load_config(shipped(name));
    CHECK_NOTHROW(validate_config(c));
    CHECK(c.egorov.seeds_per_h == 8);
    ExperimentConfig again = parse_config(to_json(c).dump());
    CHECK(to_json(again) == to_json(c));
  }
  ExperimentConfig d2 = load_config(shipped("d2-small.json"));
  CHECK(d2.d == 2);
  CHECK(d2.n == 64);
  CHECK(d2.quantize_n == 32);
}

TEST_CASE("defaults fill in omitted sections") {
  ExperimentConfig c = parse_config(R"({"schema": "semitorus-config/1", "domain": {"d": 2, "N": 64},
                                        "ladder": {"h": [0.25, 0.125]}})");
  CHECK(c.quantize_n == 32);
  CHECK(c.egorov.h == c.h);
  CHECK(c.concentration.h == c.h);
  CHECK(c.effective_seeds() == std::vector<std::uint64_t>{1});
  c.seed_offset = 10;
  CHECK(c.effective_seeds() == std::vector<std::uint64_t>{11});
}

TEST_CASE("syntax errors report line and column") {
  std::string msg = message_of("{\n  \"domain\": {\"d\": 1,,}\n}");
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("column 21") != std::string::npos);
  // Comments are accepted.
  CHECK(message_of("// note\n{\"domain\": {\"d\": 1}}") == "");
}

TEST_CASE("schema violations name the field") {
  CHECK(message_of(R"({"domain": {"d": "two"}})").find("'domain.d'") != std::string::npos);
  CHECK(message_of(R"({"domain": {"dims": 2}})").find("'domain.dims': unknown key") != std::string::npos);
  CHECK(message_of(R"({"ladder": {"h": [0.5, "x"]}})").find("'ladder.h[1]'") != std::string::npos);
  CHECK(message_of(R"({"perturbation": {"seeds": [-1]}})").find("'perturbation.seeds[0]'") != std::string::npos);
  CHECK(message_of(R"({"perturbation": {"density": "cauchy"}})").find("'perturbation.density'") != std::string::npos);
  CHECK(message_of(R"({"schema": "other/2"})").find("'schema'") != std::string::npos);
  CHECK(message_of(R"({"model": 3})").find("expected an object") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("feasibility checks name the violated inequality") {
  ExperimentConfig c = load_config(shipped("d1-small.json"));
  c.beta = 0.6;
  try {
    validate_config(c);
    FAIL("expected a feasibility error");
  } catch (const FeasibilityError& e) {
    CHECK(e.inequality() == "beta < 1/2");
  }
  c.beta = 0.4;
  c.alpha = 0.7;
  try {
    validate_config(c);
    FAIL("expected a feasibility error");
  } catch (const FeasibilityError& e) {
    CHECK(e.inequality() == "beta < alpha/2");
  }
}

TEST_CASE("exponents subcommand report") {
  ExperimentReport r = run_exponents(2, Rational(5, 7), Rational(2, 7));
  CHECK(r.passed());
  const auto& b = r.measurements.at(0).at("budget");
  CHECK(b.at("GammaPrime").get<std::string>() == "1/7");
  CHECK(b.at("supnorm_exponent").get<std::string>() == "-5/14");
  CHECK_THROWS_AS(run_exponents(2, Rational(1, 2), Rational(3, 5)), FeasibilityError);
}

TEST_CASE("report hash does not depend on the worker count") {
  ExperimentConfig c = load_config(shipped("d2-small.json"));
  c.parallel = 1;
  std::string serial = report_hash(run_subcommand("decompose", c));
  c.parallel = 4;
  CHECK(report_hash(run_subcommand("decompose", c)) == serial);
  c.out = "elsewhere";
  CHECK(report_hash(run_subcommand("decompose", c)) == serial);
  CHECK_THROWS_AS(run_subcommand("nonsense", c), ConfigError);
}
