#pragma once

#include <boost/rational.hpp>
#include <nlohmann/json.hpp>
#include <string>

namespace semitorus {

using Rational = boost::rational<long long>;

std::string to_string(const Rational& q);
Rational parse_rational(const std::string& s);  // "p/q", "p" or a short decimal like "0.25"

// Exponent bookkeeping for delta = h^alpha and bump scale h^beta.
struct ExponentBudget {
  Rational alpha;
  Rational beta;
  int d = 2;
  Rational gamma;              // supremum of the admissible interval
  bool gamma_open = true;      // the supremum itself is excluded
  Rational gamma_prime;        // min(gamma, (d-1) beta / 2)
  Rational supnorm_exponent;   // (1-d)/2 + gamma_prime
  bool degenerate = false;     // beta == 0: no perturbation scale, gamma_prime = 0
};

// Throws FeasibilityError naming the first violated inequality.
ExponentBudget gamma_prime(const Rational& alpha, const Rational& beta, int d);

// Checks the delta schedule against the margin eps0 in (0, 1/4):
// alpha >= 2 beta + eps0 and 2 alpha + beta - 2 <= -eps0.
void check_margin(const Rational& alpha, const Rational& beta, const Rational& eps0);
// Same for a real-valued schedule; used by config validation.
void check_margin(double alpha, double beta, double eps0);

struct GammaOptimum {
  ExponentBudget best;       // exact, from vertex enumeration
  double numeric_alpha = 0.0;
  double numeric_beta = 0.0;
  double numeric_value = 0.0;  // grid + ternary refinement, floating point
};

// Maximizes gamma_prime over the closure of the feasible (alpha, beta) region.
GammaOptimum optimize_gamma_prime(int d);

nlohmann::json to_json(const ExponentBudget& b);

}  // namespace semitorus
